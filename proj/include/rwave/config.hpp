#pragma once

#include "rwave/chaos.hpp"
#include "rwave/grid.hpp"
#include "rwave/norms.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rwave {

// Fully resolved experiment description: the runnable command plus every
// numeric knob, defaults already applied. Zero sentinels mean "derive from
// the grid" and are resolved by the accessors below.
struct ExperimentConfig {
    std::string command; // simulate | holder | kernels-verify | chaos | params | covariance

    double t_end = 1.0;
    double x0 = -2.0;
    double x1 = 2.0;
    double dx = 0.0078125;
    double dt = 0.0; // 0 -> match dx

    double hurst = 0.4;
    std::uint64_t seed = 12345;
    double mollify_eps = 0.0; // 0 -> 4 dx^2

    std::string sigma_kind = "linear"; // zero | linear | scaled_sine
    double sigma_amplitude = 1.0;
    std::string initial_kind = "gaussian"; // zero | gaussian | constant
    double initial_constant = 0.0;

    std::size_t realizations = 100;
    std::size_t max_iterations = 12;
    double tolerance = 1e-3;
    std::string out_dir = "out";

    double norm_p = 4.0;
    double h_min = 0.0;        // 0 -> dx
    double h_max = 0.0;        // 0 -> quarter x-extent
    std::size_t lag_count = 0; // 0 -> auto
    double holder_lag_lo = 0.0; // 0 -> 4 dx
    double holder_lag_hi = 0.0; // 0 -> 32 dx

    double chaos_t = 1.0;
    double chaos_x = 0.0;
    double xi_cutoff = 65536.0;
    std::size_t xi_nodes = 1024;
    double increment_h = 0.0;     // 0 -> report the plain second moment only
    std::vector<double> scan_eps; // empty -> no divergence scan

    double params_p = 10.0;
    double params_eps = 1e-3;
    double scan_h_lo = 0.26;
    double scan_h_hi = 0.49;
    double scan_p_lo = 2.0;
    double scan_p_hi = 40.0;
    std::size_t scan_h_cells = 10;
    std::size_t scan_p_cells = 10;

    std::size_t cov_rows = 2000;
    std::size_t cov_columns = 512;
    std::vector<std::size_t> cov_lags; // empty -> {0, 1, 2, 4, 8}

    double resolved_dt() const { return dt > 0.0 ? dt : dx; }
    double resolved_eps() const { return mollify_eps > 0.0 ? mollify_eps : 4.0 * dx * dx; }

    // Derives node counts from the bounds; the bounds must be whole numbers
    // of steps (validated during parsing).
    GridSpec make_grid() const;
    NormConfig make_norm_config() const;
    ChaosConfig make_chaos_config() const;
};

// Parse outcome: every error (not just the first) plus advisory warnings.
struct ParseOutcome {
    ExperimentConfig config;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

// Parses the key = value format ('#' comments, optional [section] grouping
// headers, globally unique keys). Unknown keys and sections are errors. The
// command may come from the text or from the override; a disagreement is an
// error.
ParseOutcome parse_config(const std::string& text, const std::string& command_override = "");
ParseOutcome parse_config_file(const std::string& path, const std::string& command_override = "");

// Resolved key/value echo in fixed order; parse_config on the echo
// reproduces the config exactly.
std::vector<std::pair<std::string, std::string>> config_pairs(const ExperimentConfig& config);
std::string config_echo(const ExperimentConfig& config);

} // namespace rwave

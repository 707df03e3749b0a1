#include "rwave/runner.hpp"

#include "rwave/chaos.hpp"
#include "rwave/kernels.hpp"
#include "rwave/noise.hpp"
#include "rwave/norms.hpp"
#include "rwave/params.hpp"
#include "rwave/rng.hpp"
#include "rwave/solver.hpp"

#include "json.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace rwave {

namespace {

namespace fs = std::filesystem;

struct Sha1 {
    std::uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};
    std::uint64_t total = 0;
    unsigned char block[64] = {};
    std::size_t fill = 0;

    static std::uint32_t rol(std::uint32_t v, int s) { return (v << s) | (v >> (32 - s)); }

    void process(const unsigned char* p) {
        std::uint32_t w[80];
        for (int i = 0; i < 16; ++i)
            w[i] = (static_cast<std::uint32_t>(p[4 * i]) << 24) |
                   (static_cast<std::uint32_t>(p[4 * i + 1]) << 16) |
                   (static_cast<std::uint32_t>(p[4 * i + 2]) << 8) |
                   static_cast<std::uint32_t>(p[4 * i + 3]);
        for (int i = 16; i < 80; ++i) w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
        for (int i = 0; i < 80; ++i) {
            std::uint32_t f, k;
            if (i < 20) {
                f = (b & c) | (~b & d);
                k = 0x5A827999u;
            } else if (i < 40) {
                f = b ^ c ^ d;
                k = 0x6ED9EBA1u;
            } else if (i < 60) {
                f = (b & c) | (b & d) | (c & d);
                k = 0x8F1BBCDCu;
            } else {
                f = b ^ c ^ d;
                k = 0xCA62C1D6u;
            }
            const std::uint32_t tmp = rol(a, 5) + f + e + k + w[i];
            e = d;
            d = c;
            c = rol(b, 30);
            b = a;
            a = tmp;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
    }

    void update(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        total += n;
        while (n > 0) {
            const std::size_t take = std::min(n, sizeof(block) - fill);
            std::memcpy(block + fill, p, take);
            fill += take;
            p += take;
            n -= take;
            if (fill == sizeof(block)) {
                process(block);
                fill = 0;
            }
        }
    }

    std::string hex_digest() {
        const std::uint64_t bits = total * 8;
        const unsigned char one = 0x80;
        update(&one, 1);
        const unsigned char zero = 0x00;
        while (fill != 56) update(&zero, 1);
        unsigned char len[8];
        for (int i = 0; i < 8; ++i) len[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
        update(len, 8);
        std::ostringstream os;
        os << std::hex << std::setfill('0');
        for (const std::uint32_t v : h) os << std::setw(8) << v;
        return os.str();
    }
};

std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Holds the output-directory lock; also tracks written files so a failed run
// can clean up after itself.
struct RunDirectory {
    fs::path dir;
    fs::path lock_path;
    int lock_fd = -1;
    std::vector<std::string> written;

    explicit RunDirectory(const std::string& out_dir) : dir(out_dir) {
        fs::create_directories(dir);
        lock_path = dir / ".rwave.lock";
        lock_fd = ::open(lock_path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (lock_fd < 0)
            throw std::runtime_error("output directory '" + out_dir +
                                     "' is locked by another run (remove " +
                                     lock_path.string() + " if stale)");
        std::error_code ec;
        fs::remove(dir / "FAILED", ec); // stale marker from an earlier attempt
    }

    ~RunDirectory() {
        if (lock_fd >= 0) {
            ::close(lock_fd);
            std::error_code ec;
            fs::remove(lock_path, ec);
        }
    }

    void write_file(const std::string& name, const std::function<void(std::ostream&)>& body) {
        const fs::path path = dir / name;
        {
            std::ofstream os(path, std::ios::binary);
            if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
            os << std::setprecision(17);
            body(os);
            if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
        }
        written.push_back(name);
    }

    void discard_outputs(const std::string& reason) {
        std::error_code ec;
        for (const std::string& name : written) fs::remove(dir / name, ec);
        written.clear();
        std::ofstream marker(dir / "FAILED", std::ios::binary);
        marker << reason << "\n";
    }

    void mark_failed(const std::string& reason) {
        std::ofstream marker(dir / "FAILED", std::ios::binary);
        marker << reason << "\n";
    }
};

SigmaSpec sigma_from_config(const ExperimentConfig& c) {
    if (c.sigma_kind == "zero") return SigmaSpec::zero();
    if (c.sigma_kind == "linear") return SigmaSpec::linear(c.sigma_amplitude);
    return SigmaSpec::scaled_sine(c.sigma_amplitude);
}

InitialData initial_from_config(const ExperimentConfig& c) {
    if (c.initial_kind == "zero") return InitialData::zero();
    if (c.initial_kind == "constant") return InitialData::constant(c.initial_constant);
    return InitialData::gaussian();
}

std::vector<FieldView> ensemble_views(const SolutionField& field) {
    std::vector<FieldView> views;
    views.reserve(field.n_realizations);
    for (std::size_t r = 0; r < field.n_realizations; ++r)
        views.push_back(field.realization_view(r));
    return views;
}

void run_simulate(const ExperimentConfig& c, RunDirectory& run) {
    const GridSpec grid = c.make_grid();
    const SolutionField field =
        solve_ensemble(grid, NoiseParams{c.hurst, c.seed}, sigma_from_config(c),
                       initial_from_config(c), c.resolved_eps(), c.realizations,
                       c.max_iterations, c.tolerance);
    run.write_file("solution.csv", [&](std::ostream& os) { save_solution_csv(field, 0, os); });
    run.write_file("residuals.csv", [&](std::ostream& os) { save_residuals_csv(field, 0, os); });
    run.write_file("znorm.csv", [&](std::ostream& os) {
        norm_report_csv(ensemble_views(field), c.make_norm_config(), os);
    });
}

void run_holder(const ExperimentConfig& c, RunDirectory& run) {
    const GridSpec grid = c.make_grid();
    const SolutionField field =
        solve_ensemble(grid, NoiseParams{c.hurst, c.seed}, sigma_from_config(c),
                       initial_from_config(c), c.resolved_eps(), c.realizations,
                       c.max_iterations, c.tolerance);
    const std::vector<FieldView> views = ensemble_views(field);
    const double lag_lo = c.holder_lag_lo > 0.0 ? c.holder_lag_lo : 4.0 * grid.dx;
    const double lag_hi = c.holder_lag_hi > 0.0 ? c.holder_lag_hi : 32.0 * grid.dx;
    const HolderFit time_fit = holder_exponent(views, Axis::Time, c.norm_p, lag_lo, lag_hi);
    const HolderFit space_fit = holder_exponent(views, Axis::Space, c.norm_p, lag_lo, lag_hi);
    run.write_file("holder.csv", [&](std::ostream& os) {
        os << "axis,p,lag_lo,lag_hi,slope,std_error\n";
        os << "time," << c.norm_p << ',' << lag_lo << ',' << lag_hi << ',' << time_fit.slope
           << ',' << time_fit.std_error << '\n';
        os << "space," << c.norm_p << ',' << lag_lo << ',' << lag_hi << ',' << space_fit.slope
           << ',' << space_fit.std_error << '\n';
    });
}

// One row per check; `pass` summarizes error <= tolerance.
struct KernelCheckRow {
    std::string check;
    std::string kind;
    double alpha = 0.0;
    double parameter = 0.0;
    double error = 0.0;
    double tolerance = 0.0;
};

bool run_kernels_verify(const ExperimentConfig& c, RunDirectory& run) {
    std::vector<KernelCheckRow> rows;
    std::vector<double> xi_grid;
    for (int k = -200; k <= 200; ++k) xi_grid.push_back(0.1 * k);

    {
        const FourierPairReport report =
            verify_fourier_pair(KernelSpec{KernelKind::PoissonE, 0.5}, 1.0, xi_grid);
        rows.push_back({"fourier_pair", "E", 0.0, 1.0, report.max_abs_error, 1e-8});
    }
    for (const double alpha : {0.55, 0.7, 0.85}) {
        const FourierPairReport s_report =
            verify_fourier_pair(KernelSpec{KernelKind::SineS, alpha}, 1.0, xi_grid);
        rows.push_back({"fourier_pair", "S", alpha, 1.0, s_report.max_abs_error, 1e-4});
        const FourierPairReport c_report =
            verify_fourier_pair(KernelSpec{KernelKind::CosineC, alpha}, 1.0, xi_grid);
        rows.push_back({"fourier_pair", "C", alpha, 1.0, c_report.max_abs_error, 1e-4});
    }

    {
        RngStream draws(c.seed, 7001);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const double t = 0.1 + 1.9 * draws.next_unit();
            const double s = t * (0.05 + 0.9 * draws.next_unit());
            const double alpha = 0.55 + 0.4 * draws.next_unit();
            const double beta = 0.55 + 0.4 * draws.next_unit();
            const double xi = -20.0 + 40.0 * draws.next_unit();
            worst = std::max(worst,
                             std::abs(verify_decomposition_fourier(t, s, alpha, beta, xi)));
        }
        rows.push_back({"decomposition_fourier", "all", 0.0, 1000.0, worst, 1e-12});
    }

    {
        // Half-step-offset grid: the identity holds almost everywhere, so the
        // pointwise check must not sit exactly on the target's jump at
        // |u| = t - s, where symmetric quadrature lands on the jump midpoint.
        std::vector<double> u_grid;
        for (int k = 0; k < 60; ++k) u_grid.push_back(-1.475 + 0.05 * k);
        const DecompositionSpaceReport report =
            verify_decomposition_space(1.0, 0.2, 0.6, u_grid, 0.7, 0.7);
        rows.push_back({"decomposition_space", "all", 0.7, 0.6, report.max_abs_residual, 5e-2});
    }

    for (int k = 1; k <= 9; ++k) {
        const double theta = 0.1 * k;
        const BetaIdentityResult beta = beta_identity_check(theta, 0.25, 1.75);
        rows.push_back({"beta_identity", "all", 0.0, theta,
                        std::abs(beta.quadrature_value - beta.closed_form), 1e-6});
    }

    bool all_pass = true;
    run.write_file("kernels_report.csv", [&](std::ostream& os) {
        os << "check,kind,alpha,parameter,error,tolerance,pass\n";
        for (const KernelCheckRow& row : rows) {
            const bool pass = row.error <= row.tolerance;
            all_pass = all_pass && pass;
            os << row.check << ',' << row.kind << ',' << row.alpha << ',' << row.parameter
               << ',' << row.error << ',' << row.tolerance << ',' << (pass ? 1 : 0) << '\n';
        }
    });
    return all_pass;
}

void run_chaos(const ExperimentConfig& c, RunDirectory& run) {
    const ChaosConfig chaos = c.make_chaos_config();
    const ChaosEstimate base = i1_second_moment(chaos);
    ChaosEstimate increment;
    if (c.increment_h > 0.0) increment = dh_i1_second_moment(chaos, c.increment_h);
    std::vector<std::pair<double, double>> scan;
    if (!c.scan_eps.empty()) scan = i2_divergence_scan(chaos, c.scan_eps);

    run.write_file("chaos.csv", [&](std::ostream& os) {
        os << "quantity,parameter,value,truncation_error\n";
        os << "i1_second_moment," << chaos.t << ',' << base.value << ','
           << base.truncation_error << '\n';
        if (c.increment_h > 0.0)
            os << "increment_second_moment," << c.increment_h << ',' << increment.value << ','
               << increment.truncation_error << '\n';
        for (const auto& [eps, value] : scan)
            os << "divergence_scan," << eps << ',' << value << ",0\n";
    });
}

void run_params(const ExperimentConfig& c, RunDirectory& run) {
    const ParamSet point = feasible_point(c.hurst, c.params_p, c.params_eps);
    run.write_file("point.csv", [&](std::ostream& os) {
        os << "name,value\n";
        os << "hurst," << point.hurst << "\np," << point.p << "\nq," << point.q << "\nalpha,"
           << point.alpha << "\ntheta," << point.theta << "\ngamma," << point.gamma << '\n';
        for (int k = 0; k < 5; ++k) os << "eta" << (k + 1) << ',' << point.eta[k] << '\n';
        os << "beta," << point.beta << '\n';
    });
    run.write_file("systems.csv", [&](std::ostream& os) {
        os << "system,pass\n";
        for (const SystemId id : all_system_ids()) {
            const ConditionReport report = check_system(id, point);
            os << system_id_name(id) << ',' << (report.pass ? 1 : 0) << '\n';
        }
    });

    std::vector<double> h_grid, p_grid;
    for (std::size_t k = 0; k < c.scan_h_cells; ++k)
        h_grid.push_back(c.scan_h_lo + (c.scan_h_hi - c.scan_h_lo) * static_cast<double>(k) /
                                           static_cast<double>(std::max<std::size_t>(
                                               c.scan_h_cells - 1, 1)));
    for (std::size_t k = 0; k < c.scan_p_cells; ++k)
        p_grid.push_back(c.scan_p_lo + (c.scan_p_hi - c.scan_p_lo) * static_cast<double>(k) /
                                           static_cast<double>(std::max<std::size_t>(
                                               c.scan_p_cells - 1, 1)));
    const FeasibilityScan scan = feasibility_scan(h_grid, p_grid);
    run.write_file("feasibility_table.csv",
                   [&](std::ostream& os) { feasibility_table_csv(scan, os); });
    run.write_file("feasibility_boundary.csv",
                   [&](std::ostream& os) { feasibility_boundary_csv(scan, os); });
}

void run_covariance(const ExperimentConfig& c, RunDirectory& run) {
    GridSpec grid;
    grid.t_count = c.cov_rows;
    grid.x_count = c.cov_columns;
    grid.dt = 1.0;
    grid.dx = 1.0;
    const NoiseField field = sample_noise_field(grid, NoiseParams{c.hurst, c.seed});

    const std::vector<std::size_t> lags =
        c.cov_lags.empty() ? std::vector<std::size_t>{0, 1, 2, 4, 8} : c.cov_lags;
    run.write_file("covariance.csv", [&](std::ostream& os) {
        os << "lag,empirical,exact,standard_error,z\n";
        for (const std::size_t lag : lags) {
            // one mean per row; rows are independent, so the spread of the
            // row means gives the standard error
            double total = 0.0;
            double total_sq = 0.0;
            for (std::size_t i = 0; i < grid.t_count; ++i) {
                double row_acc = 0.0;
                for (std::size_t j = 0; j + lag < grid.x_count; ++j)
                    row_acc += field.at(i, j) * field.at(i, j + lag);
                const double row_mean = row_acc / static_cast<double>(grid.x_count - lag);
                total += row_mean;
                total_sq += row_mean * row_mean;
            }
            const double n = static_cast<double>(grid.t_count);
            const double mean = total / n;
            const double var = std::max(0.0, total_sq / n - mean * mean);
            const double se = std::sqrt(var / n);
            const double exact = grid.dt * fgn_covariance(static_cast<long>(lag), c.hurst,
                                                          grid.dx);
            const double z = se > 0.0 ? (mean - exact) / se : 0.0;
            os << lag << ',' << mean << ',' << exact << ',' << se << ',' << z << '\n';
        }
    });
}

void write_manifest(const ExperimentConfig& c, RunDirectory& run) {
    nlohmann::ordered_json manifest;
    manifest["command"] = c.command;
    manifest["seed"] = c.seed;
    nlohmann::ordered_json echo;
    for (const auto& [key, value] : config_pairs(c)) echo[key] = value;
    manifest["config"] = echo;
    nlohmann::ordered_json outputs;
    for (const std::string& name : run.written)
        outputs[name] = git_blob_hash((run.dir / name).string());
    manifest["outputs"] = outputs;
    run.write_file("manifest.json", [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
}

} // namespace

std::string git_blob_hash(const std::string& path) {
    const std::string bytes = slurp_file(path);
    Sha1 sha;
    const std::string header = "blob " + std::to_string(bytes.size());
    sha.update(header.c_str(), header.size() + 1); // trailing NUL included
    sha.update(bytes.data(), bytes.size());
    return sha.hex_digest();
}

RunResult run_experiment(const ExperimentConfig& config) {
    RunDirectory run(config.out_dir);
    RunResult result;
    bool checks_passed = true;
    try {
        if (config.command == "simulate") {
            run_simulate(config, run);
        } else if (config.command == "holder") {
            run_holder(config, run);
        } else if (config.command == "kernels-verify") {
            checks_passed = run_kernels_verify(config, run);
        } else if (config.command == "chaos") {
            run_chaos(config, run);
        } else if (config.command == "params") {
            run_params(config, run);
        } else if (config.command == "covariance") {
            run_covariance(config, run);
        } else {
            throw std::invalid_argument("run_experiment: unknown command '" + config.command +
                                        "'");
        }
        write_manifest(config, run);
    } catch (const std::exception& e) {
        run.discard_outputs(e.what());
        throw;
    }
    if (!checks_passed) {
        run.mark_failed("kernels-verify: at least one check exceeded its tolerance");
        result.exit_code = 1;
    }
    result.outputs = run.written;
    result.manifest_path = (run.dir / "manifest.json").string();
    return result;
}

} // namespace rwave

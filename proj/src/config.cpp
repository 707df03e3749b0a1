#include "rwave/config.hpp"

#include "rwave/params.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rwave {

namespace {

const std::set<std::string>& known_commands() {
    static const std::set<std::string> cmds = {"simulate",  "holder", "kernels-verify",
                                               "chaos",     "params", "covariance"};
    return cmds;
}

const std::set<std::string>& known_sections() {
    static const std::set<std::string> secs = {"grid",   "noise",  "sigma",
                                               "run",    "norms",  "holder",
                                               "chaos",  "params", "covariance"};
    return secs;
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_double_value(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return false;
    if (!std::isfinite(v)) return false;
    out = v;
    return true;
}

bool parse_u64_value(const std::string& s, std::uint64_t& out) {
    if (s.empty() || s[0] == '-') return false;
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size()) return false;
    out = v;
    return true;
}

bool parse_size_value(const std::string& s, std::size_t& out) {
    std::uint64_t v = 0;
    if (!parse_u64_value(s, v)) return false;
    out = static_cast<std::size_t>(v);
    return true;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::string cur;
    std::stringstream in(s);
    while (std::getline(in, cur, ',')) items.push_back(trim(cur));
    return items;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Whole number of steps between two bounds; -1 when the span does not land
// on the grid.
long whole_steps(double span, double step) {
    if (!(step > 0.0)) return -1;
    const double raw = span / step;
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) > 1e-6 * std::max(1.0, std::abs(raw))) return -1;
    return static_cast<long>(rounded);
}

struct KeyTable {
    // setter returns false on a malformed value
    std::map<std::string, std::function<bool(ExperimentConfig&, const std::string&)>> set;

    KeyTable() {
        auto dbl = [this](const std::string& key, double ExperimentConfig::*field) {
            set[key] = [field](ExperimentConfig& c, const std::string& v) {
                return parse_double_value(v, c.*field);
            };
        };
        auto sz = [this](const std::string& key, std::size_t ExperimentConfig::*field) {
            set[key] = [field](ExperimentConfig& c, const std::string& v) {
                return parse_size_value(v, c.*field);
            };
        };
        auto str = [this](const std::string& key, std::string ExperimentConfig::*field) {
            set[key] = [field](ExperimentConfig& c, const std::string& v) {
                c.*field = v;
                return !v.empty();
            };
        };

        str("command", &ExperimentConfig::command);
        dbl("t_end", &ExperimentConfig::t_end);
        dbl("x0", &ExperimentConfig::x0);
        dbl("x1", &ExperimentConfig::x1);
        dbl("dx", &ExperimentConfig::dx);
        dbl("dt", &ExperimentConfig::dt);
        dbl("H", &ExperimentConfig::hurst);
        set["seed"] = [](ExperimentConfig& c, const std::string& v) {
            return parse_u64_value(v, c.seed);
        };
        dbl("eps", &ExperimentConfig::mollify_eps);
        str("sigma", &ExperimentConfig::sigma_kind);
        dbl("sigma_amplitude", &ExperimentConfig::sigma_amplitude);
        str("initial", &ExperimentConfig::initial_kind);
        dbl("initial_constant", &ExperimentConfig::initial_constant);
        sz("realizations", &ExperimentConfig::realizations);
        sz("max_iterations", &ExperimentConfig::max_iterations);
        dbl("tolerance", &ExperimentConfig::tolerance);
        str("out_dir", &ExperimentConfig::out_dir);
        dbl("p", &ExperimentConfig::norm_p);
        dbl("h_min", &ExperimentConfig::h_min);
        dbl("h_max", &ExperimentConfig::h_max);
        sz("lag_count", &ExperimentConfig::lag_count);
        dbl("lag_lo", &ExperimentConfig::holder_lag_lo);
        dbl("lag_hi", &ExperimentConfig::holder_lag_hi);
        dbl("chaos_t", &ExperimentConfig::chaos_t);
        dbl("chaos_x", &ExperimentConfig::chaos_x);
        dbl("xi_cutoff", &ExperimentConfig::xi_cutoff);
        sz("xi_nodes", &ExperimentConfig::xi_nodes);
        dbl("increment_h", &ExperimentConfig::increment_h);
        set["scan_eps"] = [](ExperimentConfig& c, const std::string& v) {
            c.scan_eps.clear();
            for (const std::string& item : split_list(v)) {
                double e = 0.0;
                if (!parse_double_value(item, e)) return false;
                c.scan_eps.push_back(e);
            }
            return !c.scan_eps.empty();
        };
        dbl("params_p", &ExperimentConfig::params_p);
        dbl("params_eps", &ExperimentConfig::params_eps);
        dbl("scan_h_lo", &ExperimentConfig::scan_h_lo);
        dbl("scan_h_hi", &ExperimentConfig::scan_h_hi);
        dbl("scan_p_lo", &ExperimentConfig::scan_p_lo);
        dbl("scan_p_hi", &ExperimentConfig::scan_p_hi);
        sz("scan_h_cells", &ExperimentConfig::scan_h_cells);
        sz("scan_p_cells", &ExperimentConfig::scan_p_cells);
        sz("cov_rows", &ExperimentConfig::cov_rows);
        sz("cov_columns", &ExperimentConfig::cov_columns);
        set["cov_lags"] = [](ExperimentConfig& c, const std::string& v) {
            c.cov_lags.clear();
            for (const std::string& item : split_list(v)) {
                std::size_t lag = 0;
                if (!parse_size_value(item, lag)) return false;
                c.cov_lags.push_back(lag);
            }
            return !c.cov_lags.empty();
        };
    }
};

const KeyTable& key_table() {
    static const KeyTable table;
    return table;
}

void validate_semantics(const ExperimentConfig& c, std::vector<std::string>& errors,
                        std::vector<std::string>& warnings) {
    auto fail = [&errors](const std::string& msg) { errors.push_back(msg); };

    if (c.command.empty()) {
        fail("no command given (pass a subcommand or set 'command' in the config)");
    } else if (known_commands().count(c.command) == 0) {
        fail("unknown command '" + c.command +
             "' (expected simulate, holder, kernels-verify, chaos, params, or covariance)");
    }

    if (!(c.hurst > 0.0) || c.hurst > 0.5) fail("H outside (0, 1/2]");
    if (!(c.dx > 0.0)) fail("dx must be positive");
    if (c.dt < 0.0) fail("dt must be positive");
    if (!(c.t_end > 0.0)) fail("t_end must be positive");
    if (!(c.x1 > c.x0)) fail("x1 must exceed x0");
    if (c.dx > 0.0 && c.t_end > 0.0) {
        if (whole_steps(c.t_end, c.resolved_dt()) < 1)
            fail("t_end must be a whole (positive) number of time steps");
        if (c.x1 > c.x0 && whole_steps(c.x1 - c.x0, c.dx) < 1)
            fail("x1 - x0 must be a whole (positive) number of space steps");
    }
    if (c.mollify_eps < 0.0) fail("eps must be positive");
    if (c.sigma_kind != "zero" && c.sigma_kind != "linear" && c.sigma_kind != "scaled_sine")
        fail("sigma must be one of zero, linear, scaled_sine");
    if (c.initial_kind != "zero" && c.initial_kind != "gaussian" && c.initial_kind != "constant")
        fail("initial must be one of zero, gaussian, constant");
    if (c.realizations < 1) fail("realizations must be >= 1");
    if (c.max_iterations < 1) fail("max_iterations must be >= 1");
    if (!(c.tolerance > 0.0)) fail("tolerance must be positive");
    if (c.out_dir.empty()) fail("out_dir must be non-empty");
    if (!(c.norm_p >= 2.0)) fail("p must be >= 2");
    if (c.h_min < 0.0) fail("h_min must be nonnegative");
    if (c.h_max < 0.0) fail("h_max must be nonnegative");
    if (c.h_min > 0.0 && c.h_max > 0.0 && !(c.h_max > c.h_min)) fail("h_max must exceed h_min");
    if (c.holder_lag_lo < 0.0 || c.holder_lag_hi < 0.0) fail("lag bounds must be nonnegative");
    if (c.holder_lag_lo > 0.0 && c.holder_lag_hi > 0.0 && !(c.holder_lag_hi > c.holder_lag_lo))
        fail("lag_hi must exceed lag_lo");
    if (!(c.chaos_t > 0.0)) fail("chaos_t must be positive");
    if (!(c.xi_cutoff > 0.0)) fail("xi_cutoff must be positive");
    if (c.xi_nodes < 256) fail("xi_nodes must be >= 256");
    if (c.increment_h < 0.0) fail("increment_h must be nonnegative");
    for (const double e : c.scan_eps)
        if (!(e > 0.0) || !(e < 1.0)) {
            fail("scan_eps values must lie in (0, 1)");
            break;
        }
    if (!(c.params_p > 1.0)) fail("params_p must exceed 1");
    if (!(c.params_eps > 0.0)) fail("params_eps must be positive");
    if (c.cov_columns < 2) fail("cov_columns must be >= 2");
    if (c.cov_rows < 100) fail("cov_rows must be >= 100");
    for (const std::size_t lag : c.cov_lags)
        if (lag + 1 >= c.cov_columns) {
            fail("cov_lags must stay below cov_columns - 1");
            break;
        }

    if (c.command == "simulate" || c.command == "holder") {
        if (!(c.hurst > 0.25) || !(c.hurst < 0.5))
            fail("the fixed-point solver requires H in (1/4, 1/2)");
        if (c.hurst > 0.25 && c.hurst < 0.5) {
            const double threshold = feasibility_threshold(c.hurst);
            if (c.norm_p <= threshold)
                warnings.push_back("p = " + format_double(c.norm_p) +
                                   " is at or below the moment threshold 2/(4H-1) = " +
                                   format_double(threshold) +
                                   "; the regularity guarantee lapses, run proceeds");
        }
    }
    if (c.command == "chaos" && !c.scan_eps.empty()) {
        if (std::abs(c.chaos_t - 2.0) > 1e-12)
            fail("the divergence scan requires chaos_t = 2");
        for (std::size_t k = 1; k < c.scan_eps.size(); ++k)
            if (!(c.scan_eps[k] < c.scan_eps[k - 1])) {
                fail("scan_eps values must be strictly decreasing");
                break;
            }
    }
    if (c.increment_h > 0.0 && !(c.increment_h < std::min(1.0, 0.5 * c.chaos_t)))
        fail("increment_h must stay below min(1, chaos_t / 2)");
}

} // namespace

GridSpec ExperimentConfig::make_grid() const {
    GridSpec grid;
    grid.dt = resolved_dt();
    grid.dx = dx;
    grid.t0 = 0.0;
    grid.x0 = x0;
    grid.t_count = static_cast<std::size_t>(whole_steps(t_end, grid.dt)) + 1;
    grid.x_count = static_cast<std::size_t>(whole_steps(x1 - x0, dx)) + 1;
    grid.validate();
    return grid;
}

NormConfig ExperimentConfig::make_norm_config() const {
    NormConfig norm;
    norm.p = norm_p;
    norm.hurst = hurst;
    norm.h_min = h_min;
    norm.h_max = h_max;
    norm.lag_count = lag_count;
    return norm;
}

ChaosConfig ExperimentConfig::make_chaos_config() const {
    ChaosConfig chaos;
    chaos.hurst = hurst;
    chaos.t = chaos_t;
    chaos.x = chaos_x;
    chaos.xi_cutoff = xi_cutoff;
    chaos.xi_nodes = xi_nodes;
    chaos.h_cutoff_inner = scan_eps.empty() ? 0.5 : scan_eps.front();
    return chaos;
}

ParseOutcome parse_config(const std::string& text, const std::string& command_override) {
    ParseOutcome out;
    std::set<std::string> seen;
    std::string file_command;

    std::stringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";

        if (line.front() == '[') {
            if (line.back() != ']') {
                out.errors.push_back(where + "unterminated section header");
                continue;
            }
            const std::string section = trim(line.substr(1, line.size() - 2));
            if (known_sections().count(section) == 0)
                out.errors.push_back(where + "unknown section '[" + section + "]'");
            continue; // sections are grouping markers only
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            out.errors.push_back(where + "expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            out.errors.push_back(where + "empty key");
            continue;
        }
        const auto entry = key_table().set.find(key);
        if (entry == key_table().set.end()) {
            out.errors.push_back(where + "unknown key '" + key + "'");
            continue;
        }
        if (!seen.insert(key).second) {
            out.errors.push_back(where + "duplicate key '" + key + "'");
            continue;
        }
        if (!entry->second(out.config, value)) {
            out.errors.push_back(where + "invalid value '" + value + "' for key '" + key + "'");
            continue;
        }
        if (key == "command") file_command = out.config.command;
        // explicit keys for defaulted quantities must carry usable values
        if (key == "dt" && !(out.config.dt > 0.0))
            out.errors.push_back(where + "dt must be positive");
        if (key == "eps" && !(out.config.mollify_eps > 0.0))
            out.errors.push_back(where + "eps must be positive");
    }

    if (!command_override.empty()) {
        if (!file_command.empty() && file_command != command_override)
            out.errors.push_back("command '" + file_command +
                                 "' in the config conflicts with the requested command '" +
                                 command_override + "'");
        out.config.command = command_override;
    }

    validate_semantics(out.config, out.errors, out.warnings);
    return out;
}

ParseOutcome parse_config_file(const std::string& path, const std::string& command_override) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ParseOutcome out;
        out.errors.push_back("cannot read config file '" + path + "'");
        return out;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), command_override);
}

std::vector<std::pair<std::string, std::string>> config_pairs(const ExperimentConfig& c) {
    std::vector<std::pair<std::string, std::string>> kv;
    auto add = [&kv](const std::string& key, const std::string& value) {
        kv.emplace_back(key, value);
    };
    auto add_d = [&add](const std::string& key, double v) { add(key, format_double(v)); };
    auto add_z = [&add](const std::string& key, std::size_t v) { add(key, std::to_string(v)); };

    add("command", c.command);
    add_d("t_end", c.t_end);
    add_d("x0", c.x0);
    add_d("x1", c.x1);
    add_d("dx", c.dx);
    add_d("dt", c.resolved_dt());
    add_d("H", c.hurst);
    add("seed", std::to_string(c.seed));
    add_d("eps", c.resolved_eps());
    add("sigma", c.sigma_kind);
    add_d("sigma_amplitude", c.sigma_amplitude);
    add("initial", c.initial_kind);
    add_d("initial_constant", c.initial_constant);
    add_z("realizations", c.realizations);
    add_z("max_iterations", c.max_iterations);
    add_d("tolerance", c.tolerance);
    add("out_dir", c.out_dir);
    add_d("p", c.norm_p);
    add_d("h_min", c.h_min);
    add_d("h_max", c.h_max);
    add_z("lag_count", c.lag_count);
    add_d("lag_lo", c.holder_lag_lo);
    add_d("lag_hi", c.holder_lag_hi);
    add_d("chaos_t", c.chaos_t);
    add_d("chaos_x", c.chaos_x);
    add_d("xi_cutoff", c.xi_cutoff);
    add_z("xi_nodes", c.xi_nodes);
    add_d("increment_h", c.increment_h);
    if (!c.scan_eps.empty()) {
        std::string joined;
        for (std::size_t k = 0; k < c.scan_eps.size(); ++k)
            joined += (k ? "," : "") + format_double(c.scan_eps[k]);
        add("scan_eps", joined);
    }
    add_d("params_p", c.params_p);
    add_d("params_eps", c.params_eps);
    add_d("scan_h_lo", c.scan_h_lo);
    add_d("scan_h_hi", c.scan_h_hi);
    add_d("scan_p_lo", c.scan_p_lo);
    add_d("scan_p_hi", c.scan_p_hi);
    add_z("scan_h_cells", c.scan_h_cells);
    add_z("scan_p_cells", c.scan_p_cells);
    add_z("cov_rows", c.cov_rows);
    add_z("cov_columns", c.cov_columns);
    {
        const std::vector<std::size_t>& lags =
            c.cov_lags.empty() ? std::vector<std::size_t>{0, 1, 2, 4, 8} : c.cov_lags;
        std::string joined;
        for (std::size_t k = 0; k < lags.size(); ++k)
            joined += (k ? "," : "") + std::to_string(lags[k]);
        add("cov_lags", joined);
    }
    return kv;
}

std::string config_echo(const ExperimentConfig& config) {
    std::string text;
    for (const auto& [key, value] : config_pairs(config)) text += key + " = " + value + "\n";
    return text;
}

} // namespace rwave

#include "rwave/norms.hpp"

#include "rwave/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rwave {

namespace {

void check_common_grid(const std::vector<FieldView>& ensemble, const char* who) {
    if (ensemble.empty())
        throw std::invalid_argument(std::string(who) + ": empty ensemble");
    const GridSpec& grid = ensemble.front().grid;
    for (const auto& view : ensemble)
        if (!(view.grid == grid))
            throw std::invalid_argument(std::string(who) + ": mixed grids in ensemble");
}

std::size_t locate_index(double value, double origin, double step, std::size_t count,
                         const char* what) {
    const double offset = (value - origin) / step;
    const auto idx = static_cast<long>(std::llround(offset));
    if (idx < 0 || idx >= static_cast<long>(count) || std::abs(offset - idx) > 1e-6)
        throw std::invalid_argument(std::string("norms: ") + what + " is not a grid node");
    return static_cast<std::size_t>(idx);
}

double abs_power(double d, double p) {
    const double a = std::abs(d);
    return p == 2.0 ? a * a : std::pow(a, p);
}

// Geometric lags snapped to whole cells of width `step`, ascending, distinct.
std::vector<long> geometric_lag_cells(double h_min, double h_max, std::size_t count,
                                      double step) {
    if (h_min < step * (1.0 - 1e-9))
        throw std::invalid_argument("norms: smallest lag is below the grid spacing");
    if (!(h_max > h_min * (1.0 + 1e-12)))
        throw std::invalid_argument("norms: lag range is empty");
    if (count < 2)
        count = static_cast<std::size_t>(std::ceil(8.0 * std::log2(h_max / h_min)));
    if (count < 2) count = 2;

    const long m_min = std::max(1L, static_cast<long>(std::llround(h_min / step)));
    const long m_max = std::max(m_min, static_cast<long>(std::llround(h_max / step)));
    std::vector<long> cells;
    cells.reserve(count);
    const double ratio = h_max / h_min;
    for (std::size_t k = 0; k < count; ++k) {
        const double h = h_min * std::pow(ratio, static_cast<double>(k) / (count - 1));
        const long m = std::clamp(static_cast<long>(std::llround(h / step)), m_min, m_max);
        cells.push_back(m);
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

std::vector<long> config_lag_cells(const NormConfig& config, const GridSpec& grid) {
    const double h_min = config.h_min > 0.0 ? config.h_min : grid.dx;
    const double h_max = config.h_max > 0.0 ? config.h_max : 0.25 * grid.x_extent();
    return geometric_lag_cells(h_min, h_max, config.lag_count, grid.dx);
}

// Trapezoid weights for the lag integral over the snapped physical lags.
std::vector<double> lag_trapezoid_widths(const std::vector<long>& cells, double step) {
    const std::size_t n = cells.size();
    std::vector<double> dh(n, step);
    if (n < 2) return dh;
    dh.front() = 0.5 * (cells[1] - cells[0]) * step;
    dh.back() = 0.5 * (cells[n - 1] - cells[n - 2]) * step;
    for (std::size_t k = 1; k + 1 < n; ++k) dh[k] = 0.5 * (cells[k + 1] - cells[k - 1]) * step;
    return dh;
}

// Integral over the whole line of |u(t, . + h) - u(t, .)|^p with u extended by
// zero off the grid, lag h = m dx, m >= 1. Base points left of the grid whose
// shift lands on it contribute |u|^p; everything else vanishes.
double shifted_increment_power_sum(const FieldView& u, std::size_t i, long m, double p) {
    const auto n = static_cast<long>(u.grid.x_count);
    double acc = 0.0;
    for (long j = 0; j < n; ++j) {
        const double up = (j + m < n) ? u.at(i, static_cast<std::size_t>(j + m)) : 0.0;
        acc += abs_power(up - u.at(i, static_cast<std::size_t>(j)), p);
    }
    const long cut = std::min(m, n);
    for (long j = 0; j < cut; ++j) acc += abs_power(u.at(i, static_cast<std::size_t>(j)), p);
    return acc * u.grid.dx;
}

struct ZNormProfile {
    std::vector<double> z1;
    std::vector<double> z2;
};

ZNormProfile z_norm_profile(const std::vector<FieldView>& ensemble, const NormConfig& config) {
    check_common_grid(ensemble, "z_norm_estimate");
    config.validate();
    const GridSpec& grid = ensemble.front().grid;

    for (std::size_t r = 0; r < ensemble.size(); ++r)
        for (std::size_t k = 0; k < grid.size(); ++k)
            if (!std::isfinite(ensemble[r].data[k]))
                throw std::runtime_error("z_norm_estimate: realization " + std::to_string(r) +
                                         " contains a non-finite value");

    const auto cells = config_lag_cells(config, grid);
    const auto dh = lag_trapezoid_widths(cells, grid.dx);
    const double p = config.p;
    const double weight_expo = -1.0 - 2.0 * config.beta();
    const double inv_m = 1.0 / static_cast<double>(ensemble.size());

    ZNormProfile profile;
    profile.z1.resize(grid.t_count);
    profile.z2.resize(grid.t_count);
    for (std::size_t i = 0; i < grid.t_count; ++i) {
        double moment = 0.0;
        for (const auto& view : ensemble) {
            double row = 0.0;
            for (std::size_t j = 0; j < grid.x_count; ++j) row += abs_power(view.at(i, j), p);
            row -= 0.5 * (abs_power(view.at(i, 0), p) + abs_power(view.at(i, grid.x_count - 1), p));
            moment += row * grid.dx;
        }
        profile.z1[i] = std::pow(moment * inv_m, 1.0 / p);

        double acc = 0.0;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            double lag_moment = 0.0;
            for (const auto& view : ensemble)
                lag_moment += shifted_increment_power_sum(view, i, cells[k], p);
            lag_moment *= inv_m;
            const double h = cells[k] * grid.dx;
            // the negative-lag integral equals the positive one exactly, hence the 2
            acc += 2.0 * std::pow(lag_moment, 2.0 / p) * std::pow(h, weight_expo) * dh[k];
        }
        profile.z2[i] = std::sqrt(acc);
    }
    return profile;
}

} // namespace

void NormConfig::validate() const {
    if (!(p >= 2.0)) throw std::invalid_argument("NormConfig: p must be >= 2");
    if (!(hurst > 0.0) || !(hurst < 0.5))
        throw std::invalid_argument("NormConfig: hurst must lie in (0, 1/2)");
    if (h_min < 0.0 || h_max < 0.0)
        throw std::invalid_argument("NormConfig: lag bounds must be nonnegative");
    if (h_min > 0.0 && h_max > 0.0 && !(h_max > h_min))
        throw std::invalid_argument("NormConfig: h_max must exceed h_min");
}

double n_beta_p_estimate(const std::vector<FieldView>& ensemble, const NormConfig& config,
                         double t, double x) {
    check_common_grid(ensemble, "n_beta_p_estimate");
    config.validate();
    if (ensemble.size() < 100)
        throw std::invalid_argument("n_beta_p_estimate: ensemble size must be >= 100");
    const GridSpec& grid = ensemble.front().grid;
    const std::size_t ti = locate_index(t, grid.t0, grid.dt, grid.t_count, "t");
    const auto xi = static_cast<long>(locate_index(x, grid.x0, grid.dx, grid.x_count, "x"));

    const auto cells = config_lag_cells(config, grid);
    const auto dh = lag_trapezoid_widths(cells, grid.dx);
    const double p = config.p;
    const double weight_expo = -1.0 - 2.0 * config.beta();
    const double inv_m = 1.0 / static_cast<double>(ensemble.size());
    const auto n = static_cast<long>(grid.x_count);

    double acc = 0.0;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const double h = cells[k] * grid.dx;
        for (const long s : {cells[k], -cells[k]}) {
            const long shifted = xi + s;
            double moment = 0.0;
            for (const auto& view : ensemble) {
                const double base = view.at(ti, static_cast<std::size_t>(xi));
                const double up = (shifted >= 0 && shifted < n)
                                      ? view.at(ti, static_cast<std::size_t>(shifted))
                                      : 0.0;
                moment += abs_power(up - base, p);
            }
            acc += std::pow(moment * inv_m, 2.0 / p) * std::pow(h, weight_expo) * dh[k];
        }
    }
    return std::sqrt(acc);
}

ZNormEstimate z_norm_estimate(const std::vector<FieldView>& ensemble, const NormConfig& config) {
    const ZNormProfile profile = z_norm_profile(ensemble, config);
    ZNormEstimate out;
    out.z1 = *std::max_element(profile.z1.begin(), profile.z1.end());
    out.z2 = *std::max_element(profile.z2.begin(), profile.z2.end());
    out.z = out.z1 + out.z2;
    return out;
}

HolderFit holder_exponent(const std::vector<FieldView>& ensemble, Axis axis, double p,
                          double lag_lo, double lag_hi) {
    check_common_grid(ensemble, "holder_exponent");
    if (ensemble.size() < 500)
        throw std::invalid_argument("holder_exponent: ensemble size must be >= 500");
    if (!(p > 0.0)) throw std::invalid_argument("holder_exponent: p must be positive");
    const GridSpec& grid = ensemble.front().grid;
    const double step = axis == Axis::Time ? grid.dt : grid.dx;
    const std::size_t extent = axis == Axis::Time ? grid.t_count : grid.x_count;

    const auto cells = geometric_lag_cells(lag_lo, lag_hi, 0, step);
    if (cells.size() < 4)
        throw std::invalid_argument("holder_exponent: fewer than 4 distinct lags in range");
    const long margin = cells.back();
    if (margin >= static_cast<long>(extent))
        throw std::invalid_argument("holder_exponent: largest lag exceeds the grid");

    std::vector<double> log_lag(cells.size()), log_moment(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const long m = cells[k];
        double acc = 0.0;
        std::size_t terms = 0;
        for (const auto& view : ensemble) {
            if (axis == Axis::Time) {
                for (std::size_t i = 0; i + margin < grid.t_count; ++i)
                    for (std::size_t j = 0; j < grid.x_count; ++j)
                        acc += abs_power(view.at(i + m, j) - view.at(i, j), p);
                terms += (grid.t_count - margin) * grid.x_count;
            } else {
                for (std::size_t i = 0; i < grid.t_count; ++i)
                    for (std::size_t j = 0; j + margin < grid.x_count; ++j)
                        acc += abs_power(view.at(i, j + m) - view.at(i, j), p);
                terms += grid.t_count * (grid.x_count - margin);
            }
        }
        const double mean = acc / static_cast<double>(terms);
        if (!(mean > 0.0))
            throw std::runtime_error("holder_exponent: degenerate regression (zero increments)");
        log_lag[k] = std::log(m * step);
        log_moment[k] = std::log(mean) / p;
    }

    const auto n = static_cast<double>(cells.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        mean_x += log_lag[k];
        mean_y += log_moment[k];
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        sxx += (log_lag[k] - mean_x) * (log_lag[k] - mean_x);
        sxy += (log_lag[k] - mean_x) * (log_moment[k] - mean_y);
    }
    HolderFit fit;
    fit.slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const double resid = log_moment[k] - mean_y - fit.slope * (log_lag[k] - mean_x);
        rss += resid * resid;
    }
    fit.std_error = std::sqrt(rss / (n - 2.0) / sxx);
    return fit;
}

double fbm_normalization_squared(double hurst) {
    if (!(hurst > 0.0) || !(hurst < 0.5))
        throw std::invalid_argument("fbm_normalization_squared: hurst must lie in (0, 1/2)");
    const double a = hurst - 0.5;

    // head [0, delta] from the binomial expansion of the square
    const double delta = 1e-8;
    double integral = std::pow(delta, 2.0 * hurst) / (2.0 * hurst) -
                      2.0 * (std::pow(delta, hurst + 0.5) / (hurst + 0.5) +
                             a * std::pow(delta, hurst + 1.5) / (hurst + 1.5)) +
                      delta;

    const auto integrand = [a](double t) {
        const double d = std::pow(1.0 + t, a) - std::pow(t, a);
        return d * d;
    };
    const double t_max = std::pow(2.0, 20);
    double lo = delta;
    while (lo < t_max) {
        const double hi = std::min(lo * 2.0, t_max);
        integral += integrate_mapped(gauss_legendre(16), lo, hi, integrand);
        lo = hi;
    }

    // tail: integrand ~ a^2 t^{2H-3} (1 + (a-1)/t + ...)
    integral += a * a * std::pow(t_max, 2.0 * hurst - 2.0) / (2.0 - 2.0 * hurst) +
                a * a * (a - 1.0) * std::pow(t_max, 2.0 * hurst - 3.0) / (3.0 - 2.0 * hurst);

    const double gamma_half = std::tgamma(hurst + 0.5);
    return hurst * (0.5 - hurst) / (gamma_half * gamma_half) * (integral + 0.5 / hurst);
}

void norm_report_csv(const std::vector<FieldView>& ensemble, const NormConfig& config,
                     std::ostream& os) {
    const ZNormProfile profile = z_norm_profile(ensemble, config);
    const GridSpec& grid = ensemble.front().grid;
    os << "t,z1,z2\n" << std::setprecision(17);
    for (std::size_t i = 0; i < grid.t_count; ++i)
        os << grid.t(i) << ',' << profile.z1[i] << ',' << profile.z2[i] << '\n';
}

} // namespace rwave

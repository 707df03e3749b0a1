#include "rwave/chaos.hpp"

#include "rwave/quadrature.hpp"
#include "rwave/special.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace rwave {

namespace {

constexpr double kPi = 3.14159265358979323846;

double gaussian_i0(double s, double y) {
    const double a = y + s;
    const double b = y - s;
    return 0.5 * (std::exp(-a * a) + std::exp(-b * b));
}

// Transform of the cone-windowed first-chaos integrand at time layer s:
// quarter of two windowed Gaussian transforms centered at -s and s.
std::complex<double> window_transform(double t, double x, double s, double xi) {
    const double a = x - (t - s);
    const double b = x + (t - s);
    return 0.25 * (gaussian_window_fourier(a, b, -s, xi) + gaussian_window_fourier(a, b, s, xi));
}

// Lambda(xi): integral over s in [0, t] of the squared transform modulus.
double squared_transform_time_integral(double t, double x, double xi, std::size_t n_nodes) {
    const QuadRule& rule = gauss_legendre(n_nodes);
    const double half = 0.5 * t;
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double s = half * (1.0 + rule.nodes[k]);
        acc += rule.weights[k] * std::norm(window_transform(t, x, s, xi));
    }
    return acc * half;
}

// Amplitude of the large-xi decay Lambda ~ A1 / xi^2, from the window's
// endpoint values (the oscillatory cross term averages out over s).
double window_decay_amplitude(double t, double x, std::size_t n_nodes) {
    const QuadRule& rule = gauss_legendre(n_nodes);
    const double half = 0.5 * t;
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double s = half * (1.0 + rule.nodes[k]);
        const double la = gaussian_i0(s, x - (t - s));
        const double lb = gaussian_i0(s, x + (t - s));
        acc += rule.weights[k] * (la * la + lb * lb);
    }
    return 0.25 * acc * half;
}

struct SpectralNodes {
    std::vector<double> xi;
    std::vector<double> weight; // fold over negative xi and |xi|^{1-2H} included
    double split = 0.0;
};

// Exact-quadrature nodes on (0, split]: power-weighted Gauss-Jacobi near the
// spectral singularity, then Gauss-Legendre panels sized for the transform's
// oscillation scale (and for the configured node floor).
SpectralNodes spectral_nodes(const ChaosConfig& config, double split_cap) {
    SpectralNodes out;
    out.split = std::min(config.xi_cutoff, split_cap);
    const double expo = 1.0 - 2.0 * config.hurst;

    const double gj_hi = std::min(1.0, out.split);
    {
        const QuadRule rule = gauss_jacobi(32, 0.0, expo);
        const double half = 0.5 * gj_hi;
        const double scale = 2.0 * std::pow(half, expo + 1.0);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            out.xi.push_back(half * (1.0 + rule.nodes[k]));
            out.weight.push_back(rule.weights[k] * scale);
        }
    }

    if (out.split > 1.0) {
        const double span = out.split - 1.0;
        const std::size_t floor_nodes = std::max<std::size_t>(config.xi_nodes, 256) - 32;
        double width = std::min(kPi / (2.0 * std::max(config.t, 1.0)),
                                span * 12.0 / static_cast<double>(floor_nodes));
        const auto n_panels = static_cast<std::size_t>(std::ceil(span / width));
        const QuadRule& rule = gauss_legendre(12);
        for (std::size_t p = 0; p < n_panels; ++p) {
            const double lo = 1.0 + span * static_cast<double>(p) / n_panels;
            const double hi = 1.0 + span * static_cast<double>(p + 1) / n_panels;
            const double mid = 0.5 * (lo + hi);
            const double half = 0.5 * (hi - lo);
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                const double xi = mid + half * rule.nodes[k];
                out.xi.push_back(xi);
                out.weight.push_back(2.0 * rule.weights[k] * half * std::pow(xi, expo));
            }
        }
    }
    return out;
}

// Theta(v) = integral over [v, infinity) of (1 - cos u) u^{-1-2H} du.
double theta_tail(double v, double hurst) {
    const double expo = -1.0 - 2.0 * hurst;
    const auto theta_zero = [hurst] {
        return std::tgamma(1.0 - 2.0 * hurst) * std::cos(kPi * hurst) / (2.0 * hurst);
    };
    if (v <= 0.0) return theta_zero();
    if (v < 0.5 && hurst < 0.49) {
        // head by the cosine series; the integrand's branch point sits at 0
        double head = 0.0;
        double sign = 1.0;
        double factorial = 2.0;
        for (int k = 1; k <= 4; ++k) {
            const double power = 2.0 * k - 2.0 * hurst;
            head += sign * std::pow(v, power) / (factorial * power);
            sign = -sign;
            factorial *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
        }
        return theta_zero() - head;
    }
    const auto one_minus_cos = [expo](double u) {
        return (1.0 - std::cos(u)) * std::pow(u, expo);
    };
    const auto cos_part = [expo](double u) { return std::cos(u) * std::pow(u, expo); };

    const double m = std::ceil(std::max(v, 2.0 * kPi) / kPi - 0.5);
    const double z = (m + 0.5) * kPi; // zero of cos at or past max(v, 2 pi)
    double acc = integrate_panels(one_minus_cos, v, z, 0.5 * kPi);
    acc += std::pow(z, -2.0 * hurst) / (2.0 * hurst);
    acc -= oscillatory_tail(cos_part, z, kPi);
    return acc;
}

// 4 * integral over [eps, 1] of (1 - cos(h xi)) h^{2H-2} dh: geometric panels
// near the inner cutoff, capped by the oscillation half-period.
double increment_weight_integral(double xi, double eps, double hurst) {
    const double expo = 2.0 * hurst - 2.0;
    const double cap = 0.5 * kPi / std::max(xi, 1.0);
    const QuadRule& rule = gauss_legendre(8);
    double acc = 0.0;
    double lo = eps;
    while (lo < 1.0) {
        const double hi = std::min({1.0, 2.0 * lo, lo + cap});
        acc += integrate_mapped(rule, lo, hi, [xi, expo](double h) {
            return (1.0 - std::cos(h * xi)) * std::pow(h, expo);
        });
        lo = hi;
    }
    return 4.0 * acc;
}

// Cone-integrated spectral profile of the scan at frequency xi:
// 1/4 * integral over s in [1,2], |y - x| < 2 - s of Lambda_{s,y}(xi).
double cone_profile(double x, double xi) {
    const QuadRule& s_rule = gauss_legendre(12);
    const QuadRule& y_rule = gauss_legendre(12);
    double acc = 0.0;
    for (std::size_t a = 0; a < s_rule.nodes.size(); ++a) {
        const double s = 1.5 + 0.5 * s_rule.nodes[a];
        const double radius = 2.0 - s;
        double inner = 0.0;
        for (std::size_t b = 0; b < y_rule.nodes.size(); ++b) {
            const double y = x + radius * y_rule.nodes[b];
            inner += y_rule.weights[b] * squared_transform_time_integral(s, y, xi, 16);
        }
        acc += s_rule.weights[a] * inner * radius;
    }
    return 0.25 * acc * 0.5;
}

// Large-xi amplitude of the cone profile: same double integral over the
// window decay amplitudes.
double cone_amplitude(double x) {
    const QuadRule& s_rule = gauss_legendre(12);
    const QuadRule& y_rule = gauss_legendre(12);
    double acc = 0.0;
    for (std::size_t a = 0; a < s_rule.nodes.size(); ++a) {
        const double s = 1.5 + 0.5 * s_rule.nodes[a];
        const double radius = 2.0 - s;
        double inner = 0.0;
        for (std::size_t b = 0; b < y_rule.nodes.size(); ++b) {
            const double y = x + radius * y_rule.nodes[b];
            inner += y_rule.weights[b] * window_decay_amplitude(s, y, 16);
        }
        acc += s_rule.weights[a] * inner * radius;
    }
    return 0.25 * acc * 0.5;
}

} // namespace

double spectral_density_constant(double hurst) {
    if (!(hurst > 0.0) || hurst > 0.5)
        throw std::invalid_argument("spectral_density_constant: hurst must lie in (0, 1/2]");
    return std::tgamma(2.0 * hurst + 1.0) * std::sin(kPi * hurst) / (2.0 * kPi);
}

void ChaosConfig::validate() const {
    if (!(hurst > 0.0) || hurst > 0.5)
        throw std::invalid_argument("ChaosConfig: hurst must lie in (0, 1/2]");
    if (!(t > 0.0)) throw std::invalid_argument("ChaosConfig: t must be positive");
    if (!std::isfinite(x)) throw std::invalid_argument("ChaosConfig: x must be finite");
    if (!(xi_cutoff > 0.0)) throw std::invalid_argument("ChaosConfig: xi_cutoff must be positive");
    if (xi_nodes < 256) throw std::invalid_argument("ChaosConfig: xi_nodes must be >= 256");
    if (!(h_cutoff_inner > 0.0) || !(h_cutoff_inner < 1.0))
        throw std::invalid_argument("ChaosConfig: h_cutoff_inner must lie in (0, 1)");
}

ChaosEstimate i1_second_moment(const ChaosConfig& config, ChaosData data) {
    config.validate();
    ChaosEstimate est;
    est.xi_cutoff = config.xi_cutoff;
    if (data == ChaosData::Zero) return est;

    const double hurst = config.hurst;
    const SpectralNodes nodes = spectral_nodes(config, 256.0);
    double value = 0.0;
    for (std::size_t k = 0; k < nodes.xi.size(); ++k)
        value += nodes.weight[k] *
                 squared_transform_time_integral(config.t, config.x, nodes.xi[k], 32);

    const double a1 = window_decay_amplitude(config.t, config.x, 32);
    const auto tail = [a1, hurst](double from, double to) {
        return a1 * (std::pow(from, -2.0 * hurst) - std::pow(to, -2.0 * hurst)) / hurst;
    };
    if (config.xi_cutoff > nodes.split) value += tail(nodes.split, config.xi_cutoff);
    const double density = spectral_density_constant(hurst);
    est.value = density * value;
    est.truncation_error = density * tail(config.xi_cutoff, 2.0 * config.xi_cutoff);
    if (est.value > 0.0 && est.truncation_error > 0.1 * est.value)
        throw std::runtime_error("i1_second_moment: truncation error estimate exceeds 10% of "
                                 "the value; increase xi_cutoff");
    return est;
}

ChaosEstimate dh_i1_second_moment(const ChaosConfig& config, double h, ChaosData data) {
    config.validate();
    ChaosEstimate est;
    est.xi_cutoff = config.xi_cutoff;
    if (h == 0.0) return est;
    if (!(h > 0.0) || !(h < std::min(1.0, 0.5 * config.t)))
        throw std::invalid_argument("dh_i1_second_moment: h must lie in [0, min(1, t/2))");
    if (data == ChaosData::Zero) return est;

    const double hurst = config.hurst;
    // increments concentrate at xi ~ 1/h, so the exact region must reach
    // well past it before handing over to the 1/xi^2 tail model
    const double split_cap = std::clamp(8.0 / h, 256.0, 8192.0);
    const SpectralNodes nodes = spectral_nodes(config, split_cap);
    double value = 0.0;
    for (std::size_t k = 0; k < nodes.xi.size(); ++k) {
        const double xi = nodes.xi[k];
        value += nodes.weight[k] * squared_transform_time_integral(config.t, config.x, xi, 32) *
                 (2.0 - 2.0 * std::cos(h * xi));
    }

    const double a1 = window_decay_amplitude(config.t, config.x, 32);
    const double h_pow = std::pow(h, 2.0 * hurst);
    const auto tail = [a1, hurst, h, h_pow](double from, double to) {
        return 4.0 * a1 * h_pow * (theta_tail(h * from, hurst) - theta_tail(h * to, hurst));
    };
    if (config.xi_cutoff > nodes.split) value += tail(nodes.split, config.xi_cutoff);
    const double density = spectral_density_constant(hurst);
    est.value = density * value;
    est.truncation_error = density * tail(config.xi_cutoff, 2.0 * config.xi_cutoff);
    if (est.value > 0.0 && est.truncation_error > 0.1 * est.value)
        throw std::runtime_error("dh_i1_second_moment: truncation error estimate exceeds 10% "
                                 "of the value; increase xi_cutoff");
    return est;
}

std::vector<std::pair<double, double>> i2_divergence_scan(const ChaosConfig& config,
                                                          const std::vector<double>& eps_list) {
    config.validate();
    if (std::abs(config.t - 2.0) > 1e-12)
        throw std::invalid_argument("i2_divergence_scan: the scan is defined at t = 2");
    std::vector<double> eps = eps_list.empty() ? std::vector<double>{config.h_cutoff_inner}
                                               : eps_list;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        if (!(eps[k] > 0.0) || !(eps[k] < 1.0))
            throw std::invalid_argument("i2_divergence_scan: eps values must lie in (0, 1)");
        if (k > 0 && !(eps[k] < eps[k - 1]))
            throw std::invalid_argument("i2_divergence_scan: eps values must decrease");
    }

    const double hurst = config.hurst;
    const SpectralNodes nodes = spectral_nodes(config, 64.0);
    std::vector<double> profile(nodes.xi.size());
    for (std::size_t k = 0; k < nodes.xi.size(); ++k)
        profile[k] = cone_profile(config.x, nodes.xi[k]);
    const double amplitude = cone_amplitude(config.x);

    // tail over xi > split: 8 A integral over [eps, 1] of h^{4H-2} Theta(split h)
    const double split = nodes.split;
    const auto tail_for = [&](double lower) {
        const QuadRule& rule = gauss_legendre(12);
        const double expo = 4.0 * hurst - 2.0;
        double acc = 0.0;
        double lo = lower;
        while (lo < 1.0) {
            const double hi = std::min({1.0, 2.0 * lo, lo + 0.03});
            acc += integrate_mapped(rule, lo, hi, [&](double h) {
                return std::pow(h, expo) * theta_tail(split * h, hurst);
            });
            lo = hi;
        }
        return 8.0 * amplitude * acc;
    };

    const double density = spectral_density_constant(hurst);
    std::vector<std::pair<double, double>> rows;
    rows.reserve(eps.size());
    for (const double e : eps) {
        double value = 0.0;
        for (std::size_t k = 0; k < nodes.xi.size(); ++k)
            value += nodes.weight[k] * profile[k] * increment_weight_integral(nodes.xi[k], e, hurst);
        value += tail_for(e);
        rows.emplace_back(e, density * value);
    }

    if (hurst < 0.25)
        for (std::size_t k = 1; k < rows.size(); ++k)
            if (rows[k].second < rows[k - 1].second * (1.0 - 1e-9))
                throw std::runtime_error("i2_divergence_scan: quadrature failure: divergence "
                                         "profile is not monotone for H < 1/4");
    return rows;
}

double i2_profile_blend_mismatch(const ChaosConfig& config) {
    config.validate();
    const double split = std::min(config.xi_cutoff, 64.0);
    const double m_split = cone_profile(config.x, split);
    const double amplitude = cone_amplitude(config.x);
    return std::abs(m_split * split * split / amplitude - 1.0);
}

double i2_upper_term(const ChaosConfig& config) {
    config.validate();
    if (std::abs(config.t - 2.0) > 1e-12)
        throw std::invalid_argument("i2_upper_term: the upper term is defined at t = 2");
    const double two_h = 2.0 * config.hurst;
    const auto f = [two_h](double s) {
        return (std::pow(s, two_h) + s * s) * std::pow(2.0 - s, two_h);
    };

    const double delta = 1e-12;
    // graded geometric panels toward both nonsmooth endpoints
    double value = 0.0;
    double hi = 1.0;
    while (hi > delta) {
        const double lo = std::max(delta, 0.5 * hi);
        value += integrate_mapped(gauss_legendre(16), lo, hi, f);
        hi = lo;
    }
    double lo = 1.0;
    while (lo < 2.0 - delta) {
        const double up = std::min(2.0 - delta, 2.0 - 0.5 * (2.0 - lo));
        value += integrate_mapped(gauss_legendre(16), lo, up, f);
        lo = up;
    }
    // analytic slivers at the endpoints
    value += std::pow(2.0, two_h) * std::pow(delta, two_h + 1.0) / (two_h + 1.0);
    value += (std::pow(2.0, two_h) + 4.0) * std::pow(delta, two_h + 1.0) / (two_h + 1.0);
    return value;
}

double g1_kernel_eval(double s, double y, double t, double x) {
    if (!(t > 0.0) || s < 0.0 || !(s < t))
        throw std::invalid_argument("g1_kernel_eval: requires 0 <= s < t");
    if (std::abs(x - y) >= t - s) return 0.0;
    return 0.5 * gaussian_i0(s, y);
}

double log_log_slope(const std::vector<std::pair<double, double>>& rows) {
    if (rows.size() < 2) throw std::invalid_argument("log_log_slope: needs at least two rows");
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [p, v] : rows) {
        if (!(p > 0.0) || !(v > 0.0))
            throw std::invalid_argument("log_log_slope: rows must be positive");
        mean_x += std::log(p);
        mean_y += std::log(v);
    }
    mean_x /= static_cast<double>(rows.size());
    mean_y /= static_cast<double>(rows.size());
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [p, v] : rows) {
        sxx += (std::log(p) - mean_x) * (std::log(p) - mean_x);
        sxy += (std::log(p) - mean_x) * (std::log(v) - mean_y);
    }
    return sxy / sxx;
}

} // namespace rwave

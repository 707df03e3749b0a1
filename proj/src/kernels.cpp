#include "rwave/kernels.hpp"

#include "rwave/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rwave {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 6.28318530717958647692528676655900577;

double sine_coefficient(double alpha) {
    return std::tgamma(1.0 - alpha) * std::cos(0.5 * alpha * kPi) / kTwoPi;
}

double cosine_coefficient(double alpha) { return std::tgamma(alpha) / kTwoPi; }

double wave_kernel(double t, double x) { return std::abs(x) < t ? 0.5 : 0.0; }

double poisson_kernel(double t, double x) { return t / (kPi * (t * t + x * x)); }

double sine_kernel(double t, double x, double alpha) {
    const double ax = std::abs(x);
    const double c = sine_coefficient(alpha);
    const double outer = std::pow(t + ax, alpha - 1.0);
    const double gap = t - ax;
    const double inner = (gap >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(gap), alpha - 1.0);
    return c * (outer + inner);
}

double cosine_kernel(double t, double x, double alpha) {
    const double ax = std::abs(x);
    const double k = cosine_coefficient(alpha);
    const double cos_a = std::cos(0.5 * alpha * kPi);
    const double edge = cos_a * (std::pow(t + ax, -alpha) + std::pow(std::abs(t - ax), -alpha));
    const double bulk = 2.0 * std::cos(alpha * std::atan(ax / t)) *
                        std::pow(t * t + ax * ax, -0.5 * alpha);
    return k * (edge - bulk);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    return {(n * sxy - sx * sy) / denom, (sy * sxx - sx * sxy) / denom};
}

// ---- numeric Fourier transform ------------------------------------------

// 2 * integral over [lo, hi] of K(t,x) cos(xi x) dx for a smooth stretch.
double smooth_stretch(const KernelSpec& spec, double t, double xi, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    const double width = std::min(0.5, 8.0 / std::max(xi, 1.0));
    return 2.0 * integrate_panels(
                     [&](double x) { return eval_kernel(spec, t, x) * std::cos(xi * x); },
                     lo, hi, width);
}

// Exact tails from the cutoff X to infinity at xi = 0.
double zero_frequency_tail(const KernelSpec& spec, double t, double big_x) {
    switch (spec.kind) {
        case KernelKind::PoissonE:
            return 1.0 - (2.0 / kPi) * std::atan(big_x / t);
        case KernelKind::SineS: {
            const double a = spec.alpha;
            const double c = sine_coefficient(a);
            return -2.0 * c * (std::pow(big_x + t, a) - std::pow(big_x - t, a)) / a;
        }
        case KernelKind::CosineC: {
            // F(x) antiderivative of the tail, F(inf) = 0; tail = -2 F(X).
            const double a = spec.alpha;
            const double k = cosine_coefficient(a);
            const double cos_a = std::cos(0.5 * a * kPi);
            const double e = 1.0 - a;
            const std::complex<double> zp(t, big_x);
            const double f = (k / e) * (cos_a * (std::pow(big_x + t, e) + std::pow(big_x - t, e)) -
                                        2.0 * std::imag(std::pow(zp, e)));
            return -2.0 * f;
        }
        default:
            throw std::logic_error("zero_frequency_tail: unsupported kernel");
    }
}

double oscillatory_tail_checked(const KernelSpec& spec, double t, double xi, double big_x,
                                double settle_tol) {
    // Start at a zero of cos so the half-period cells alternate in sign.
    const double k0 = std::ceil(big_x * xi / kPi - 0.5);
    const double start = (k0 + 0.5) * kPi / xi;
    const double lead = smooth_stretch(spec, t, xi, big_x, start) / 2.0;
    auto f = [&](double x) { return eval_kernel(spec, t, x) * std::cos(xi * x); };
    const double full = oscillatory_tail(f, start, kPi / xi, 24);
    const double check = oscillatory_tail(f, start, kPi / xi, 18);
    if (std::abs(full - check) > settle_tol) {
        std::ostringstream msg;
        msg << "numeric_kernel_transform: tail acceleration did not settle at xi = " << xi
            << " (delta " << std::abs(full - check) << ")";
        throw std::runtime_error(msg.str());
    }
    return lead + full;
}

} // namespace

void KernelSpec::validate() const {
    if (kind == KernelKind::SineS) {
        if (!(alpha > 0.0) || alpha > 1.0)
            throw std::invalid_argument("KernelSpec: alpha must lie in (0, 1]");
    } else if (kind == KernelKind::CosineC) {
        if (!(alpha > 0.0) || !(alpha < 1.0))
            throw std::invalid_argument("KernelSpec: alpha must lie in (0, 1)");
    }
}

double eval_kernel(const KernelSpec& spec, double t, double x) {
    spec.validate();
    if (!(t > 0.0)) throw std::invalid_argument("eval_kernel: t must be positive");
    switch (spec.kind) {
        case KernelKind::WaveG:
            return wave_kernel(t, x);
        case KernelKind::PoissonE:
            return poisson_kernel(t, x);
        case KernelKind::SineS:
            if (spec.alpha == 1.0) return wave_kernel(t, x);
            if (std::abs(x) == t)
                throw std::domain_error("eval_kernel: |x| = t is the singularity set");
            return sine_kernel(t, x, spec.alpha);
        case KernelKind::CosineC:
            if (std::abs(x) == t)
                throw std::domain_error("eval_kernel: |x| = t is the singularity set");
            return cosine_kernel(t, x, spec.alpha);
    }
    throw std::logic_error("eval_kernel: unreachable");
}

double eval_kernel_hat(const KernelSpec& spec, double t, double xi) {
    spec.validate();
    if (!(t > 0.0)) throw std::invalid_argument("eval_kernel_hat: t must be positive");
    const double axi = std::abs(xi);
    switch (spec.kind) {
        case KernelKind::WaveG:
            return axi == 0.0 ? t : std::sin(t * axi) / axi;
        case KernelKind::PoissonE:
            return std::exp(-t * axi);
        case KernelKind::SineS:
            if (axi == 0.0) return spec.alpha == 1.0 ? t : 0.0;
            return std::sin(t * axi) / std::pow(axi, spec.alpha);
        case KernelKind::CosineC:
            if (axi == 0.0) return 0.0;
            return (std::cos(t * axi) - std::exp(-t * axi)) / std::pow(axi, 1.0 - spec.alpha);
    }
    throw std::logic_error("eval_kernel_hat: unreachable");
}

double numeric_kernel_transform(const KernelSpec& spec, double t, double xi) {
    spec.validate();
    if (spec.kind == KernelKind::WaveG)
        throw std::invalid_argument("numeric_kernel_transform: wave kernel not supported");
    const double axi = std::abs(xi);
    const double big_x = std::max(4.0 * t, 8.0);

    double body = 0.0;
    if (spec.kind == KernelKind::PoissonE) {
        body = smooth_stretch(spec, t, axi, 0.0, big_x);
    } else {
        // Near-edge pieces carry a known power singularity with a constant
        // coefficient; peel it off and hand it to a Jacobi rule.
        const double a = spec.alpha;
        const bool is_sine = spec.kind == KernelKind::SineS;
        const double expo = is_sine ? a - 1.0 : -a;
        const double coef = is_sine ? sine_coefficient(a)
                                    : cosine_coefficient(a) * std::cos(0.5 * a * kPi);

        const QuadRule inner_rule = gauss_jacobi(64, expo, 0.0); // weight (t - x)^expo
        const QuadRule outer_rule = gauss_jacobi(64, 0.0, expo); // weight (x - t)^expo

        auto smooth_rest = [&](double x) {
            // Kernel minus its |t - x|^expo edge term; smooth across x = t.
            const double edge = coef * std::pow(std::abs(t - x), expo) *
                                (is_sine && x > t ? -1.0 : 1.0);
            return eval_kernel(spec, t, x) - edge;
        };

        // [0, t]: edge term via Jacobi, remainder via panels.
        {
            const double half = 0.5 * t;
            double sing = 0.0;
            for (std::size_t i = 0; i < inner_rule.nodes.size(); ++i) {
                const double x = half * (1.0 + inner_rule.nodes[i]);
                sing += inner_rule.weights[i] * std::cos(axi * x);
            }
            body += 2.0 * coef * sing * std::pow(half, expo + 1.0);
            const double width = std::min(0.25, 8.0 / std::max(axi, 1.0));
            body += 2.0 * integrate_panels([&](double x) { return smooth_rest(x) * std::cos(axi * x); },
                                           0.0, t, width);
        }
        // [t, t+2]: mirrored treatment (sine edge flips sign past the cone).
        {
            const double hi = t + 2.0;
            const double half = 1.0;
            double sing = 0.0;
            for (std::size_t i = 0; i < outer_rule.nodes.size(); ++i) {
                const double x = t + half * (1.0 + outer_rule.nodes[i]);
                sing += outer_rule.weights[i] * std::cos(axi * x);
            }
            const double edge_sign = is_sine ? -1.0 : 1.0;
            body += 2.0 * edge_sign * coef * sing * std::pow(half, expo + 1.0);
            const double width = std::min(0.25, 8.0 / std::max(axi, 1.0));
            body += 2.0 * integrate_panels([&](double x) { return smooth_rest(x) * std::cos(axi * x); },
                                           t, hi, width);
            body += smooth_stretch(spec, t, axi, hi, big_x);
        }
    }

    if (axi == 0.0) return body + zero_frequency_tail(spec, t, big_x);
    const double settle_tol = spec.kind == KernelKind::PoissonE ? 2e-9 : 1e-5;
    return body + 2.0 * oscillatory_tail_checked(spec, t, axi, big_x, settle_tol);
}

FourierPairReport verify_fourier_pair(const KernelSpec& spec, double t,
                                      const std::vector<double>& xi_grid) {
    if (spec.kind == KernelKind::WaveG)
        throw std::invalid_argument("verify_fourier_pair: wave kernel excluded");
    FourierPairReport report;
    report.xi = xi_grid;
    report.numeric.reserve(xi_grid.size());
    report.exact.reserve(xi_grid.size());
    for (const double xi : xi_grid) {
        const double num = numeric_kernel_transform(spec, t, xi);
        const double ex = eval_kernel_hat(spec, t, xi);
        report.numeric.push_back(num);
        report.exact.push_back(ex);
        report.max_abs_error = std::max(report.max_abs_error, std::abs(num - ex));
    }
    return report;
}

double verify_decomposition_fourier(double t, double s, double alpha, double beta,
                                    double xi) {
    if (!(t > 0.0) || !(s > 0.0))
        throw std::invalid_argument("verify_decomposition_fourier: t, s must be positive");
    const KernelSpec sine_a{KernelKind::SineS, alpha};
    const KernelSpec sine_b{KernelKind::SineS, beta};
    const KernelSpec cos_a{KernelKind::CosineC, alpha};
    const KernelSpec cos_b{KernelKind::CosineC, beta};
    const KernelSpec wave{KernelKind::WaveG, 1.0};
    const KernelSpec poisson{KernelKind::PoissonE, 0.0};

    const double axi = std::abs(xi);
    const double lhs = axi == 0.0 ? t + s : std::sin((t + s) * axi) / axi;
    const double rhs = eval_kernel_hat(sine_a, t, xi) * eval_kernel_hat(cos_a, s, xi) +
                       eval_kernel_hat(wave, t, xi) * eval_kernel_hat(poisson, s, xi) +
                       eval_kernel_hat(sine_b, s, xi) * eval_kernel_hat(cos_b, t, xi) +
                       eval_kernel_hat(wave, s, xi) * eval_kernel_hat(poisson, t, xi);
    return std::abs(lhs - rhs);
}

namespace {

// Lag convolution of a sine/cosine kernel pair with integrable power
// singularities, evaluated by symmetric graded meshes around every edge so
// the coincident-edge (principal value) cases stay finite.
double singular_pair_convolution(const KernelSpec& left, double a, const KernelSpec& right,
                                 double b, double u) {
    auto f = [&](double z) {
        return eval_kernel(left, a, u - z) * eval_kernel(right, b, z);
    };

    const double cut = 64.0;
    std::vector<double> edges = {-b, b, u - a, u + a};
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double p, double q) { return std::abs(p - q) < 1e-12; }),
                edges.end());

    const QuadRule& gl8 = gauss_legendre(8);
    double total = 0.0;

    std::vector<double> radii(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        double gap = 2.0;
        if (i > 0) gap = std::min(gap, edges[i] - edges[i - 1]);
        if (i + 1 < edges.size()) gap = std::min(gap, edges[i + 1] - edges[i]);
        radii[i] = 0.5 * gap;
    }

    // Symmetric graded shells v in (1e-9, radius] around each edge.
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const double center = edges[i];
        double hi = radii[i];
        while (hi > 1e-9) {
            const double lo = std::max(hi * 0.5, 1e-9);
            total += integrate_mapped(gl8, lo, hi,
                                      [&](double v) { return f(center + v) + f(center - v); });
            hi = lo;
        }
    }

    // Smooth segments between the shells, out to the cutoff.
    std::vector<double> bounds;
    bounds.push_back(-cut);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        bounds.push_back(edges[i] - radii[i]);
        bounds.push_back(edges[i] + radii[i]);
    }
    bounds.push_back(cut);
    for (std::size_t i = 0; i + 1 < bounds.size(); i += 2)
        total += integrate_panels(f, bounds[i], bounds[i + 1], 0.5, 12);

    return total;
}

double wave_poisson_convolution(double wave_t, double poisson_t, double u) {
    return (std::atan((u + wave_t) / poisson_t) - std::atan((u - wave_t) / poisson_t)) /
           kTwoPi;
}

} // namespace

DecompositionSpaceReport verify_decomposition_space(double t, double s, double r,
                                                    const std::vector<double>& u_grid,
                                                    double alpha, double beta) {
    if (!(0.0 <= s && s < r && r < t))
        throw std::invalid_argument("verify_decomposition_space: need 0 <= s < r < t");
    const double a = t - r;
    const double b = r - s;
    const KernelSpec sine_a{KernelKind::SineS, alpha};
    const KernelSpec cos_a{KernelKind::CosineC, alpha};
    const KernelSpec sine_b{KernelKind::SineS, beta};
    const KernelSpec cos_b{KernelKind::CosineC, beta};

    DecompositionSpaceReport report;
    report.u = u_grid;
    for (const double u : u_grid) {
        const double sum = singular_pair_convolution(sine_a, a, cos_a, b, u) +
                           singular_pair_convolution(cos_b, a, sine_b, b, u) +
                           wave_poisson_convolution(a, b, u) +
                           wave_poisson_convolution(b, a, u);
        const double target = wave_kernel(t - s, u);
        report.convolution_sum.push_back(sum);
        report.residual.push_back(std::abs(sum - target));
        report.max_abs_residual = std::max(report.max_abs_residual, report.residual.back());
    }
    return report;
}

BetaIdentityResult beta_identity_check(double theta, double s, double t) {
    if (!(theta > 0.0) || !(theta < 1.0))
        throw std::domain_error("beta_identity_check: theta must lie in (0,1)");
    if (!(s >= 0.0) || !(t > s))
        throw std::invalid_argument("beta_identity_check: need 0 <= s < t");
    // r = s + (t-s) u maps the integral to [0,1] exactly (scale invariance).
    // Each half carries one endpoint singularity; the opposite factor stays
    // smooth there, so one-sided Jacobi rules converge spectrally. A single
    // two-sided rule would be circular: its weight sum is the Beta closed form.
    const double left = integrate_left_singular(
        48, 0.0, 0.5, -theta, [&](double u) { return std::pow(1.0 - u, theta - 1.0); });
    const double right = integrate_right_singular(
        48, 0.5, 1.0, theta - 1.0, [&](double u) { return std::pow(u, -theta); });
    return {left + right, kPi / std::sin(theta * kPi)};
}

double cos_arctan_identity_check(double z, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("cos_arctan_identity_check: alpha must lie in (0,1)");
    const double lhs = std::cos(alpha * std::atan(z));
    const std::complex<double> plus = std::pow(std::complex<double>(1.0, z), -alpha);
    const std::complex<double> minus = std::pow(std::complex<double>(1.0, -z), -alpha);
    const std::complex<double> rhs =
        0.5 * std::pow(1.0 + z * z, 0.5 * alpha) * (plus + minus);
    return std::abs(lhs - rhs);
}

TailFitResult tail_exponent_fit(const KernelSpec& spec, double t, double x_lo,
                                double x_hi) {
    spec.validate();
    if (spec.kind == KernelKind::WaveG ||
        (spec.kind == KernelKind::SineS && spec.alpha == 1.0))
        throw std::invalid_argument("tail_exponent_fit: wave kernel vanishes beyond the cone");
    if (!(x_lo > 2.0 * t) || !(x_hi > x_lo))
        throw std::invalid_argument("tail_exponent_fit: range must sit beyond 2t");

    const std::size_t n = 17;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) /
                                                          static_cast<double>(n - 1));
        lx[i] = std::log(x);
        ly[i] = std::log(std::abs(eval_kernel(spec, t, x)));
    }
    const LinearFit fit = fit_line(lx, ly);

    double expected = -2.0;
    if (spec.kind == KernelKind::SineS) expected = spec.alpha - 2.0;
    if (spec.kind == KernelKind::CosineC) expected = -(1.0 + spec.alpha);
    return {fit.slope, expected};
}

void dump_kernel_table(const KernelSpec& spec, double t, const std::vector<double>& xs,
                       std::ostream& os) {
    os << "x,kernel,transform_at_x_as_xi\n";
    os.precision(17);
    for (const double x : xs) {
        os << x << ',';
        if (spec.needs_alpha() && std::abs(x) == t)
            os << "nan";
        else
            os << eval_kernel(spec, t, x);
        os << ',' << eval_kernel_hat(spec, t, x) << '\n';
    }
}

} // namespace rwave

#include "rwave/special.hpp"

#include <cmath>
#include <vector>

namespace rwave {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInvSqrtPi = 0.564189583547756286948079451560772586;

// Chebyshev-expansion coefficients for the Weideman rational approximation.
std::vector<double> weideman_coefficients(std::size_t n) {
    const std::size_t m = 2 * n;
    const double L = std::sqrt(static_cast<double>(n) / std::sqrt(2.0));
    std::vector<double> c(n);
    for (std::size_t j = 1; j <= n; ++j) {
        double sum = L * L; // theta = 0 term: t = 0, g = L^2
        for (std::size_t k = 1; k < m; ++k) {
            const double theta = kPi * static_cast<double>(k) / static_cast<double>(m);
            const double t = L * std::tan(0.5 * theta);
            const double g = std::exp(-t * t) * (L * L + t * t);
            sum += 2.0 * g * std::cos(static_cast<double>(j) * theta);
        }
        c[j - 1] = sum / static_cast<double>(2 * m);
    }
    return c;
}

std::complex<double> faddeeva_upper(std::complex<double> z) {
    static const std::size_t kN = 48;
    static const double kL = std::sqrt(static_cast<double>(kN) / std::sqrt(2.0));
    static const std::vector<double> kCoef = weideman_coefficients(kN);

    const std::complex<double> iz(-z.imag(), z.real());
    const std::complex<double> denom = kL - iz;
    const std::complex<double> big_z = (kL + iz) / denom;
    std::complex<double> poly(0.0, 0.0);
    for (std::size_t j = kN; j-- > 0;) poly = poly * big_z + kCoef[j];
    return 2.0 * poly / (denom * denom) + kInvSqrtPi / denom;
}

} // namespace

std::complex<double> faddeeva_w(std::complex<double> z) {
    if (z.imag() >= 0.0) return faddeeva_upper(z);
    // w(z) = 2 exp(-z^2) - w(-z); exp(-z^2) may overflow deep in the lower
    // half-plane, which callers here never reach.
    const std::complex<double> expmz2 = std::exp(-z * z);
    return 2.0 * expmz2 - faddeeva_upper(-z);
}

std::complex<double> erf_decay_product(double u, double xi) {
    // exp(-xi^2/4) erf(u + i xi/2) with the Gaussian prefactor folded into the
    // w-argument so no intermediate overflows for large |xi|.
    const double p_mag = std::exp(-u * u);
    const std::complex<double> phase(std::cos(u * xi), -std::sin(u * xi));
    const std::complex<double> p = p_mag * phase;
    const double gauss = std::exp(-0.25 * xi * xi);
    if (u >= 0.0) {
        const std::complex<double> w = faddeeva_upper({-0.5 * xi, u});
        return gauss - p * w;
    }
    const std::complex<double> w = faddeeva_upper({0.5 * xi, -u});
    return -gauss + p * w;
}

std::complex<double> gaussian_window_fourier(double a, double b, double c, double xi) {
    if (xi < 0.0) return std::conj(gaussian_window_fourier(a, b, c, -xi));
    const std::complex<double> phase(std::cos(xi * c), -std::sin(xi * c));
    const double half_sqrt_pi = 0.886226925452758013649083741670572591;
    return phase * half_sqrt_pi *
           (erf_decay_product(b - c, xi) - erf_decay_product(a - c, xi));
}

} // namespace rwave

#include "rwave/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace rwave {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Symmetric tridiagonal eigensolver (QL with implicit shifts) that tracks the
// first component of each eigenvector in z; that is all Golub-Welsch needs.
void tridiag_eigen_first_components(std::vector<double>& d, std::vector<double>& e,
                                    std::vector<double>& z) {
    const std::size_t n = d.size();
    z.assign(n, 0.0);
    if (n == 0) return;
    z[0] = 1.0;
    if (n == 1) return;
    e.push_back(0.0);

    for (std::size_t l = 0; l < n; ++l) {
        std::size_t iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-15 * dd) break;
            }
            if (m != l) {
                if (iter++ == 60)
                    throw std::runtime_error("gauss_jacobi: eigenvalue iteration failed");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
                if (r == 0.0 && m - l > 1) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }

    // Sort ascending, carrying first components along.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t k = i;
        for (std::size_t j = i + 1; j < n; ++j)
            if (d[j] < d[k]) k = j;
        if (k != i) {
            std::swap(d[i], d[k]);
            std::swap(z[i], z[k]);
        }
    }
}

QuadRule gauss_legendre_newton(std::size_t n) {
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(kPi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

} // namespace

const QuadRule& gauss_legendre(std::size_t n) {
    if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
    static std::map<std::size_t, QuadRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_legendre_newton(n)).first;
    return it->second;
}

QuadRule gauss_jacobi(std::size_t n, double a, double b) {
    if (n == 0) throw std::invalid_argument("gauss_jacobi: n must be positive");
    if (a <= -1.0 || b <= -1.0)
        throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");

    const double ab = a + b;
    std::vector<double> diag(n), off;
    diag[0] = (b - a) / (ab + 2.0);
    off.reserve(n - 1);
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double den = 2.0 * kk + ab;
        diag[k] = (b * b - a * a) / (den * (den + 2.0));
        double beta;
        if (k == 1) {
            beta = 4.0 * (a + 1.0) * (b + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
        } else {
            beta = 4.0 * kk * (kk + a) * (kk + b) * (kk + ab) /
                   (den * den * (den + 1.0) * (den - 1.0));
        }
        off.push_back(std::sqrt(beta));
    }

    std::vector<double> z;
    tridiag_eigen_first_components(diag, off, z);

    const double mu0 =
        std::pow(2.0, ab + 1.0) *
        std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));

    QuadRule rule;
    rule.nodes = std::move(diag);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) rule.weights[i] = mu0 * z[i] * z[i];
    return rule;
}

double integrate_mapped(const QuadRule& rule, double lo, double hi,
                        const std::function<double(double)>& f) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

double integrate_left_singular(std::size_t n, double lo, double hi, double expo,
                               const std::function<double(double)>& f) {
    const QuadRule rule = gauss_jacobi(n, 0.0, expo);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        sum += rule.weights[i] * f(lo + half * (1.0 + rule.nodes[i]));
    return sum * std::pow(half, expo + 1.0);
}

double integrate_right_singular(std::size_t n, double lo, double hi, double expo,
                                const std::function<double(double)>& f) {
    const QuadRule rule = gauss_jacobi(n, expo, 0.0);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        sum += rule.weights[i] * f(lo + half * (1.0 + rule.nodes[i]));
    return sum * std::pow(half, expo + 1.0);
}

double integrate_panels(const std::function<double(double)>& f, double lo, double hi,
                        double max_width, std::size_t nodes_per_panel) {
    if (!(hi > lo)) return 0.0;
    if (!(max_width > 0.0)) throw std::invalid_argument("integrate_panels: width must be positive");
    const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / max_width));
    const double width = (hi - lo) / static_cast<double>(count);
    const QuadRule& rule = gauss_legendre(nodes_per_panel);
    double sum = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double a = lo + width * static_cast<double>(k);
        sum += integrate_mapped(rule, a, a + width, f);
    }
    return sum;
}

double euler_accelerate(const std::vector<double>& terms) {
    if (terms.empty()) return 0.0;
    std::vector<double> s(terms.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        acc += terms[i];
        s[i] = acc;
    }
    while (s.size() > 1) {
        for (std::size_t i = 0; i + 1 < s.size(); ++i) s[i] = 0.5 * (s[i] + s[i + 1]);
        s.pop_back();
    }
    return s[0];
}

double oscillatory_tail(const std::function<double(double)>& f, double start,
                        double half_period, std::size_t n_terms) {
    if (!(half_period > 0.0))
        throw std::invalid_argument("oscillatory_tail: half_period must be positive");
    const QuadRule& rule = gauss_legendre(8);
    std::vector<double> terms(n_terms);
    for (std::size_t k = 0; k < n_terms; ++k) {
        const double a = start + half_period * static_cast<double>(k);
        terms[k] = integrate_mapped(rule, a, a + half_period, f);
    }
    return euler_accelerate(terms);
}

namespace {
double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double tol) {
    if (lo == hi) return 0.0;
    const double m = 0.5 * (lo + hi);
    const double fa = f(lo), fm = f(m), fb = f(hi);
    const double whole = simpson(lo, hi, fa, fm, fb);
    return adaptive_simpson_rec(f, lo, hi, fa, fm, fb, whole, tol, 40);
}

} // namespace rwave

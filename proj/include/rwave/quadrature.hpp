#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace rwave {

// Nodes and weights on the reference interval [-1, 1].
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule; results are cached per n.
const QuadRule& gauss_legendre(std::size_t n);

// Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b, a, b > -1 (Golub-Welsch).
QuadRule gauss_jacobi(std::size_t n, double a, double b);

double integrate_mapped(const QuadRule& rule, double lo, double hi,
                        const std::function<double(double)>& f);

// integral of (x - lo)^expo * f(x) over [lo, hi]; f smooth, expo > -1.
double integrate_left_singular(std::size_t n, double lo, double hi, double expo,
                               const std::function<double(double)>& f);

// integral of (hi - x)^expo * f(x) over [lo, hi]; f smooth, expo > -1.
double integrate_right_singular(std::size_t n, double lo, double hi, double expo,
                                const std::function<double(double)>& f);

// Smooth integrand over [lo, hi] split into fixed-width panels.
double integrate_panels(const std::function<double(double)>& f, double lo, double hi,
                        double max_width, std::size_t nodes_per_panel = 16);

// Sum of an alternating tail: terms[k] is the signed integral over the k-th
// half-period. Iterated averaging (van Wijngaarden) of the partial sums.
double euler_accelerate(const std::vector<double>& terms);

// Tail integral of f from `start`, where f flips sign every `half_period`.
// Integrates n_terms half-period cells and accelerates the alternating sum.
double oscillatory_tail(const std::function<double(double)>& f, double start,
                        double half_period, std::size_t n_terms = 24);

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double tol);

} // namespace rwave

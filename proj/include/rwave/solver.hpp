#pragma once

#include "rwave/field.hpp"
#include "rwave/noise.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

namespace rwave {

enum class SigmaKind { Zero, Linear, ScaledSine, Tabulated };

// Multiplicative coefficient sigma(u). All built-ins vanish at u = 0;
// tabulated coefficients are piecewise linear with constant extrapolation
// beyond the table (which keeps lipschitz_bound valid on the whole line).
struct SigmaSpec {
    SigmaKind kind = SigmaKind::Zero;
    double amplitude = 0.0;
    std::vector<double> table_u;
    std::vector<double> table_v;
    double lipschitz_bound = 0.0;

    static SigmaSpec zero();
    static SigmaSpec linear(double a);
    static SigmaSpec scaled_sine(double a); // a * sin(u)
    static SigmaSpec tabulated(std::vector<double> u, std::vector<double> v);

    double operator()(double u) const;
    void validate() const;
};

enum class InitialDataKind { Zero, Gaussian, Constant, Custom };

// Initial displacement u0 and velocity v0. Built-ins: GAUSSIAN has
// u0(x) = exp(-x^2) and v0 = 0; CONSTANT(c) has u0 = c, v0 = 0.
struct InitialData {
    InitialDataKind kind = InitialDataKind::Zero;
    double constant_value = 0.0;
    std::function<double(double)> u0; // null means identically zero
    std::function<double(double)> v0;

    static InitialData zero();
    static InitialData gaussian();
    static InitialData constant(double c);
    static InitialData custom(std::function<double(double)> u0, std::function<double(double)> v0);
};

// Deterministic wave part: 0.5 [u0(x+t) + u0(x-t)] + 0.5 Integral_{x-t}^{x+t} v0.
// Closed form for built-ins; adaptive quadrature for custom v0.
double dalembert_I0(const InitialData& data, double t, double x);

struct SolutionField {
    GridSpec grid;
    SigmaSpec sigma;
    double eps = 0.0;
    std::size_t n_realizations = 0;
    std::vector<double> values;                        // realization-major, then row-major t * x
    std::vector<int> picard_iterations;                // per realization
    std::vector<std::vector<double>> picard_residuals; // per realization
    std::vector<char> converged;                       // per realization

    double at(std::size_t r, std::size_t i, std::size_t j) const {
        return values[(r * grid.t_count + i) * grid.x_count + j];
    }
    FieldView realization_view(std::size_t r) const {
        return {grid, values.data() + r * grid.size()};
    }
};

// Left-point rule for the integral of 0.5 1_{|x-y| < t-s} v dW at grid node
// (t_index, x_index): cells strictly before t and strictly inside the cone.
// v must live on the noise grid; throws if the cone would need noise cells
// beyond the grid (never zero-pads silently).
double stochastic_convolution(const FieldView& v, const NoiseField& noise, std::size_t t_index,
                              std::size_t x_index);

// Fixed-point iteration u^{n+1} = I0 + conv(sigma(u^n), mollified noise),
// started from u^0 = I0, on an internal grid widened by the cone plus the
// mollifier support so every reported node is exact. Stops when the
// Z-distance (p = 2) between successive iterates drops below tol_Z2 or after
// n_max iterations; records the residual history. Three consecutive residual
// increases past the second iterate raise an error carrying the history.
SolutionField picard_solve(const GridSpec& grid, const NoiseParams& noise_params,
                           const SigmaSpec& sigma, const InitialData& data, double eps,
                           int n_max, double tol_Z2);

// Independent realizations with seeds derived from noise_params.seed by
// realization index; results are bit-identical for a fixed seed regardless
// of RWAVE_THREADS. Errors from individual realizations are tagged with the
// realization index.
SolutionField solve_ensemble(const GridSpec& grid, const NoiseParams& noise_params,
                             const SigmaSpec& sigma, const InitialData& data, double eps,
                             std::size_t n_realizations, int n_max = 12, double tol_Z2 = 1e-3);

// CSV export: grid header comment, then "t,x,value" rows for one realization.
void save_solution_csv(const SolutionField& field, std::size_t realization, std::ostream& os);

// CSV export: "iteration,z2_distance" rows for one realization.
void save_residuals_csv(const SolutionField& field, std::size_t realization, std::ostream& os);

} // namespace rwave

#pragma once

#include "rwave/grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace rwave {

struct NoiseParams {
    double hurst = 0.4;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(hurst > 0.0) || hurst > 0.5)
            throw std::invalid_argument("NoiseParams: hurst must lie in (0, 0.5]");
    }
};

// Increments of the driving field: entry (i,j) holds the mass of
// [t_i, t_i+dt] x [x_j, x_j+dx]. Rows are independent; each row is a
// fractional Gaussian noise sequence scaled by sqrt(dt).
struct NoiseField {
    GridSpec grid;
    NoiseParams params;
    std::vector<double> increments; // row-major, t_count * x_count

    double at(std::size_t i, std::size_t j) const { return increments[i * grid.x_count + j]; }
    double& at(std::size_t i, std::size_t j) { return increments[i * grid.x_count + j]; }
};

// Stationary spatial increment covariance at integer lag k:
// 0.5 dx^{2H} (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H}). Time factor dt excluded.
double fgn_covariance(long lag, double hurst, double dx);

// Exact covariance of the field itself, E[W(t,x) W(s,y)].
double w_covariance_exact(double t, double x, double s, double y, double hurst);

NoiseField sample_noise_field(const GridSpec& grid, const NoiseParams& params);

// Exact O(n^3) row sampler used when the circulant embedding is rejected;
// exposed so the fallback path stays tested.
NoiseField sample_noise_field_cholesky(const GridSpec& grid, const NoiseParams& params);

// Half-width, in cells, of the discrete mollifier used by mollify_field.
long mollifier_radius_cells(double eps, double dx);

// Row-wise discrete convolution against a unit-mass Gaussian of variance eps,
// zero-padded (no wraparound). Kernel truncated at 8 sqrt(eps).
NoiseField mollify_field(const NoiseField& field, double eps);

struct CovarianceEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

// Monte Carlo estimate of E[W(t,x) W(s,y)] with W rebuilt from increments by
// cumulative sums, re-anchored at x = 0 so it matches the continuum field.
// Requires t0 = 0 grids and 0 on the spatial grid; points must be grid nodes.
CovarianceEstimate empirical_w_covariance(const std::vector<NoiseField>& ensemble,
                                          double t, double x, double s, double y);

void save_noise_csv(const NoiseField& field, std::ostream& os);
void save_noise_binary(const NoiseField& field, std::ostream& os);
NoiseField load_noise_binary(std::istream& is);

} // namespace rwave

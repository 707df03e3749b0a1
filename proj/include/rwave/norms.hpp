#pragma once

#include "rwave/field.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace rwave {

// Configuration for the fractional-increment norm estimators. The increment
// weight is |h|^{-1-2 beta} with beta = 1/2 - hurst. Fields are treated as
// identically zero outside their grid; x-integrals of |D_h u|^p pick up the
// closed boundary correction so compactly supported fields get exact lag
// integrals for every lag, including lags past the grid extent.
struct NormConfig {
    double p = 2.0;
    double hurst = 0.4;
    double h_min = 0.0;        // 0 -> dx of the ensemble grid
    double h_max = 0.0;        // 0 -> quarter of the x-extent
    std::size_t lag_count = 0; // 0 -> ceil(8 log2(h_max / h_min))

    double beta() const { return 0.5 - hurst; }
    void validate() const;
};

struct ZNormEstimate {
    double z1 = 0.0; // sup over grid times of || u(t,.) ||_{L^p(Omega x R)}
    double z2 = 0.0; // sup over grid times of the increment seminorm
    double z = 0.0;  // z1 + z2
};

struct HolderFit {
    double slope = 0.0;
    double std_error = 0.0;
};

enum class Axis { Time, Space };

// Pointwise fractional increment norm at one grid point (t, x):
// sqrt( sum_lags ||D_h u(t,.)||^2_{L^p(Omega)}(x) |h|^{-1-2 beta} dh ),
// two-sided in h over a geometric lag grid snapped to whole cells.
// Requires at least 100 realizations on a common grid.
double n_beta_p_estimate(const std::vector<FieldView>& ensemble, const NormConfig& config,
                         double t, double x);

// Space-time norm: z1 takes the x-integral by the trapezoid rule; z2 applies
// the lag sum to || D_h u(t,.) ||_{L^p(Omega x R)} with the zero-extension
// x-integral. Throws if any realization contains a non-finite value,
// identifying the realization.
ZNormEstimate z_norm_estimate(const std::vector<FieldView>& ensemble, const NormConfig& config);

// Least-squares slope of (1/p) log E|Delta_lag u|^p against log lag, pooled
// over grid points away from the boundary. Lags are geometric within
// [lag_lo, lag_hi] in physical units along the chosen axis; at least 4
// distinct snapped lags and 500 realizations are required.
HolderFit holder_exponent(const std::vector<FieldView>& ensemble, Axis axis, double p,
                          double lag_lo, double lag_hi);

// Squared normalization constant tying the spatial covariance to its spectral
// density; not applied by the estimators above, provided for reconstruction.
double fbm_normalization_squared(double hurst);

// Per-time rows "t,z1,z2" for the ensemble under the given config.
void norm_report_csv(const std::vector<FieldView>& ensemble, const NormConfig& config,
                     std::ostream& os);

} // namespace rwave

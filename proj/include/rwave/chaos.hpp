#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace rwave {

// Spectral-side configuration. The spectral measure is
// c_H |xi|^{1-2H} d xi with c_H = spectral_density_constant(H), the density
// of the spatial covariance, so spectral moments agree with ensemble moments
// of the sampled noise. The exact quadrature runs up to a split point and the
// remainder uses the window-transform decay ~ xi^{-2}, so xi_cutoff only
// enters through the recorded truncation metadata, never as a silent zero.
struct ChaosConfig {
    double hurst = 0.4;
    double t = 1.0;
    double x = 0.0;
    double xi_cutoff = 65536.0;
    std::size_t xi_nodes = 1024; // floor on the exact-region node count
    double h_cutoff_inner = 0.5; // default inner cutoff for the divergence scan

    void validate() const;
};

struct ChaosEstimate {
    double value = 0.0;
    double xi_cutoff = 0.0;
    double truncation_error = 0.0; // cutoff-doubling estimate, value(2 Xi) - value(Xi)
};

enum class ChaosData { Gaussian, Zero };

// Density constant of the spatial covariance's spectral representation,
// Gamma(2H+1) sin(pi H) / (2 pi). With this factor the lag covariance is the
// Fourier transform of the density, e.g. the box function 1_{[0,1]} has
// spectral second moment exactly 1. Accepts hurst in (0, 1/2].
double spectral_density_constant(double hurst);

// Second moment of the first chaos at (t, x) for the Gaussian initial data
// u0(y) = exp(-y^2), v0 = 0: the time integral of the squared windowed
// transform against the spectral measure. Throws when the estimated
// truncation error exceeds 10% of the value (advice: raise xi_cutoff).
ChaosEstimate i1_second_moment(const ChaosConfig& config, ChaosData data = ChaosData::Gaussian);

// Second moment of the increment D_h of the first chaos: the same spectral
// integral with the factor 2 - 2 cos(h xi) folded in. Requires
// 0 <= h < min(1, t/2); h = 0 returns zero exactly.
ChaosEstimate dh_i1_second_moment(const ChaosConfig& config, double h,
                                  ChaosData data = ChaosData::Gaussian);

// Lower-bound functional behind the second-chaos divergence: for each eps,
// integrates E|D_h I1(s,y)|^2 |h|^{2H-2} over eps < |h| < 1, the cone
// |y - x| < 2 - s, and s in [1, 2], all at t = 2. eps values must decrease
// within (0,1); an empty list uses config.h_cutoff_inner. For H < 1/4 a
// non-monotone profile is flagged as a quadrature failure.
std::vector<std::pair<double, double>> i2_divergence_scan(const ChaosConfig& config,
                                                          const std::vector<double>& eps_list);

// Ratio diagnostic for the exact/asymptotic blend of the scan profile:
// |M(split) split^2 / A - 1| where M is the cone-integrated spectral profile
// and A its window-decay amplitude.
double i2_profile_blend_mismatch(const ChaosConfig& config);

// Integral of (s^{2H} + s^2) (2-s)^{2H} over [0, 2] (the convergent upper
// term at t = 2); accepts hurst in (0, 1/2].
double i2_upper_term(const ChaosConfig& config);

// First-chaos kernel: G_{t-s}(x-y) I0(s,y) with the Gaussian data.
double g1_kernel_eval(double s, double y, double t, double x);

// Least-squares slope of log(value) against log(parameter).
double log_log_slope(const std::vector<std::pair<double, double>>& rows);

} // namespace rwave

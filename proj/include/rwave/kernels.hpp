#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace rwave {

enum class KernelKind { WaveG, PoissonE, SineS, CosineC };

// SineS carries order alpha (S_alpha); CosineC carries alpha meaning the
// kernel of order 1-alpha, matching the decomposition pairing.
struct KernelSpec {
    KernelKind kind = KernelKind::WaveG;
    double alpha = 0.5;

    void validate() const;
    bool needs_alpha() const {
        return kind == KernelKind::SineS || kind == KernelKind::CosineC;
    }
};

// Closed-form kernel value; refuses |x| = t for the singular kinds.
double eval_kernel(const KernelSpec& spec, double t, double x);

// Closed-form Fourier transform under f_hat(xi) = integral e^{-i x xi} f(x) dx.
double eval_kernel_hat(const KernelSpec& spec, double t, double xi);

// Transform computed by singular-aware quadrature, for cross-checking the
// closed forms. Throws if the internal tail acceleration fails to settle.
double numeric_kernel_transform(const KernelSpec& spec, double t, double xi);

struct FourierPairReport {
    double max_abs_error = 0.0;
    std::vector<double> xi;
    std::vector<double> numeric;
    std::vector<double> exact;
};

FourierPairReport verify_fourier_pair(const KernelSpec& spec, double t,
                                      const std::vector<double>& xi_grid);

// Residual of the transform-side decomposition identity at a single frequency.
double verify_decomposition_fourier(double t, double s, double alpha, double beta,
                                    double xi);

struct DecompositionSpaceReport {
    std::vector<double> u;
    std::vector<double> convolution_sum;
    std::vector<double> residual;
    double max_abs_residual = 0.0;
};

// Evaluates the four lag-convolutions against the wave kernel at lag u.
DecompositionSpaceReport verify_decomposition_space(double t, double s, double r,
                                                    const std::vector<double>& u_grid,
                                                    double alpha, double beta);

struct BetaIdentityResult {
    double quadrature_value = 0.0;
    double closed_form = 0.0;
};

BetaIdentityResult beta_identity_check(double theta, double s, double t);

double cos_arctan_identity_check(double z, double alpha);

struct TailFitResult {
    double fitted_exponent = 0.0;
    double expected_exponent = 0.0;
};

// Log-log least-squares fit of |kernel| over 17 log-spaced points in
// [x_lo, x_hi]; the range must sit entirely beyond 2t.
TailFitResult tail_exponent_fit(const KernelSpec& spec, double t, double x_lo,
                                double x_hi);

void dump_kernel_table(const KernelSpec& spec, double t, const std::vector<double>& xs,
                       std::ostream& os);

} // namespace rwave

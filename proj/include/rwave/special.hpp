#pragma once

#include <complex>

namespace rwave {

// Faddeeva function w(z) = exp(-z^2) erfc(-iz), rational approximation
// (Weideman), accurate to ~1e-13 relative over the upper half-plane.
std::complex<double> faddeeva_w(std::complex<double> z);

// exp(-xi^2/4) * erf(u + i xi / 2), evaluated without overflow by routing
// both half-lines through w on the upper half-plane.
std::complex<double> erf_decay_product(double u, double xi);

// T(a,b,c,xi) = integral over [a,b] of exp(-(y-c)^2) exp(-i xi y) dy.
std::complex<double> gaussian_window_fourier(double a, double b, double c, double xi);

} // namespace rwave

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace rwave {

std::size_t next_pow2(std::size_t n);

// In-place radix-2 FFT; a.size() must be a power of two.
// Forward uses the e^{-i 2 pi jk / n} convention; inverse divides by n.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);

} // namespace rwave

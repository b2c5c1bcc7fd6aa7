#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace deconvar {

/// In-place iterative radix-2 transform.  sign = -1 computes the forward sum
/// X[m] = sum_k x[k] exp(-2 pi i k m / L), sign = +1 the unnormalised inverse.
/// The length must be a power of two.  First-party on purpose: results are
/// bit-reproducible across platforms and thread counts, and every caller in
/// this library controls the (power-of-two) size.
void fft_pow2(std::vector<std::complex<double>>& data, int sign);

bool is_pow2(std::size_t n);
std::size_t next_pow2(std::size_t n);

} // namespace deconvar

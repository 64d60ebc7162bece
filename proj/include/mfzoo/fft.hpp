#pragma once

#include <span>
#include <vector>

#include "mfzoo/numeric.hpp"

namespace mfzoo {

// Unnormalized DFT: out[k] = Σ_n in[n] e^{sign 2πi nk/N}, sign = ±1.
std::vector<cplx> dft(std::span<const cplx> in, int sign);

// (a * b)[i] = Σ_k a[k] b[(i - k) mod N]; both inputs have length N.
std::vector<double> circular_convolve(std::span<const double> a, std::span<const double> b);

} // namespace mfzoo

#pragma once

#include "dpfbmc/common.hpp"

#include <span>

namespace dpfbmc {

/// Unnormalised in-place DFT of length size.
/// forward:  X[n] = sum_k x[k] e^{-j2pi nk/N}
/// inverse:  x[k] = sum_n X[n] e^{+j2pi nk/N}
/// Safe to call concurrently; plans are shared and created once per size.
void fft_forward(std::span<Complex> data);
void fft_inverse(std::span<Complex> data);

} // namespace dpfbmc

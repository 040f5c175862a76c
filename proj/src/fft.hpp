#pragma once

#include "afdm/types.hpp"

namespace afdm::fft {

// Unnormalized DFT, X[k] = sum_n x[n] exp(-j2pi kn/N).
void forward(const cd* in, cd* out, int n);
// Unnormalized inverse, x[n] = sum_k X[k] exp(+j2pi kn/N).
void backward(const cd* in, cd* out, int n);

}  // namespace afdm::fft

#pragma once

#include <complex>
#include <span>

namespace qmnls::detail {

// Unnormalised in-place DFTs:
//   forward:  X_k = sum_j x_j e^{-2 pi i jk/n}
//   backward: x_j = sum_k X_k e^{+2 pi i jk/n}
// Plans are cached per thread; planning is serialised process-wide.
void dft_forward(std::span<std::complex<double>> data);
void dft_backward(std::span<std::complex<double>> data);

}  // namespace qmnls::detail

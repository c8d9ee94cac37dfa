#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace tfblur {

using cplx = std::complex<double>;

namespace fft {

// In-place unnormalized DFTs of arbitrary length, backed by FFTW.
// Forward:  X[k] = sum_t x[t] exp(-2 pi i k t / n)
// Inverse:  x[t] = sum_k X[k] exp(+2 pi i k t / n)   (no 1/n)
void Forward(std::span<cplx> data);
void Inverse(std::span<cplx> data);

// Row-major rows x cols grid, forward along both axes.
void Forward2D(std::span<cplx> grid, std::size_t rows, std::size_t cols);

}  // namespace fft
}  // namespace tfblur

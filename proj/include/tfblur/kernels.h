#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tfblur/gabor.h"

namespace tfblur {

// Real 2D tap grid over (time offset, frequency offset). Extents are odd and
// the anchor is the centre tap, so offsets run over [-radius, radius].
class Kernel {
 public:
  Kernel() : Kernel(1, 1, {1.0}) {}
  Kernel(std::size_t time_taps, std::size_t freq_taps, std::vector<double> taps);

  std::size_t time_taps() const { return time_taps_; }
  std::size_t freq_taps() const { return freq_taps_; }
  long time_radius() const { return static_cast<long>(time_taps_ / 2); }
  long freq_radius() const { return static_cast<long>(freq_taps_ / 2); }
  double mass() const { return mass_; }
  std::span<const double> taps() const { return taps_; }

  // Tap at time offset i and frequency offset j, both relative to the anchor.
  double at(long i, long j) const {
    return taps_[static_cast<std::size_t>(i + time_radius()) * freq_taps_ +
                 static_cast<std::size_t>(j + freq_radius())];
  }

  double L1Norm() const;
  bool IsDelta() const;

  bool operator==(const Kernel&) const = default;

 private:
  std::size_t time_taps_;
  std::size_t freq_taps_;
  std::vector<double> taps_;
  double mass_;
};

// taps ~ exp(-(i^2 / 2 sigma_t^2 + j^2 / 2 sigma_f^2)) on extents
// 2 ceil(truncation sigma) + 1, normalized to mass 1 unless `normalize` is
// false (then the centre tap is 1). A zero sigma collapses that axis.
Kernel GaussianKernel(double sigma_t, double sigma_f, double truncation = 4.0,
                      bool normalize = true);

Kernel DeltaKernel();

Kernel ScaleKernel(const Kernel& kernel, double factor);

// Point reflection (i, j) -> (-i, -j); the kernel of the adjoint convolution.
Kernel ReflectKernel(const Kernel& kernel);

// Full linear convolution of the tap grids.
Kernel Compose(const Kernel& k1, const Kernel& k2);

// 2D DFT of the kernel embedded in a frames x channels circular grid with the
// anchor at the origin. Row-major, frames first.
std::vector<cplx> KernelDft(const Kernel& kernel, std::size_t frames,
                            std::size_t channels);

// Minimum real part of KernelDft.
double KernelDftMin(const Kernel& kernel, std::size_t frames, std::size_t channels);

// out[n, m] = sum_{i,j} k(i, j) tf[n - i, m - j]. The frequency axis is always
// cyclic; the time axis is cyclic or zero-extended.
TfMatrix ConvolveTf(const TfMatrix& tf, const Kernel& kernel,
                    BoundaryMode time_mode = BoundaryMode::kCircular);

// Position-dependent kernel map over a lattice's coefficient grid: either one
// kernel broadcast to every bin or one kernel per bin.
class KernelField {
 public:
  KernelField(const Lattice& lattice, Kernel constant);
  KernelField(const Lattice& lattice, std::vector<Kernel> per_bin);

  const Lattice& lattice() const { return lattice_; }
  bool is_constant() const { return constant_.has_value(); }
  const Kernel& at(std::size_t n, std::size_t m) const {
    return constant_ ? *constant_ : per_bin_[n * lattice_.channels + m];
  }

 private:
  Lattice lattice_;
  std::optional<Kernel> constant_;
  std::vector<Kernel> per_bin_;
};

KernelField ConstantField(const Kernel& kernel, const Lattice& lattice);

// Per-bin kernels mask[n, m] * delta; mask is frames x channels row-major.
KernelField MaskField(std::span<const double> mask, const Lattice& lattice);

// out[z] = sum_w field_z(w) tf[z - w], each bin using its own kernel.
TfMatrix ApplyField(const TfMatrix& tf, const KernelField& field,
                    BoundaryMode time_mode = BoundaryMode::kCircular);

}  // namespace tfblur

#include "tfblur/kernels.h"

#include <cmath>
#include <numeric>

#include "tfblur/error.h"

namespace tfblur {

Kernel::Kernel(std::size_t time_taps, std::size_t freq_taps, std::vector<double> taps)
    : time_taps_(time_taps), freq_taps_(freq_taps), taps_(std::move(taps)) {
  Require(time_taps_ % 2 == 1 && freq_taps_ % 2 == 1, "kernel extents must be odd");
  Require(taps_.size() == time_taps_ * freq_taps_, "kernel tap count mismatch");
  for (double v : taps_) Require(std::isfinite(v), "kernel taps must be finite");
  mass_ = std::accumulate(taps_.begin(), taps_.end(), 0.0);
}

double Kernel::L1Norm() const {
  double s = 0.0;
  for (double v : taps_) s += std::abs(v);
  return s;
}

bool Kernel::IsDelta() const {
  return time_taps_ == 1 && freq_taps_ == 1 && taps_[0] == 1.0;
}

Kernel GaussianKernel(double sigma_t, double sigma_f, double truncation, bool normalize) {
  Require(sigma_t >= 0 && sigma_f >= 0, "Gaussian spreads must be nonnegative");
  Require(truncation > 0, "truncation must be positive");
  const long rt = static_cast<long>(std::ceil(truncation * sigma_t));
  const long rf = static_cast<long>(std::ceil(truncation * sigma_f));
  const std::size_t nt = static_cast<std::size_t>(2 * rt + 1);
  const std::size_t nf = static_cast<std::size_t>(2 * rf + 1);
  std::vector<double> taps(nt * nf);
  auto axis = [](long i, double sigma) {
    if (sigma == 0.0) return i == 0 ? 0.0 : INFINITY;
    return static_cast<double>(i * i) / (2.0 * sigma * sigma);
  };
  double sum = 0.0;
  for (long i = -rt; i <= rt; ++i) {
    for (long j = -rf; j <= rf; ++j) {
      double v = std::exp(-(axis(i, sigma_t) + axis(j, sigma_f)));
      taps[static_cast<std::size_t>(i + rt) * nf + static_cast<std::size_t>(j + rf)] = v;
      sum += v;
    }
  }
  if (normalize)
    for (double& v : taps) v /= sum;
  return Kernel(nt, nf, std::move(taps));
}

Kernel DeltaKernel() { return Kernel(1, 1, {1.0}); }

Kernel ScaleKernel(const Kernel& kernel, double factor) {
  std::vector<double> taps(kernel.taps().begin(), kernel.taps().end());
  for (double& v : taps) v *= factor;
  return Kernel(kernel.time_taps(), kernel.freq_taps(), std::move(taps));
}

Kernel ReflectKernel(const Kernel& kernel) {
  std::vector<double> taps(kernel.taps().rbegin(), kernel.taps().rend());
  return Kernel(kernel.time_taps(), kernel.freq_taps(), std::move(taps));
}

Kernel Compose(const Kernel& k1, const Kernel& k2) {
  const std::size_t nt = k1.time_taps() + k2.time_taps() - 1;
  const std::size_t nf = k1.freq_taps() + k2.freq_taps() - 1;
  std::vector<double> taps(nt * nf, 0.0);
  for (std::size_t a = 0; a < k1.time_taps(); ++a)
    for (std::size_t b = 0; b < k1.freq_taps(); ++b) {
      double v = k1.taps()[a * k1.freq_taps() + b];
      if (v == 0.0) continue;
      for (std::size_t c = 0; c < k2.time_taps(); ++c)
        for (std::size_t d = 0; d < k2.freq_taps(); ++d)
          taps[(a + c) * nf + (b + d)] += v * k2.taps()[c * k2.freq_taps() + d];
    }
  return Kernel(nt, nf, std::move(taps));
}

std::vector<cplx> KernelDft(const Kernel& kernel, std::size_t frames, std::size_t channels) {
  Require(kernel.time_taps() <= frames && kernel.freq_taps() <= channels,
          "kernel larger than the grid");
  std::vector<cplx> grid(frames * channels);
  const long N = static_cast<long>(frames), M = static_cast<long>(channels);
  for (long i = -kernel.time_radius(); i <= kernel.time_radius(); ++i)
    for (long j = -kernel.freq_radius(); j <= kernel.freq_radius(); ++j) {
      std::size_t r = static_cast<std::size_t>(((i % N) + N) % N);
      std::size_t c = static_cast<std::size_t>(((j % M) + M) % M);
      grid[r * channels + c] += kernel.at(i, j);
    }
  fft::Forward2D(grid, frames, channels);
  return grid;
}

double KernelDftMin(const Kernel& kernel, std::size_t frames, std::size_t channels) {
  auto dft = KernelDft(kernel, frames, channels);
  double lo = INFINITY;
  for (const auto& v : dft) lo = std::min(lo, v.real());
  return lo;
}

namespace {

// Gathers sum_{i,j} k(i, j) tf[n - i, m - j] for one output bin. Shared by the
// constant and position-dependent paths so both sum in the same order.
inline cplx GatherBin(const TfMatrix& tf, const Kernel& k, long n, long m,
                      bool circular_time) {
  const long N = static_cast<long>(tf.frames()), M = static_cast<long>(tf.channels());
  const long rt = k.time_radius(), rf = k.freq_radius();
  cplx acc{};
  for (long i = -rt; i <= rt; ++i) {
    long src_n = n - i;
    if (src_n < 0 || src_n >= N) {
      if (!circular_time) continue;
      src_n = ((src_n % N) + N) % N;
    }
    const cplx* row = tf.coeffs.data() + static_cast<std::size_t>(src_n) * tf.channels();
    for (long j = -rf; j <= rf; ++j) {
      double w = k.at(i, j);
      if (w == 0.0) continue;
      long src_m = m - j;
      if (src_m < 0 || src_m >= M) src_m = ((src_m % M) + M) % M;
      acc += w * row[src_m];
    }
  }
  return acc;
}

}  // namespace

TfMatrix ConvolveTf(const TfMatrix& tf, const Kernel& kernel, BoundaryMode time_mode) {
  TfMatrix out(tf.lattice, tf.sample_rate);
  const bool circular = time_mode == BoundaryMode::kCircular;
  for (std::size_t n = 0; n < tf.frames(); ++n)
    for (std::size_t m = 0; m < tf.channels(); ++m)
      out.at(n, m) = GatherBin(tf, kernel, static_cast<long>(n), static_cast<long>(m), circular);
  return out;
}

KernelField::KernelField(const Lattice& lattice, Kernel constant)
    : lattice_(lattice), constant_(std::move(constant)) {}

KernelField::KernelField(const Lattice& lattice, std::vector<Kernel> per_bin)
    : lattice_(lattice), per_bin_(std::move(per_bin)) {
  Require(per_bin_.size() == lattice_.num_frames() * lattice_.channels,
          "kernel field size does not match the lattice grid");
}

KernelField ConstantField(const Kernel& kernel, const Lattice& lattice) {
  return KernelField(lattice, kernel);
}

KernelField MaskField(std::span<const double> mask, const Lattice& lattice) {
  Require(mask.size() == lattice.num_frames() * lattice.channels,
          "mask shape does not match the lattice grid");
  std::vector<Kernel> kernels;
  kernels.reserve(mask.size());
  for (double v : mask) kernels.emplace_back(1, 1, std::vector<double>{v});
  return KernelField(lattice, std::move(kernels));
}

TfMatrix ApplyField(const TfMatrix& tf, const KernelField& field, BoundaryMode time_mode) {
  Require(field.lattice() == tf.lattice, "kernel field lattice does not match grid");
  TfMatrix out(tf.lattice, tf.sample_rate);
  const bool circular = time_mode == BoundaryMode::kCircular;
  for (std::size_t n = 0; n < tf.frames(); ++n)
    for (std::size_t m = 0; m < tf.channels(); ++m)
      out.at(n, m) = GatherBin(tf, field.at(n, m), static_cast<long>(n),
                               static_cast<long>(m), circular);
  return out;
}

}  // namespace tfblur

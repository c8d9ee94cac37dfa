#include "tfblur/gabor.h"

#include <cmath>
#include <numbers>

#include "tfblur/error.h"

namespace tfblur {
namespace {

// exp(sign * 2 pi i k / M) for k in [0, M).
std::vector<cplx> Twiddles(std::size_t m, double sign) {
  std::vector<cplx> w(m);
  for (std::size_t k = 0; k < m; ++k) {
    double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                   static_cast<double>(m);
    w[k] = {std::cos(angle), std::sin(angle)};
  }
  return w;
}

void CheckWindow(const Window& window, const Lattice& lattice) {
  Require(window.size() == lattice.window_len,
          "window length " + std::to_string(window.size()) +
              " does not match lattice window length " +
              std::to_string(lattice.window_len));
  for (const auto& v : window.values)
    Require(std::isfinite(v.real()) && std::isfinite(v.imag()),
            "window has non-finite values");
}

}  // namespace

const char* BoundaryModeName(BoundaryMode mode) {
  return mode == BoundaryMode::kCircular ? "circular" : "zeropad";
}

BoundaryMode ParseBoundaryMode(const std::string& name) {
  if (name == "circular") return BoundaryMode::kCircular;
  if (name == "zeropad") return BoundaryMode::kZeroPad;
  Fail(ErrorCode::kInvalidArgument, "unknown boundary mode '" + name + "'");
}

void Lattice::Validate() const {
  Require(hop >= 1, "hop must be positive");
  Require(window_len >= 1, "window length must be positive");
  Require(window_len <= channels,
          "window length " + std::to_string(window_len) + " exceeds channel count " +
              std::to_string(channels) + " (painless condition)");
  Require(hop <= window_len, "hop exceeds window length");
  Require(channels <= signal_len, "channel count exceeds signal length");
  if (mode == BoundaryMode::kCircular)
    Require(signal_len % hop == 0,
            "hop " + std::to_string(hop) + " does not divide signal length " +
                std::to_string(signal_len) + " in circular mode");
}

double Window::Norm() const {
  double e = 0.0;
  for (const auto& v : values) e += std::norm(v);
  return std::sqrt(e);
}

Window Window::Custom(std::vector<cplx> values) {
  Window w;
  w.values = std::move(values);
  w.kind = WindowKind::kCustom;
  return w;
}

WindowKind ParseWindowKind(const std::string& name) {
  if (name == "gaussian") return WindowKind::kGaussian;
  if (name == "hann") return WindowKind::kHann;
  if (name == "custom") return WindowKind::kCustom;
  Fail(ErrorCode::kInvalidArgument, "unknown window kind '" + name + "'");
}

Window MakeWindow(WindowKind kind, std::size_t length, double width) {
  Require(length >= 1, "window length must be at least 1");
  Window w;
  w.kind = kind;
  w.values.resize(length);
  const double centre = (static_cast<double>(length) - 1.0) / 2.0;
  switch (kind) {
    case WindowKind::kGaussian: {
      double lambda = width > 0 ? width : static_cast<double>(length) / 4.0;
      for (std::size_t t = 0; t < length; ++t) {
        double x = (static_cast<double>(t) - centre) / lambda;
        w.values[t] = std::exp(-std::numbers::pi * x * x);
      }
      break;
    }
    case WindowKind::kHann:
      if (length == 1) {
        w.values[0] = 1.0;
        break;
      }
      for (std::size_t t = 0; t < length; ++t) {
        w.values[t] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                           static_cast<double>(t) /
                                           static_cast<double>(length - 1));
      }
      break;
    case WindowKind::kCustom:
      Fail(ErrorCode::kInvalidArgument, "custom windows are built from values");
  }
  return w;
}

double TfMatrix::Norm() const {
  double e = 0.0;
  for (const auto& c : coeffs) e += std::norm(c);
  return std::sqrt(e);
}

TfMatrix Stft(const Signal& signal, const Window& window, const Lattice& lattice) {
  lattice.Validate();
  CheckWindow(window, lattice);
  Require(signal.length() == lattice.signal_len,
          "signal length " + std::to_string(signal.length()) +
              " does not match lattice length " + std::to_string(lattice.signal_len));

  const std::size_t L = lattice.signal_len, a = lattice.hop, M = lattice.channels,
                    W = lattice.window_len, N = lattice.num_frames();
  const bool circular = lattice.mode == BoundaryMode::kCircular;
  const auto phase = Twiddles(M, -1.0);

  TfMatrix tf(lattice, signal.sample_rate);
  std::vector<cplx> buf(M);
  for (std::size_t n = 0; n < N; ++n) {
    std::fill(buf.begin(), buf.end(), cplx{});
    const std::size_t start = n * a;
    for (std::size_t s = 0; s < W; ++s) {
      std::size_t t = start + s;
      if (t >= L) {
        if (!circular) break;
        t %= L;
      }
      buf[s] = signal.samples[t] * std::conj(window.values[s]);
    }
    fft::Forward(buf);
    // Frame-start phase exp(-2 pi i m n a / M), index reduced exactly mod M.
    const std::size_t shift = start % M;
    for (std::size_t m = 0; m < M; ++m) tf.at(n, m) = buf[m] * phase[(m * shift) % M];
  }
  return tf;
}

Signal Synthesize(const TfMatrix& tf, const Window& window, const Lattice& lattice) {
  lattice.Validate();
  CheckWindow(window, lattice);
  Require(tf.lattice == lattice && tf.coeffs.size() == lattice.num_frames() * lattice.channels,
          "coefficient grid does not match lattice");

  const std::size_t L = lattice.signal_len, a = lattice.hop, M = lattice.channels,
                    W = lattice.window_len, N = lattice.num_frames();
  const bool circular = lattice.mode == BoundaryMode::kCircular;
  const auto phase = Twiddles(M, +1.0);

  Signal out;
  out.sample_rate = tf.sample_rate;
  out.is_complex = true;
  out.samples.assign(L, cplx{});
  std::vector<cplx> buf(M);
  for (std::size_t n = 0; n < N; ++n) {
    const std::size_t start = n * a;
    const std::size_t shift = start % M;
    for (std::size_t m = 0; m < M; ++m) buf[m] = tf.at(n, m) * phase[(m * shift) % M];
    fft::Inverse(buf);
    for (std::size_t s = 0; s < W; ++s) {
      std::size_t t = start + s;
      if (t >= L) {
        if (!circular) break;
        t %= L;
      }
      out.samples[t] += window.values[s] * buf[s];
    }
  }
  return out;
}

std::vector<double> FrameDiagonal(const Window& window, const Lattice& lattice) {
  lattice.Validate();
  CheckWindow(window, lattice);
  std::vector<double> diag(lattice.hop, 0.0);
  for (std::size_t s = 0; s < window.size(); ++s)
    diag[s % lattice.hop] += std::norm(window.values[s]);
  return diag;
}

namespace {

Window ScaleByDiagonal(const Window& window, const Lattice& lattice, bool tight) {
  const auto diag = FrameDiagonal(window, lattice);
  const double M = static_cast<double>(lattice.channels);
  for (std::size_t r = 0; r < diag.size(); ++r) {
    if (!(diag[r] > 0.0))
      Fail(ErrorCode::kNotAFrame,
           "frame diagonal vanishes at residue " + std::to_string(r));
  }
  Window out;
  out.kind = WindowKind::kCustom;
  out.values.resize(window.size());
  for (std::size_t s = 0; s < window.size(); ++s) {
    double d = M * diag[s % lattice.hop];
    out.values[s] = window.values[s] / (tight ? std::sqrt(d) : d);
  }
  return out;
}

}  // namespace

Window DualWindow(const Window& window, const Lattice& lattice) {
  return ScaleByDiagonal(window, lattice, false);
}

Window TightWindow(const Window& window, const Lattice& lattice) {
  return ScaleByDiagonal(window, lattice, true);
}

TfMatrix GaborProject(const TfMatrix& tf, const Window& window, const Lattice& lattice) {
  Window dual = DualWindow(window, lattice);
  return Stft(Synthesize(tf, dual, lattice), window, lattice);
}

double MoyalConstant(const Lattice& lattice) {
  return static_cast<double>(lattice.channels) / static_cast<double>(lattice.hop);
}

cplx InnerProduct(std::span<const cplx> x, std::span<const cplx> y) {
  Require(x.size() == y.size(), "inner product of vectors with different lengths");
  cplx acc{};
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * std::conj(y[i]);
  return acc;
}

MoyalResult MoyalCheck(const Signal& psi1, const Signal& psi2, const Window& phi1,
                       const Window& phi2, const Lattice& lattice) {
  if (lattice.mode != BoundaryMode::kCircular)
    Fail(ErrorCode::kUnsupported, "Moyal identity is only exact in circular mode");
  const TfMatrix v1 = Stft(psi1, phi1, lattice);
  const TfMatrix v2 = Stft(psi2, phi2, lattice);
  const double c = MoyalConstant(lattice);
  MoyalResult r;
  r.lhs = InnerProduct(v1.coeffs, v2.coeffs);
  r.rhs = c * InnerProduct(psi1.samples, psi2.samples) *
          std::conj(InnerProduct(phi1.values, phi2.values));
  double scale = c * psi1.Norm() * psi2.Norm() * phi1.Norm() * phi2.Norm();
  r.residual = std::abs(r.lhs - r.rhs) / (scale > 0 ? scale : 1.0);
  return r;
}

}  // namespace tfblur

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tfblur/fft.h"
#include "tfblur/signal.h"

namespace tfblur {

// How the analysis reaches past the end of the signal. Circular treats the
// signal as living on Z_L (every identity is exact there); zeropad treats
// samples beyond L as zero and drops synthesized samples beyond L.
enum class BoundaryMode { kCircular, kZeroPad };

const char* BoundaryModeName(BoundaryMode mode);
BoundaryMode ParseBoundaryMode(const std::string& name);

// Sampling lattice. Frame n starts at sample n * hop, the window origin is its
// first sample and the DFT has `channels` bins covering [0, channels).
struct Lattice {
  std::size_t signal_len = 0;
  std::size_t hop = 1;
  std::size_t channels = 1;
  std::size_t window_len = 1;
  BoundaryMode mode = BoundaryMode::kCircular;

  std::size_t num_frames() const {
    return hop == 0 ? 0 : (signal_len + hop - 1) / hop;
  }
  // Throws kInvalidArgument unless W <= M, a <= W, M <= L, and a | L in
  // circular mode.
  void Validate() const;

  bool operator==(const Lattice&) const = default;
};

enum class WindowKind { kGaussian, kHann, kCustom };

struct Window {
  std::vector<cplx> values;
  WindowKind kind = WindowKind::kCustom;

  std::size_t size() const { return values.size(); }
  double Norm() const;

  static Window Custom(std::vector<cplx> values);
};

WindowKind ParseWindowKind(const std::string& name);

// gaussian: exp(-pi ((t - (W-1)/2) / width)^2), peak 1 at the centre.
// hann: symmetric taper 0.5 - 0.5 cos(2 pi t / (W - 1)); W == 1 gives [1].
// `width` is only read for gaussian windows; 0 selects W / 4.
Window MakeWindow(WindowKind kind, std::size_t length, double width = 0.0);

// Complex coefficient grid, frames x channels, row-major frames first.
struct TfMatrix {
  Lattice lattice;
  int sample_rate = 16000;
  std::vector<cplx> coeffs;

  TfMatrix() = default;
  explicit TfMatrix(const Lattice& lat, int sr = 16000)
      : lattice(lat),
        sample_rate(sr),
        coeffs(lat.num_frames() * lat.channels) {}

  std::size_t frames() const { return lattice.num_frames(); }
  std::size_t channels() const { return lattice.channels; }
  cplx& at(std::size_t n, std::size_t m) { return coeffs[n * lattice.channels + m]; }
  const cplx& at(std::size_t n, std::size_t m) const {
    return coeffs[n * lattice.channels + m];
  }
  double Norm() const;
};

// coeffs[n, m] = sum_t psi(t) conj(phi(t - n a)) exp(-2 pi i m t / M), with t
// running over the frame support n a .. n a + W - 1. Samples are read
// circularly or as zero beyond L according to the lattice mode.
TfMatrix Stft(const Signal& signal, const Window& window, const Lattice& lattice);

// psi(t) = sum_{n,m} F[n, m] phi(t - n a) exp(2 pi i m t / M); the exact
// adjoint of Stft for the same window and lattice.
Signal Synthesize(const TfMatrix& tf, const Window& window, const Lattice& lattice);

// Sum_k |phi(r + k a)|^2 for every residue r in [0, a).
std::vector<double> FrameDiagonal(const Window& window, const Lattice& lattice);

// Canonical dual phi / (M * diag) of a painless frame. Throws kNotAFrame if
// the diagonal vanishes anywhere.
Window DualWindow(const Window& window, const Lattice& lattice);

// phi / sqrt(M * diag): analysis and synthesis with the result reconstruct
// exactly and the frame bounds are 1.
Window TightWindow(const Window& window, const Lattice& lattice);

// Stft(Synthesize(tf, dual(phi)), phi). With a tight window this is the
// orthogonal projection onto the range of the analysis map.
TfMatrix GaborProject(const TfMatrix& tf, const Window& window, const Lattice& lattice);

// Constant c in <V_{phi1} psi1, V_{phi2} psi2> = c <psi1, psi2> conj(<phi1, phi2>)
// on a painless lattice: M / a.
double MoyalConstant(const Lattice& lattice);

struct MoyalResult {
  cplx lhs;         // <V_{phi1} psi1, V_{phi2} psi2>
  cplx rhs;         // c <psi1, psi2> conj(<phi1, phi2>)
  double residual;  // |lhs - rhs| / (c |psi1| |psi2| |phi1| |phi2|)
};

// Circular mode only; zeropad throws kUnsupported.
MoyalResult MoyalCheck(const Signal& psi1, const Signal& psi2, const Window& phi1,
                       const Window& phi2, const Lattice& lattice);

cplx InnerProduct(std::span<const cplx> x, std::span<const cplx> y);

}  // namespace tfblur

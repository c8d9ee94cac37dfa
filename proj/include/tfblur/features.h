#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "tfblur/gabor.h"
#include "tfblur/kernels.h"
#include "tfblur/signal.h"

namespace tfblur {

enum class SpecScale { kPower, kDb };

// Real frames x bins grid (bins are DFT channels or mel bands).
struct Spectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<double> values;
  SpecScale scale = SpecScale::kPower;
  double floor_power = 0.0;  // dB grids: the clamp used by LogMel
  Lattice lattice;           // source analysis lattice
  int sample_rate = 16000;
  bool mel = false;

  double& at(std::size_t n, std::size_t k) { return values[n * bins + k]; }
  double at(std::size_t n, std::size_t k) const { return values[n * bins + k]; }
  double Mean() const;
  double Min() const;
  double Max() const;
};

// |coeffs|^2 over all M channels.
Spectrogram PowerSpectrogram(const TfMatrix& tf);

// Channels 0 .. M/2 of a full-channel power spectrogram (display / mel view).
Spectrogram HalfSpectrum(const Spectrogram& spec);

double HzToMel(double hz);
double MelToHz(double mel);

// Triangular filters on the HTK mel scale, n_mels + 2 equally spaced edges
// from fmin to fmax, weights evaluated at bin centres k * sr / M for
// k = 0 .. M/2. Each filter is stored as a dense run starting at first_bin.
struct MelFilterbank {
  int sample_rate = 16000;
  std::size_t channels = 0;  // DFT size M
  std::size_t n_mels = 0;
  double fmin = 0.0;
  double fmax = 0.0;
  bool l1_normalized = false;
  std::vector<std::size_t> first_bin;
  std::vector<std::vector<double>> weights;

  std::size_t num_bins() const { return channels / 2 + 1; }
  double Weight(std::size_t mel, std::size_t bin) const;
};

MelFilterbank MakeMelFilterbank(int sample_rate, std::size_t channels, std::size_t n_mels,
                                double fmin, double fmax, bool l1_normalize = false);

// Shared, synchronized cache keyed by all constructor arguments.
std::shared_ptr<const MelFilterbank> CachedMelFilterbank(int sample_rate,
                                                         std::size_t channels,
                                                         std::size_t n_mels, double fmin,
                                                         double fmax, bool l1_normalize);

// 10 log10(max(fb . column, floor)) per frame. Input is a power spectrogram
// over the half spectrum (M/2 + 1 bins).
Spectrogram LogMel(const Spectrogram& spec, const MelFilterbank& fb, double floor = 1e-10);

// Affine rescale to [0, 1]; a constant grid maps to all zeros.
Spectrogram Normalize01(const Spectrogram& spec);

enum class GridBoundary { kCircular, kZero, kReplicate };

GridBoundary ParseGridBoundary(const std::string& name);
const char* GridBoundaryName(GridBoundary b);

// SpecBlur: real 2D convolution out[n, k] = sum k(i, j) in[n - i, k - j] on
// whatever scale the grid carries. Out-of-range reads follow `boundary` on
// both axes.
Spectrogram SpecBlur(const Spectrogram& spec, const Kernel& kernel,
                     GridBoundary boundary = GridBoundary::kCircular);

// Log-mel front end used by the pipeline and CLI.
struct FeatureConfig {
  int sample_rate = 16000;
  WindowKind window = WindowKind::kHann;
  std::size_t window_len = 1024;
  std::size_t hop = 256;
  std::size_t channels = 1024;
  std::size_t n_mels = 256;
  double fmin = 0.0;
  double fmax = 0.0;  // 0 selects sample_rate / 2
  double floor = 1e-10;
  bool mel_l1_norm = false;
  double pad_seconds = 1.0;  // shorter clips are zero-padded; 0 disables
  bool normalize_01 = false;

  Lattice LatticeFor(std::size_t signal_len) const;
  double EffectiveFmax() const { return fmax > 0 ? fmax : sample_rate / 2.0; }
};

// Zero-padded STFT -> power -> half spectrum -> log-mel (no padding, no
// normalization; callers decide).
Spectrogram ComputeLogMel(const Signal& signal, const FeatureConfig& config);

}  // namespace tfblur

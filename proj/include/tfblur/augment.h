#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "tfblur/features.h"
#include "tfblur/kernels.h"
#include "tfblur/operators.h"
#include "tfblur/signal.h"

namespace tfblur {

// Deterministic random stream addressed by (master seed, item, step, epoch).
struct RngStream {
  std::uint64_t master_seed = 0;
  std::string item_id;
  std::uint64_t step_index = 0;
  std::uint64_t epoch = 0;
  std::uint64_t seed = 0;  // derived

  std::mt19937_64 Engine() const { return std::mt19937_64(seed); }
};

RngStream DeriveRng(std::uint64_t master_seed, const std::string& item_id,
                    std::uint64_t step_index, std::uint64_t epoch = 0);

struct WhiteNoiseStep {
  double snr_db = 20.0;  // +infinity disables the step
};

// Waveform-domain blur on a circular lattice built for the padded length.
struct StftBlurStep {
  WindowKind window = WindowKind::kHann;
  std::size_t window_len = 512;
  double window_width = 0.0;
  std::size_t hop = 128;
  std::size_t channels = 640;
  SynthesisChoice synthesis = SynthesisChoice::kDual;
  Kernel kernel = GaussianKernel(2.0, 4.0);
  bool renormalize = true;

  BlurSpec SpecFor(std::size_t signal_len) const;
};

enum class MaskFill { kMean, kZero };

// Mean fill replaces each band with the mean of the values it covers.
struct SpecAugmentStep {
  std::size_t n_time_masks = 2;
  std::size_t max_time_width = 8;
  std::size_t n_freq_masks = 2;
  std::size_t max_freq_width = 24;
  MaskFill fill = MaskFill::kMean;
};

struct SpecBlurStep {
  Kernel kernel = GaussianKernel(1.0, 2.0);
  GridBoundary boundary = GridBoundary::kReplicate;
};

using AugmentStep = std::variant<WhiteNoiseStep, StftBlurStep, SpecAugmentStep, SpecBlurStep>;

bool IsWaveformStep(const AugmentStep& step);
const char* StepName(const AugmentStep& step);

enum class ReplayMode { kFixed, kPerEpoch };

struct AugmentConfig {
  std::vector<AugmentStep> steps;
  std::uint64_t master_seed = 0;
  ReplayMode replay = ReplayMode::kFixed;
  FeatureConfig features;

  // Waveform steps must precede feature steps; mel mask widths must fit.
  void Validate() const;
};

// output = signal + n with n Gaussian, scaled so 10 log10(|s|^2 / |n|^2) equals
// snr_db exactly.
Signal AddWhiteNoise(const Signal& signal, double snr_db, const RngStream& rng);

Spectrogram SpecAugment(const Spectrogram& logmel, const SpecAugmentStep& params,
                        const RngStream& rng);

// pad -> waveform steps -> log-mel -> feature steps -> optional 0-1 scaling.
// `epoch` only enters the random streams in per-epoch replay mode.
Spectrogram RunPipeline(const Signal& signal, const AugmentConfig& config,
                        const std::string& item_id, std::uint64_t epoch = 0);

}  // namespace tfblur

#include "tfblur/augment.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tfblur/error.h"

namespace tfblur {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t Fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t UniformIndex(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

RngStream DeriveRng(std::uint64_t master_seed, const std::string& item_id,
                    std::uint64_t step_index, std::uint64_t epoch) {
  RngStream r{master_seed, item_id, step_index, epoch, 0};
  std::uint64_t h = SplitMix64(master_seed);
  h = SplitMix64(h ^ Fnv1a(item_id));
  h = SplitMix64(h ^ step_index);
  h = SplitMix64(h ^ epoch);
  r.seed = h;
  return r;
}

BlurSpec StftBlurStep::SpecFor(std::size_t signal_len) const {
  BlurSpec spec;
  spec.window = MakeWindow(window, window_len, window_width);
  spec.synthesis = synthesis;
  spec.kernel = kernel;
  spec.lattice = Lattice{signal_len, hop, channels, window_len, BoundaryMode::kCircular};
  spec.renormalize_energy = renormalize;
  return spec;
}

bool IsWaveformStep(const AugmentStep& step) {
  return std::holds_alternative<WhiteNoiseStep>(step) ||
         std::holds_alternative<StftBlurStep>(step);
}

const char* StepName(const AugmentStep& step) {
  return std::visit(Overloaded{
                        [](const WhiteNoiseStep&) { return "white_noise"; },
                        [](const StftBlurStep&) { return "stft_blur"; },
                        [](const SpecAugmentStep&) { return "spec_augment"; },
                        [](const SpecBlurStep&) { return "spec_blur"; },
                    },
                    step);
}

void AugmentConfig::Validate() const {
  bool seen_feature_step = false;
  for (const auto& step : steps) {
    if (IsWaveformStep(step)) {
      Require(!seen_feature_step, std::string("waveform step '") + StepName(step) +
                                      "' follows a feature step");
    } else {
      seen_feature_step = true;
    }
    if (const auto* sa = std::get_if<SpecAugmentStep>(&step))
      Require(sa->max_freq_width <= features.n_mels,
              "frequency mask width exceeds mel band count");
    if (const auto* wn = std::get_if<WhiteNoiseStep>(&step))
      Require(!std::isnan(wn->snr_db), "white-noise SNR is NaN");
  }
  Require(features.sample_rate > 0, "feature sample rate must be positive");
  Require(features.pad_seconds >= 0, "pad length must be nonnegative");
}

Signal AddWhiteNoise(const Signal& signal, double snr_db, const RngStream& rng) {
  if (snr_db == std::numeric_limits<double>::infinity()) return signal;
  Require(std::isfinite(snr_db), "SNR must be finite or +infinity");
  const double energy = signal.Energy();
  Require(energy > 0, "white noise at finite SNR needs a nonzero signal");

  auto engine = rng.Engine();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<cplx> noise(signal.length());
  double noise_energy = 0.0;
  for (auto& v : noise) {
    v = signal.is_complex ? cplx(normal(engine), normal(engine)) : cplx(normal(engine), 0.0);
    noise_energy += std::norm(v);
  }
  Require(noise_energy > 0, "degenerate noise draw");
  const double target = energy * std::pow(10.0, -snr_db / 10.0);
  const double scale = std::sqrt(target / noise_energy);
  Signal out = signal;
  for (std::size_t t = 0; t < out.length(); ++t) out.samples[t] += scale * noise[t];
  return out;
}

Spectrogram SpecAugment(const Spectrogram& logmel, const SpecAugmentStep& p,
                        const RngStream& rng) {
  Spectrogram out = logmel;
  if (out.values.empty()) return out;
  auto engine = rng.Engine();
  const std::size_t T = out.frames, F = out.bins;
  Require(p.max_time_width <= T && p.max_freq_width <= F, "mask width exceeds grid");

  auto fill_band = [&](std::size_t t0, std::size_t t1, std::size_t f0, std::size_t f1) {
    double value = 0.0;
    if (p.fill == MaskFill::kMean) {
      double sum = 0.0;
      for (std::size_t t = t0; t < t1; ++t)
        for (std::size_t f = f0; f < f1; ++f) sum += out.at(t, f);
      value = sum / static_cast<double>((t1 - t0) * (f1 - f0));
    }
    for (std::size_t t = t0; t < t1; ++t)
      for (std::size_t f = f0; f < f1; ++f) out.at(t, f) = value;
  };

  for (std::size_t i = 0; i < p.n_time_masks; ++i) {
    std::size_t width = UniformIndex(engine, 0, p.max_time_width);
    std::size_t start = UniformIndex(engine, 0, T - width);
    if (width > 0) fill_band(start, start + width, 0, F);
  }
  for (std::size_t i = 0; i < p.n_freq_masks; ++i) {
    std::size_t width = UniformIndex(engine, 0, p.max_freq_width);
    std::size_t start = UniformIndex(engine, 0, F - width);
    if (width > 0) fill_band(0, T, start, start + width);
  }
  return out;
}

Spectrogram RunPipeline(const Signal& signal, const AugmentConfig& config,
                        const std::string& item_id, std::uint64_t epoch) {
  config.Validate();
  CheckSignal(signal);
  Require(signal.sample_rate == config.features.sample_rate,
          "signal sample rate " + std::to_string(signal.sample_rate) +
              " differs from configured " + std::to_string(config.features.sample_rate));
  const std::uint64_t stream_epoch = config.replay == ReplayMode::kPerEpoch ? epoch : 0;

  Signal wave = signal;
  if (config.features.pad_seconds > 0) {
    auto target = static_cast<std::size_t>(
        std::llround(config.features.pad_seconds * config.features.sample_rate));
    if (wave.length() < target) wave = PadToLength(wave, target);
  }

  std::size_t index = 0;
  for (; index < config.steps.size() && IsWaveformStep(config.steps[index]); ++index) {
    const RngStream rng = DeriveRng(config.master_seed, item_id, index, stream_epoch);
    const auto& step = config.steps[index];
    if (const auto* wn = std::get_if<WhiteNoiseStep>(&step)) {
      wave = AddWhiteNoise(wave, wn->snr_db, rng);
    } else {
      const auto& sb = std::get<StftBlurStep>(step);
      // Circular lattices need a | L and M | L; other lengths get trailing
      // zeros for the blur and are cropped back afterwards.
      const std::size_t len = wave.length();
      const std::size_t block = std::lcm(sb.hop, sb.channels);
      const double norm_in = wave.Norm();
      Signal work = wave;
      work.samples.resize(std::max(block, (len + block - 1) / block * block), cplx{});
      work = Blur(work, sb.SpecFor(work.length()));
      work.samples.resize(len);
      for (auto& v : work.samples) v = v.real();
      work.is_complex = false;
      wave = std::move(work);
      if (sb.renormalize && len % block != 0) {
        const double n = wave.Norm();
        if (n > 0)
          for (auto& v : wave.samples) v *= norm_in / n;
      }
    }
  }

  Spectrogram feats = ComputeLogMel(wave, config.features);

  for (; index < config.steps.size(); ++index) {
    const RngStream rng = DeriveRng(config.master_seed, item_id, index, stream_epoch);
    const auto& step = config.steps[index];
    if (const auto* sa = std::get_if<SpecAugmentStep>(&step)) {
      feats = SpecAugment(feats, *sa, rng);
    } else {
      const auto& sb = std::get<SpecBlurStep>(step);
      feats = SpecBlur(feats, sb.kernel, sb.boundary);
    }
  }
  if (config.features.normalize_01) feats = Normalize01(feats);
  return feats;
}

}  // namespace tfblur

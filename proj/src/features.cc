#include "tfblur/features.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

#include "tfblur/error.h"

namespace tfblur {

double Spectrogram::Mean() const {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double Spectrogram::Min() const { return *std::min_element(values.begin(), values.end()); }
double Spectrogram::Max() const { return *std::max_element(values.begin(), values.end()); }

Spectrogram PowerSpectrogram(const TfMatrix& tf) {
  Spectrogram s;
  s.frames = tf.frames();
  s.bins = tf.channels();
  s.lattice = tf.lattice;
  s.sample_rate = tf.sample_rate;
  s.values.resize(tf.coeffs.size());
  for (std::size_t i = 0; i < tf.coeffs.size(); ++i) s.values[i] = std::norm(tf.coeffs[i]);
  return s;
}

Spectrogram HalfSpectrum(const Spectrogram& spec) {
  Require(!spec.mel && spec.bins == spec.lattice.channels,
          "half spectrum needs a full-channel spectrogram");
  Spectrogram out = spec;
  out.bins = spec.bins / 2 + 1;
  out.values.resize(out.frames * out.bins);
  for (std::size_t n = 0; n < spec.frames; ++n)
    for (std::size_t k = 0; k < out.bins; ++k) out.at(n, k) = spec.at(n, k);
  return out;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

double MelFilterbank::Weight(std::size_t mel, std::size_t bin) const {
  std::size_t first = first_bin[mel];
  if (bin < first || bin >= first + weights[mel].size()) return 0.0;
  return weights[mel][bin - first];
}

MelFilterbank MakeMelFilterbank(int sample_rate, std::size_t channels, std::size_t n_mels,
                                double fmin, double fmax, bool l1_normalize) {
  Require(sample_rate > 0, "sample rate must be positive");
  Require(channels >= 2, "need at least two DFT channels");
  Require(n_mels >= 1, "need at least one mel band");
  Require(fmin >= 0 && fmin < fmax && fmax <= sample_rate / 2.0,
          "mel band must satisfy 0 <= fmin < fmax <= sr / 2");

  MelFilterbank fb;
  fb.sample_rate = sample_rate;
  fb.channels = channels;
  fb.n_mels = n_mels;
  fb.fmin = fmin;
  fb.fmax = fmax;
  fb.l1_normalized = l1_normalize;

  const double mel_lo = HzToMel(fmin), mel_hi = HzToMel(fmax);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                    static_cast<double>(n_mels + 1));
  edges.front() = fmin;
  edges.back() = fmax;

  const std::size_t bins = fb.num_bins();
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(channels);
  for (std::size_t j = 0; j < n_mels; ++j) {
    const double lo = edges[j], centre = edges[j + 1], hi = edges[j + 2];
    std::vector<double> row;
    std::size_t first = bins;
    for (std::size_t k = 0; k < bins; ++k) {
      double f = static_cast<double>(k) * bin_hz;
      double w = 0.0;
      if (f > lo && f <= centre) w = (f - lo) / (centre - lo);
      else if (f > centre && f < hi) w = (hi - f) / (hi - centre);
      if (w <= 0.0) {
        if (first != bins) break;
        continue;
      }
      if (first == bins) first = k;
      row.push_back(w);
    }
    if (first == bins) first = 0;  // empty filter: narrower than a bin
    if (l1_normalize) {
      double s = std::accumulate(row.begin(), row.end(), 0.0);
      if (s > 0)
        for (double& w : row) w /= s;
    }
    fb.first_bin.push_back(first);
    fb.weights.push_back(std::move(row));
  }
  return fb;
}

std::shared_ptr<const MelFilterbank> CachedMelFilterbank(int sample_rate, std::size_t channels,
                                                         std::size_t n_mels, double fmin,
                                                         double fmax, bool l1_normalize) {
  using Key = std::tuple<int, std::size_t, std::size_t, double, double, bool>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const MelFilterbank>> cache;
  Key key{sample_rate, channels, n_mels, fmin, fmax, l1_normalize};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto fb = std::make_shared<const MelFilterbank>(
      MakeMelFilterbank(sample_rate, channels, n_mels, fmin, fmax, l1_normalize));
  cache.emplace(key, fb);
  return fb;
}

Spectrogram LogMel(const Spectrogram& spec, const MelFilterbank& fb, double floor) {
  Require(spec.scale == SpecScale::kPower && !spec.mel, "log-mel needs a power spectrogram");
  Require(spec.bins == fb.num_bins(), "spectrogram bins (" + std::to_string(spec.bins) +
                                          ") do not match filterbank (" +
                                          std::to_string(fb.num_bins()) + ")");
  Require(floor > 0, "dB floor must be positive");
  Spectrogram out;
  out.frames = spec.frames;
  out.bins = fb.n_mels;
  out.scale = SpecScale::kDb;
  out.floor_power = floor;
  out.lattice = spec.lattice;
  out.sample_rate = spec.sample_rate;
  out.mel = true;
  out.values.resize(out.frames * out.bins);
  for (std::size_t n = 0; n < spec.frames; ++n) {
    const double* column = spec.values.data() + n * spec.bins;
    for (std::size_t j = 0; j < fb.n_mels; ++j) {
      double e = 0.0;
      const auto& w = fb.weights[j];
      for (std::size_t k = 0; k < w.size(); ++k) e += w[k] * column[fb.first_bin[j] + k];
      out.at(n, j) = 10.0 * std::log10(std::max(e, floor));
    }
  }
  return out;
}

Spectrogram Normalize01(const Spectrogram& spec) {
  Spectrogram out = spec;
  if (spec.values.empty()) return out;
  const double lo = spec.Min(), hi = spec.Max();
  if (hi == lo) {
    std::fill(out.values.begin(), out.values.end(), 0.0);
    return out;
  }
  for (double& v : out.values) v = (v - lo) / (hi - lo);
  return out;
}

GridBoundary ParseGridBoundary(const std::string& name) {
  if (name == "circular") return GridBoundary::kCircular;
  if (name == "zero") return GridBoundary::kZero;
  if (name == "replicate") return GridBoundary::kReplicate;
  Fail(ErrorCode::kInvalidArgument, "unknown grid boundary '" + name + "'");
}

const char* GridBoundaryName(GridBoundary b) {
  switch (b) {
    case GridBoundary::kCircular: return "circular";
    case GridBoundary::kZero: return "zero";
    case GridBoundary::kReplicate: return "replicate";
  }
  return "?";
}

Spectrogram SpecBlur(const Spectrogram& spec, const Kernel& kernel, GridBoundary boundary) {
  if (kernel.IsDelta()) return spec;
  Spectrogram out = spec;
  const long N = static_cast<long>(spec.frames), K = static_cast<long>(spec.bins);
  // Returns -1 for reads that fall on the zero extension.
  auto wrap = [boundary](long i, long n) -> long {
    if (i >= 0 && i < n) return i;
    switch (boundary) {
      case GridBoundary::kCircular: return ((i % n) + n) % n;
      case GridBoundary::kZero: return -1;
      case GridBoundary::kReplicate: return std::clamp(i, 0L, n - 1);
    }
    return -1;
  };
  for (long n = 0; n < N; ++n)
    for (long k = 0; k < K; ++k) {
      double acc = 0.0;
      for (long i = -kernel.time_radius(); i <= kernel.time_radius(); ++i) {
        long sn = wrap(n - i, N);
        if (sn < 0) continue;
        for (long j = -kernel.freq_radius(); j <= kernel.freq_radius(); ++j) {
          long sk = wrap(k - j, K);
          if (sk < 0) continue;
          acc += kernel.at(i, j) * spec.values[static_cast<std::size_t>(sn * K + sk)];
        }
      }
      out.values[static_cast<std::size_t>(n * K + k)] = acc;
    }
  return out;
}

Lattice FeatureConfig::LatticeFor(std::size_t signal_len) const {
  Lattice lat;
  lat.signal_len = signal_len;
  lat.hop = hop;
  lat.channels = channels;
  lat.window_len = window_len;
  lat.mode = BoundaryMode::kZeroPad;
  return lat;
}

Spectrogram ComputeLogMel(const Signal& signal, const FeatureConfig& config) {
  Lattice lat = config.LatticeFor(signal.length());
  Window w = MakeWindow(config.window, config.window_len);
  Spectrogram power = HalfSpectrum(PowerSpectrogram(Stft(signal, w, lat)));
  auto fb = CachedMelFilterbank(signal.sample_rate, config.channels, config.n_mels,
                                config.fmin, config.EffectiveFmax(), config.mel_l1_norm);
  return LogMel(power, *fb, config.floor);
}

}  // namespace tfblur

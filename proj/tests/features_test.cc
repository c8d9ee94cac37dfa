#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.h"
#include "test_util.h"
#include "tfblur/features.h"

namespace tfblur {
namespace {

Spectrogram RandomGrid(std::size_t frames, std::size_t bins, std::uint64_t seed, double lo = -80,
                       double hi = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(lo, hi);
  Spectrogram s;
  s.frames = frames;
  s.bins = bins;
  s.scale = SpecScale::kDb;
  s.values.resize(frames * bins);
  for (double& v : s.values) v = uni(rng);
  return s;
}

// Triangle weight from the definition, independent of the library's loop.
double OracleWeight(int sr, std::size_t M, std::size_t n_mels, double fmin, double fmax,
                    std::size_t j, std::size_t k) {
  auto mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto hz = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  auto edge = [&](std::size_t i) {
    if (i == 0) return fmin;
    if (i == n_mels + 1) return fmax;
    return hz(mel(fmin) + (mel(fmax) - mel(fmin)) * static_cast<double>(i) /
                               static_cast<double>(n_mels + 1));
  };
  const double f = static_cast<double>(k) * sr / static_cast<double>(M);
  const double lo = edge(j), c = edge(j + 1), hi = edge(j + 2);
  if (f > lo && f <= c) return (f - lo) / (c - lo);
  if (f > c && f < hi) return (hi - f) / (hi - c);
  return 0.0;
}

TEST(PowerSpectrogram, ModulusSquaredAndPhaseFree) {
  const Lattice lat{64, 4, 16, 16, BoundaryMode::kCircular};
  TfMatrix tf(lat);
  tf.coeffs = RandomSignal(tf.coeffs.size(), 1, true).samples;
  Spectrogram s = PowerSpectrogram(tf);
  EXPECT_EQ(s.frames, 16u);
  EXPECT_EQ(s.bins, 16u);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    EXPECT_EQ(s.values[i], std::norm(tf.coeffs[i]));
    sum += s.values[i];
  }
  EXPECT_NEAR(sum, tf.Norm() * tf.Norm(), 1e-12 * sum);

  TfMatrix rotated = tf;
  for (auto& v : rotated.coeffs) v *= std::polar(1.0, 0.7);
  Spectrogram r = PowerSpectrogram(rotated);
  for (std::size_t i = 0; i < s.values.size(); ++i) EXPECT_NEAR(r.values[i], s.values[i], 1e-12);

  TfMatrix zero(lat);
  for (double v : PowerSpectrogram(zero).values) EXPECT_EQ(v, 0.0);
  Spectrogram half = HalfSpectrum(s);
  EXPECT_EQ(half.bins, 9u);
  EXPECT_EQ(half.at(3, 8), s.at(3, 8));
}

TEST(Mel, HtkFormula) {
  EXPECT_DOUBLE_EQ(HzToMel(700.0), 2595.0 * std::log10(2.0));
  EXPECT_EQ(HzToMel(0.0), 0.0);
  for (double f : {10.0, 440.0, 7999.0}) EXPECT_NEAR(MelToHz(HzToMel(f)), f, 1e-9);
}

TEST(MelFilterbank, MatchesDefinition) {
  const int sr = 16000;
  const std::size_t M = 512, n_mels = 40;
  MelFilterbank fb = MakeMelFilterbank(sr, M, n_mels, 60.0, 7600.0);
  ASSERT_EQ(fb.num_bins(), 257u);
  for (std::size_t j = 0; j < n_mels; ++j)
    for (std::size_t k = 0; k < fb.num_bins(); ++k)
      ASSERT_NEAR(fb.Weight(j, k), OracleWeight(sr, M, n_mels, 60.0, 7600.0, j, k), 1e-12)
          << j << " " << k;
}

TEST(MelFilterbank, SupportCoverageAndDegenerateCase) {
  MelFilterbank fb = MakeMelFilterbank(16000, 1024, 256, 0.0, 8000.0);
  const double bin_hz = 16000.0 / 1024.0;
  for (std::size_t k = 0; k < fb.num_bins(); ++k) {
    double f = k * bin_hz, total = 0.0;
    for (std::size_t j = 0; j < 256; ++j) {
      double w = fb.Weight(j, k);
      EXPECT_GE(w, 0.0);
      total += w;
    }
    if (f > 0.0 && f < 8000.0) EXPECT_GT(total, 0.0) << "bin " << k;
  }
  MelFilterbank narrow = MakeMelFilterbank(16000, 1024, 10, 1000.0, 3000.0);
  for (std::size_t j = 0; j < 10; ++j)
    for (std::size_t k = 0; k < narrow.num_bins(); ++k)
      if (narrow.Weight(j, k) > 0) {
        EXPECT_GT(k * bin_hz, 1000.0);
        EXPECT_LT(k * bin_hz, 3000.0);
      }
  MelFilterbank one = MakeMelFilterbank(16000, 256, 1, 0.0, 8000.0);
  for (std::size_t k = 1; k < 128; ++k) EXPECT_GT(one.Weight(0, k), 0.0);
  EXPECT_EQ(one.Weight(0, 0), 0.0);
  EXPECT_EQ(one.Weight(0, 128), 0.0);
}

TEST(MelFilterbank, L1RowsAndErrors) {
  MelFilterbank fb = MakeMelFilterbank(16000, 1024, 64, 0.0, 8000.0, true);
  for (std::size_t j = 0; j < 64; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < fb.num_bins(); ++k) s += fb.Weight(j, k);
    if (s > 0) EXPECT_NEAR(s, 1.0, 1e-12);
  }
  EXPECT_TFBLUR_ERROR(MakeMelFilterbank(16000, 1024, 64, 4000.0, 3000.0), ErrorCode::kInvalidArgument);
  EXPECT_TFBLUR_ERROR(MakeMelFilterbank(16000, 1024, 64, 0.0, 9000.0), ErrorCode::kInvalidArgument);
  EXPECT_TFBLUR_ERROR(MakeMelFilterbank(16000, 1024, 0, 0.0, 8000.0), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CachedMelFilterbank(16000, 1024, 64, 0.0, 8000.0, false),
            CachedMelFilterbank(16000, 1024, 64, 0.0, 8000.0, false));
}

TEST(LogMel, FloorAndLogLaw) {
  MelFilterbank fb = MakeMelFilterbank(8000, 64, 8, 0.0, 4000.0);
  Spectrogram zero;
  zero.frames = 3;
  zero.bins = 33;
  zero.values.assign(3 * 33, 0.0);
  Spectrogram z = LogMel(zero, fb);
  EXPECT_EQ(z.bins, 8u);
  EXPECT_EQ(z.scale, SpecScale::kDb);
  for (double v : z.values) EXPECT_NEAR(v, -100.0, 1e-12);

  Spectrogram p = RandomGrid(3, 33, 2, 0.0, 1.0);
  p.scale = SpecScale::kPower;
  Spectrogram doubled = p;
  for (double& v : doubled.values) v *= 2.0;
  Spectrogram a = LogMel(p, fb), b = LogMel(doubled, fb);
  for (std::size_t i = 0; i < a.values.size(); ++i)
    if (a.values[i] > -90) EXPECT_NEAR(b.values[i] - a.values[i], 10 * std::log10(2.0), 1e-12);

  for (std::size_t n = 0; n < 3; ++n)
    for (std::size_t j = 0; j < 8; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 33; ++k) acc += fb.Weight(j, k) * p.at(n, k);
      EXPECT_NEAR(a.at(n, j), 10 * std::log10(std::max(acc, 1e-10)), 1e-12);
    }
  EXPECT_TFBLUR_ERROR(LogMel(a, fb), ErrorCode::kInvalidArgument);
}

TEST(LogMel, MonotoneInPower) {
  MelFilterbank fb = MakeMelFilterbank(8000, 64, 8, 0.0, 4000.0);
  Spectrogram p = RandomGrid(2, 33, 3, 0.0, 1.0);
  p.scale = SpecScale::kPower;
  Spectrogram q = p;
  q.values[40] += 0.5;
  Spectrogram a = LogMel(p, fb), b = LogMel(q, fb);
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_GE(b.values[i], a.values[i]);
}

TEST(ComputeLogMel, DefaultShapeIs63By256) {
  FeatureConfig fc;
  GenParams p;
  Spectrogram s = ComputeLogMel(GenSignal(SignalKind::kChirp, p, 0), fc);
  EXPECT_EQ(s.frames, 63u);
  EXPECT_EQ(s.bins, 256u);
  EXPECT_TRUE(s.mel);
  EXPECT_EQ(s.floor_power, 1e-10);
}

TEST(ComputeLogMel, MatchesOracleChain) {
  FeatureConfig fc;
  fc.sample_rate = 8000;
  fc.window_len = 128;
  fc.hop = 32;
  fc.channels = 128;
  fc.n_mels = 12;
  Signal psi = RandomSignal(700, 4, false, 8000);
  Spectrogram s = ComputeLogMel(psi, fc);
  Lattice lat{700, 32, 128, 128, BoundaryMode::kZeroPad};
  auto v = oracle::Stft(psi.samples, MakeWindow(WindowKind::kHann, 128).values, lat);
  ASSERT_EQ(s.frames, lat.num_frames());
  for (std::size_t n = 0; n < s.frames; ++n)
    for (std::size_t j = 0; j < 12; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= 64; ++k)
        acc += OracleWeight(8000, 128, 12, 0.0, 4000.0, j, k) * std::norm(v[n * 128 + k]);
      EXPECT_NEAR(s.at(n, j), 10 * std::log10(std::max(acc, 1e-10)), 1e-9);
    }
}

TEST(Normalize01, RangeIdempotenceAffineInvariance) {
  Spectrogram g = RandomGrid(10, 7, 5);
  Spectrogram n = Normalize01(g);
  EXPECT_EQ(n.Min(), 0.0);
  EXPECT_EQ(n.Max(), 1.0);
  Spectrogram nn = Normalize01(n);
  for (std::size_t i = 0; i < n.values.size(); ++i) EXPECT_NEAR(nn.values[i], n.values[i], 1e-12);
  Spectrogram aff = g;
  for (double& v : aff.values) v = 3.5 * v - 12.0;
  Spectrogram na = Normalize01(aff);
  for (std::size_t i = 0; i < n.values.size(); ++i) EXPECT_NEAR(na.values[i], n.values[i], 1e-12);
  Spectrogram flat = g;
  for (double& v : flat.values) v = 4.0;
  for (double v : Normalize01(flat).values) EXPECT_EQ(v, 0.0);
}

std::vector<double> OracleSpecBlur(const Spectrogram& s, const Kernel& k, GridBoundary b) {
  std::vector<double> out(s.values.size());
  const long F = static_cast<long>(s.frames), B = static_cast<long>(s.bins);
  auto fetch = [&](long n, long m) -> double {
    if (b == GridBoundary::kCircular) {
      n = ((n % F) + F) % F;
      m = ((m % B) + B) % B;
    } else if (b == GridBoundary::kReplicate) {
      n = std::clamp(n, 0L, F - 1);
      m = std::clamp(m, 0L, B - 1);
    } else if (n < 0 || n >= F || m < 0 || m >= B) {
      return 0.0;
    }
    return s.values[static_cast<std::size_t>(n * B + m)];
  };
  for (long n = 0; n < F; ++n)
    for (long m = 0; m < B; ++m) {
      double acc = 0.0;
      for (long i = -k.time_radius(); i <= k.time_radius(); ++i)
        for (long j = -k.freq_radius(); j <= k.freq_radius(); ++j) acc += k.at(i, j) * fetch(n - i, m - j);
      out[static_cast<std::size_t>(n * B + m)] = acc;
    }
  return out;
}

TEST(SpecBlur, MatchesOracleForEveryBoundary) {
  Spectrogram g = RandomGrid(20, 16, 6);
  Kernel k(3, 5, {0.1, 0.2, 0.3, -0.1, 0.05, 0.0, 0.4, 1.0, 0.2, 0.1, -0.2, 0.3, 0.1, 0.0, 0.6});
  for (GridBoundary b : {GridBoundary::kCircular, GridBoundary::kZero, GridBoundary::kReplicate}) {
    Spectrogram out = SpecBlur(g, k, b);
    auto ref = OracleSpecBlur(g, k, b);
    for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_NEAR(out.values[i], ref[i], 1e-12);
  }
  EXPECT_TFBLUR_ERROR(ParseGridBoundary("mirror"), ErrorCode::kInvalidArgument);
}

TEST(SpecBlur, DeltaMeanPositivityAndAveraging) {
  Spectrogram g = RandomGrid(30, 24, 7, 0.0, 5.0);
  EXPECT_EQ(SpecBlur(g, DeltaKernel()).values, g.values);
  Kernel k = GaussianKernel(1.5, 2.0);
  Spectrogram c = SpecBlur(g, k, GridBoundary::kCircular);
  EXPECT_NEAR(c.Mean(), g.Mean(), 1e-12);
  EXPECT_GE(c.Min(), 0.0);
  EXPECT_LE(c.Max(), g.Max());
  EXPECT_GE(c.Min(), g.Min());
}

}  // namespace
}  // namespace tfblur

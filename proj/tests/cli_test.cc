#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cli.h"
#include "oracles.h"
#include "test_util.h"
#include "tfblur/batch.h"
#include "tfblur/kernels.h"
#include "tfblur/serialize.h"
#include "tfblur/signal.h"

namespace tfblur::cli {
namespace {

namespace fs = std::filesystem;
using testutil::TempDir;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string P(const fs::path& p) { return p.string(); }

fs::path GenWav(const TempDir& dir, const std::string& name, const std::string& kind,
                std::size_t length, std::uint64_t seed = 1) {
  fs::path p = dir / name;
  Outcome o = Invoke({"--seed", std::to_string(seed), "--out", P(p), "gen", kind, "--length",
                   std::to_string(length)});
  EXPECT_EQ(o.code, kExitOk) << o.err;
  return p;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"blur"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"--seed", "x", "verify"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"verify", "--suite", "nope"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"--help"}).code, kExitOk);
  EXPECT_EQ(Invoke({"gen", "sinusoid"}).code, kExitUsage);  // no --out
}

TEST(Cli, MissingInputExitsTwo) {
  TempDir dir;
  Outcome o = Invoke({"--out", P(dir / "x.f32"), "spectrogram", P(dir / "absent.wav")});
  EXPECT_EQ(o.code, kExitUsage);
  EXPECT_NE(o.err.find("error"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "x.f32"));
}

TEST(Cli, GenWritesRequestedSignal) {
  TempDir dir;
  fs::path p = GenWav(dir, "s.wav", "sinusoid", 4000);
  Signal s = ReadWav(p);
  EXPECT_EQ(s.length(), 4000u);
  EXPECT_EQ(s.sample_rate, 16000);
  GenParams gp;
  gp.length = 4000;
  Signal ref = GenSignal(SignalKind::kSinusoid, gp, 1);
  for (std::size_t i = 0; i < 4000; ++i)
    EXPECT_EQ(static_cast<float>(s.samples[i].real()), static_cast<float>(ref.samples[i].real()));
  EXPECT_EQ(Invoke({"--out", P(dir / "y.wav"), "gen", "sawtooth"}).code, kExitUsage);
}

TEST(Cli, DefaultSpectrogramShapeAndPgm) {
  TempDir dir;
  fs::path in = GenWav(dir, "chirp.wav", "chirp", 16000);
  Outcome o = Invoke({"--out", P(dir / "f.f32"), "spectrogram", P(in), "--format", "pgm"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  Spectrogram s = ReadSpectrogram(dir / "f.f32");
  EXPECT_EQ(s.frames, 63u);
  EXPECT_EQ(s.bins, 256u);
  EXPECT_EQ(fs::file_size(dir / "f.f32"), 63u * 256u * 4u);

  auto pgm = ReadFileBytes(dir / "f.pgm");
  const std::string header = "P5\n63 256\n255\n";
  ASSERT_EQ(pgm.size(), header.size() + 63 * 256);
  EXPECT_EQ(std::string(pgm.begin(), pgm.begin() + static_cast<long>(header.size())), header);

  // Shorter input is padded to one second.
  fs::path shortw = GenWav(dir, "short.wav", "white_noise", 5000);
  ASSERT_EQ(Invoke({"--out", P(dir / "g.f32"), "spectrogram", P(shortw)}).code, kExitOk);
  EXPECT_EQ(ReadSpectrogram(dir / "g.f32").frames, 63u);
}

TEST(Cli, SpectrogramRejectsRateMismatch) {
  TempDir dir;
  fs::path p = dir / "r.wav";
  ASSERT_EQ(Invoke({"--out", P(p), "gen", "sinusoid", "--sample-rate", "8000", "--frequency", "500"}).code,
            kExitOk);
  EXPECT_EQ(Invoke({"--out", P(dir / "f.f32"), "spectrogram", P(p)}).code, kExitUsage);
}

TEST(Cli, DeltaBlurIsIdentity) {
  TempDir dir;
  fs::path in = GenWav(dir, "n.wav", "white_noise", 6000, 4);
  for (const char* mode : {"circular", "zeropad"}) {
    fs::path out = dir / (std::string(mode) + ".wav");
    Outcome o = Invoke({"--out", P(out), "blur", P(in), "--kernel", "delta", "--mode", mode});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    Signal a = ReadWav(in), b = ReadWav(out);
    ASSERT_EQ(a.length(), b.length());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.length(); ++i)
      worst = std::max(worst, std::abs(a.samples[i] - b.samples[i]));
    EXPECT_LE(worst, 1e-9) << mode;
  }
}

TEST(Cli, FrequencyOnlyBlurMatchesMultiplication) {
  TempDir dir;
  fs::path in = GenWav(dir, "n.wav", "white_noise", 5000, 2);
  fs::path out = dir / "o.wav";
  ASSERT_EQ(Invoke({"--out", P(out), "blur", P(in), "--sigma-t", "0", "--sigma-f", "4"}).code, kExitOk);
  Signal x = ReadWav(in), y = ReadWav(out);
  // Multiplication by h(t) = sum_j k_j e^{2 pi i j t / M}, M = 512; real
  // because the Gaussian taps are symmetric.
  Kernel k = GaussianKernel(0.0, 4.0);
  std::vector<cplx> ref(x.length());
  for (std::size_t t = 0; t < x.length(); ++t) {
    cplx h{};
    for (long j = -k.freq_radius(); j <= k.freq_radius(); ++j)
      h += k.at(0, j) * oracle::Expi(2 * std::numbers::pi * static_cast<double>(j) *
                                     static_cast<double>(t) / 512.0);
    ref[t] = h.real() * x.samples[t];
  }
  EXPECT_LE(oracle::RelErr(y.samples, ref), 1e-6);
}

TEST(Cli, BlurIsByteReproducibleAndWritesSideBySide) {
  TempDir dir;
  fs::path in = GenWav(dir, "c.wav", "chirp", 8000);
  ASSERT_EQ(Invoke({"--out", P(dir / "a.wav"), "blur", P(in), "--side-by-side"}).code, kExitOk);
  ASSERT_EQ(Invoke({"--out", P(dir / "b.wav"), "blur", P(in)}).code, kExitOk);
  EXPECT_EQ(ReadFileBytes(dir / "a.wav"), ReadFileBytes(dir / "b.wav"));
  EXPECT_TRUE(fs::exists(dir / "a_before.pgm"));
  EXPECT_TRUE(fs::exists(dir / "a_after.pgm"));
  EXPECT_EQ(Invoke({"--out", P(dir / "c.wav"), "blur", P(in), "--window-len", "1024"}).code,
            kExitUsage);  // W > M
}

TEST(Cli, BlurRenormalizeKeepsEnergy) {
  TempDir dir;
  fs::path in = GenWav(dir, "n.wav", "white_noise", 4096, 3);
  ASSERT_EQ(Invoke({"--out", P(dir / "o.wav"), "blur", P(in), "--renormalize", "--sigma-t", "3"}).code,
            kExitOk);
  EXPECT_NEAR(ReadWav(dir / "o.wav").Norm() / ReadWav(in).Norm(), 1.0, 1e-6);
}

TEST(Cli, SpecBlurOnFeaturesAndWav) {
  TempDir dir;
  fs::path in = GenWav(dir, "c.wav", "chirp", 16000);
  ASSERT_EQ(Invoke({"--out", P(dir / "f.f32"), "spectrogram", P(in)}).code, kExitOk);
  ASSERT_EQ(Invoke({"--out", P(dir / "g.f32"), "specblur", P(dir / "f.f32"), "--format", "csv"}).code,
            kExitOk);
  ASSERT_EQ(Invoke({"--out", P(dir / "h.f32"), "specblur", P(in)}).code, kExitOk);
  Spectrogram f = ReadSpectrogram(dir / "f.f32");
  Spectrogram g = ReadSpectrogram(dir / "g.f32");
  Spectrogram ref = SpecBlur(f, GaussianKernel(1.0, 2.0), GridBoundary::kReplicate);
  ASSERT_EQ(g.values.size(), ref.values.size());
  for (std::size_t i = 0; i < ref.values.size(); ++i)
    EXPECT_NEAR(g.values[i], ref.values[i], 1e-4);
  // The WAV path skips the float32 round trip of the stored features.
  Spectrogram h = ReadSpectrogram(dir / "h.f32");
  for (std::size_t i = 0; i < ref.values.size(); ++i) EXPECT_NEAR(h.values[i], g.values[i], 1e-3);
  EXPECT_TRUE(fs::exists(dir / "g.csv"));
}

void WriteManifest(const TempDir& dir, int count) {
  std::ofstream list(dir / "in/list.txt");
  for (int i = 0; i < count; ++i) {
    std::string name = "clip" + std::to_string(i) + ".wav";
    GenWav(dir, "in/" + name, i % 2 ? "chirp" : "white_noise", 9000 + 700 * static_cast<std::size_t>(i),
           static_cast<std::uint64_t>(i));
    list << name << "\n";
  }
}

TEST(Cli, AugmentBatchIsReproducible) {
  TempDir dir;
  fs::create_directories(dir / "in");
  WriteManifest(dir, 10);
  std::ofstream(dir / "cfg.json") << R"({"schema_version": 1, "steps": [
      {"type": "white_noise", "snr_db": 15},
      {"type": "stft_blur"},
      {"type": "spec_augment"},
      {"type": "spec_blur"}]})";
  const std::string list = P(dir / "in/list.txt");
  const std::string cfg = P(dir / "cfg.json");
  Outcome o = Invoke({"--seed", "11", "--config", cfg, "--out", P(dir / "o1"), "augment", "--manifest", list,
                   "--workers", "3"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  ASSERT_EQ(Invoke({"--seed", "11", "--config", cfg, "--out", P(dir / "o2"), "augment", "--manifest", list,
                 "--workers", "1"})
                .code,
            kExitOk);
  ASSERT_EQ(Invoke({"--seed", "12", "--config", cfg, "--out", P(dir / "o3"), "augment", "--manifest", list})
                .code,
            kExitOk);
  int differs = 0;
  for (int i = 0; i < 10; ++i) {
    std::string f = "clip" + std::to_string(i) + ".f32";
    Spectrogram s = ReadSpectrogram(dir / "o1" / f);
    EXPECT_EQ(s.frames, 63u);
    EXPECT_EQ(s.bins, 256u);
    EXPECT_EQ(ReadFileBytes(dir / "o1" / f), ReadFileBytes(dir / "o2" / f));
    differs += ReadFileBytes(dir / "o1" / f) != ReadFileBytes(dir / "o3" / f);
  }
  EXPECT_EQ(differs, 10);
}

TEST(Cli, AugmentReportsCorruptItems) {
  TempDir dir;
  fs::create_directories(dir / "in");
  WriteManifest(dir, 3);
  std::ofstream(dir / "in/bad.wav") << "not a wav file";
  std::ofstream(dir / "in/list.txt", std::ios::app) << "bad.wav\n";
  Outcome o = Invoke({"--out", P(dir / "o"), "augment", "--manifest", P(dir / "in/list.txt")});
  EXPECT_EQ(o.code, kExitFailed);
  EXPECT_NE(o.err.find("bad.wav"), std::string::npos);
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(fs::exists(dir / "o" / ("clip" + std::to_string(i) + ".f32")));
  EXPECT_TRUE(fs::exists(dir / "o/errors.log"));
  EXPECT_EQ(Invoke({"--out", P(dir / "o"), "augment", "--manifest", "a", "--input-dir", "b"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"--out", P(dir / "o"), "augment"}).code, kExitUsage);
}

TEST(Cli, VerifyIsDeterministicAndHonoursTolerance) {
  TempDir dir;
  Outcome a = Invoke({"--seed", "7", "--out", P(dir / "r.txt"), "verify", "--suite", "moyal"});
  Outcome b = Invoke({"--seed", "7", "verify", "--suite", "moyal"});
  ASSERT_EQ(a.code, kExitOk) << a.out;
  ASSERT_EQ(b.code, kExitOk);
  auto strip_timing = [](const std::string& s) {
    std::istringstream in(s);
    std::string line, kept;
    while (std::getline(in, line))
      if (line.rfind("# moyal", 0) != 0) kept += line + "\n";
    return kept;
  };
  EXPECT_EQ(strip_timing(a.out), strip_timing(b.out));
  EXPECT_NE(a.out.find("PASS"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "r.txt"));

  Outcome strict = Invoke({"--seed", "7", "verify", "--suite", "moyal", "--tol", "0"});
  EXPECT_EQ(strict.code, kExitFailed);
  EXPECT_NE(strict.err.find("moyal"), std::string::npos);

  Outcome list = Invoke({"verify", "--list"});
  EXPECT_EQ(list.code, kExitOk);
  EXPECT_NE(list.out.find("reconstruction"), std::string::npos);
}

}  // namespace
}  // namespace tfblur::cli

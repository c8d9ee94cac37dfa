#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "test_util.h"
#include "tfblur/batch.h"
#include "tfblur/config.h"
#include "tfblur/serialize.h"

namespace tfblur {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testutil::TempDir;

TEST(KernelJson, Forms) {
  Kernel g = KernelFromJson(json{{"kind", "gaussian"}, {"sigma_t", 1.0}, {"sigma_f", 2.0}});
  EXPECT_EQ(g, GaussianKernel(1.0, 2.0));
  Kernel g3 = KernelFromJson(
      json{{"kind", "gaussian"}, {"sigma_t", 1.0}, {"sigma_f", 2.0}, {"truncation", 3.0}});
  EXPECT_EQ(g3, GaussianKernel(1.0, 2.0, 3.0));
  EXPECT_TRUE(KernelFromJson(json{{"kind", "delta"}}).IsDelta());
  Kernel c = KernelFromJson(json{{"kind", "custom"}, {"taps", {{0.0, 1.0, 0.0}, {2.0, 3.0, 4.0}, {0.0, 5.0, 0.0}}}});
  EXPECT_EQ(c.time_taps(), 3u);
  EXPECT_EQ(c.at(0, 1), 4.0);
  EXPECT_EQ(KernelFromJson(KernelToJson(c)), c);
  EXPECT_EQ(KernelFromJson(KernelToJson(DeltaKernel())), DeltaKernel());
}

TEST(KernelJson, Rejections) {
  EXPECT_TFBLUR_ERROR(KernelFromJson(json{{"kind", "box"}}), ErrorCode::kFormat);
  EXPECT_TFBLUR_ERROR(KernelFromJson(json{{"kind", "delta"}, {"sigma", 1}}), ErrorCode::kFormat);
  EXPECT_TFBLUR_ERROR(KernelFromJson(json{{"kind", "custom"}, {"taps", {{1.0, 2.0}, {3.0}}}}),
                      ErrorCode::kFormat);
}

TEST(AugmentConfigJson, RoundTrip) {
  AugmentConfig c;
  c.master_seed = 1234;
  c.replay = ReplayMode::kPerEpoch;
  c.features.n_mels = 128;
  c.features.normalize_01 = true;
  StftBlurStep sb;
  sb.kernel = GaussianKernel(1.0, 3.0);
  sb.synthesis = SynthesisChoice::kTight;
  c.steps = {WhiteNoiseStep{std::numeric_limits<double>::infinity()}, sb,
             SpecAugmentStep{1, 4, 3, 10, MaskFill::kZero}, SpecBlurStep{DeltaKernel(), GridBoundary::kZero}};
  json j = AugmentConfigToJson(c);
  EXPECT_EQ(j.at("schema_version"), kConfigSchemaVersion);
  AugmentConfig back = AugmentConfigFromJson(j);
  EXPECT_EQ(AugmentConfigToJson(back), j);
  EXPECT_EQ(back.master_seed, 1234u);
  ASSERT_EQ(back.steps.size(), 4u);
  EXPECT_TRUE(std::isinf(std::get<WhiteNoiseStep>(back.steps[0]).snr_db));
  EXPECT_EQ(std::get<StftBlurStep>(back.steps[1]).kernel, sb.kernel);
}

TEST(AugmentConfigJson, RejectsUnknownKeysAndVersions) {
  json base = AugmentConfigToJson(AugmentConfig{});
  json extra = base;
  extra["colour"] = "blue";
  EXPECT_TFBLUR_ERROR(AugmentConfigFromJson(extra), ErrorCode::kFormat);
  json ver = base;
  ver["schema_version"] = 99;
  EXPECT_TFBLUR_ERROR(AugmentConfigFromJson(ver), ErrorCode::kFormat);
  json step = base;
  step["steps"] = json::array({json{{"type", "white_noise"}, {"snr_db", 10}, {"gain", 2}}});
  EXPECT_TFBLUR_ERROR(AugmentConfigFromJson(step), ErrorCode::kFormat);
  json kind = base;
  kind["steps"] = json::array({json{{"type", "time_warp"}}});
  EXPECT_TFBLUR_ERROR(AugmentConfigFromJson(kind), ErrorCode::kFormat);
  json feat = base;
  feat["features"]["hop_ms"] = 10;
  EXPECT_TFBLUR_ERROR(AugmentConfigFromJson(feat), ErrorCode::kFormat);
}

TEST(AugmentConfigJson, LoadFromFile) {
  TempDir dir;
  std::ofstream(dir / "c.json") << R"({"schema_version": 1, "master_seed": 5,
    "steps": [{"type": "white_noise", "snr_db": "inf"},
              {"type": "spec_blur", "kernel": {"kind": "gaussian", "sigma_t": 1, "sigma_f": 2}}]})";
  AugmentConfig c = LoadAugmentConfig(dir / "c.json");
  EXPECT_EQ(c.master_seed, 5u);
  ASSERT_EQ(c.steps.size(), 2u);
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_TFBLUR_ERROR(LoadAugmentConfig(dir / "bad.json"), ErrorCode::kFormat);
  EXPECT_TFBLUR_ERROR(LoadAugmentConfig(dir / "missing.json"), ErrorCode::kIo);
}

TEST(Serialize, TfMatrixRoundTripAndSidecar) {
  TempDir dir;
  const Lattice lat{64, 4, 16, 16, BoundaryMode::kCircular};
  TfMatrix tf(lat, 8000);
  tf.coeffs = RandomSignal(tf.coeffs.size(), 1, true).samples;
  WriteTfMatrix(tf, dir / "v.bin");
  EXPECT_EQ(fs::file_size(dir / "v.bin"), tf.coeffs.size() * 8);
  TfMatrix back = ReadTfMatrix(dir / "v.bin");
  EXPECT_EQ(back.lattice, lat);
  EXPECT_EQ(back.sample_rate, 8000);
  for (std::size_t i = 0; i < tf.coeffs.size(); ++i) {
    EXPECT_EQ(back.coeffs[i].real(), static_cast<float>(tf.coeffs[i].real()));
    EXPECT_EQ(back.coeffs[i].imag(), static_cast<float>(tf.coeffs[i].imag()));
  }
  std::ifstream side(SidecarPath(dir / "v.bin"));
  json j = json::parse(side);
  for (const char* key : {"L", "a", "M", "W", "mode", "sample_rate"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["mode"], "circular");
}

TEST(Serialize, SpectrogramFormats) {
  TempDir dir;
  Spectrogram s;
  s.frames = 3;
  s.bins = 2;
  s.scale = SpecScale::kDb;
  s.mel = true;
  s.floor_power = 1e-10;
  s.values = {-10, -20, -30, -40, -50, 0};
  WriteSpectrogram(s, dir / "f.f32", json{{"item_id", "x"}});
  Spectrogram back = ReadSpectrogram(dir / "f.f32");
  EXPECT_EQ(back.values, s.values);
  EXPECT_EQ(back.frames, 3u);
  EXPECT_TRUE(back.mel);
  std::ifstream side(dir / "f.f32.json");
  json j = json::parse(side);
  EXPECT_EQ(j["item_id"], "x");
  EXPECT_EQ(j["floor_power"], 1e-10);

  auto pgm = SpectrogramToPgm(s);
  std::string header = "P5\n3 2\n255\n";
  ASSERT_EQ(pgm.size(), header.size() + 6);
  EXPECT_EQ(std::string(pgm.begin(), pgm.begin() + static_cast<long>(header.size())), header);
  // Top row is the highest bin: values -20, -40, 0 -> 0.6, 0.2, 1.0.
  EXPECT_EQ(pgm[header.size()], 153);
  EXPECT_EQ(pgm[header.size() + 2], 255);
  EXPECT_EQ(pgm[header.size() + 5], 0);  // -50 is the minimum

  std::string csv = SpectrogramToCsv(s);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);

  std::ofstream(dir / "short.f32") << "abc";
  fs::copy_file(dir / "f.f32.json", dir / "short.f32.json");
  EXPECT_TFBLUR_ERROR(ReadSpectrogram(dir / "short.f32"), ErrorCode::kFormat);
}

TEST(Serialize, AtomicWriteCreatesParentsAndLeavesNoTemp) {
  TempDir dir;
  WriteFileAtomic(dir / "a/b/c.txt", std::string("hello"));
  EXPECT_EQ(ReadFileBytes(dir / "a/b/c.txt").size(), 5u);
  WriteFileAtomic(dir / "a/b/c.txt", std::string("hi"));
  EXPECT_EQ(ReadFileBytes(dir / "a/b/c.txt").size(), 2u);
  int entries = 0;
  for (const auto& e : fs::directory_iterator(dir / "a/b")) entries += e.is_regular_file();
  EXPECT_EQ(entries, 1);
}

void WriteClips(const fs::path& dir, int count) {
  for (int i = 0; i < count; ++i) {
    GenParams p;
    p.length = 12000 + 400 * static_cast<std::size_t>(i);
    Signal s = GenSignal(i % 2 ? SignalKind::kChirp : SignalKind::kWhiteNoise, p, 100 + i);
    if (i % 2 == 0)
      for (auto& v : s.samples) v *= 0.05;
    const fs::path sub = dir / ("c" + std::to_string(i / 5));
    fs::create_directories(sub);
    WriteWav(s, sub / ("clip" + std::to_string(i) + ".wav"));
  }
}

TEST(Manifest, ValidationRules) {
  BatchManifest m;
  m.output_dir = "/tmp/out";
  m.items = {{"a.wav", "a.wav"}, {"b.wav", "a.wav"}};
  EXPECT_TFBLUR_ERROR(m.Validate(), ErrorCode::kInvalidArgument);
  m.items = {{"a.wav", "../a.wav"}};
  EXPECT_TFBLUR_ERROR(m.Validate(), ErrorCode::kInvalidArgument);
  m.items = {{"a.wav", "/abs.wav"}};
  EXPECT_TFBLUR_ERROR(m.Validate(), ErrorCode::kInvalidArgument);
  m.items = {{"a.wav", "sub/a.wav"}};
  EXPECT_NO_THROW(m.Validate());
  EXPECT_EQ(FeaturePathFor(m, m.items[0]), fs::path("/tmp/out/sub/a.f32"));
}

TEST(Manifest, ListingAndDirectory) {
  TempDir dir;
  WriteClips(dir / "in", 3);
  std::ofstream(dir / "in/list.txt") << "# clips\nc0/clip1.wav\n\nc0/clip0.wav\n";
  BatchManifest m = ManifestFromListing(dir / "in/list.txt", dir / "out");
  ASSERT_EQ(m.items.size(), 2u);
  EXPECT_EQ(m.items[0].item_id, "c0/clip1.wav");
  EXPECT_TRUE(fs::exists(m.items[0].input));
  BatchManifest d = ManifestFromDirectory(dir / "in", dir / "out");
  ASSERT_EQ(d.items.size(), 3u);
  EXPECT_EQ(d.items[2].item_id, "c0/clip2.wav");
}

TEST(RunBatch, WorkerCountDoesNotChangeBytes) {
  TempDir dir;
  WriteClips(dir / "in", 10);
  AugmentConfig cfg;
  cfg.master_seed = 3;
  cfg.steps = {WhiteNoiseStep{10.0}, StftBlurStep{}, SpecAugmentStep{}, SpecBlurStep{}};
  BatchManifest serial = ManifestFromDirectory(dir / "in", dir / "s");
  BatchManifest parallel = ManifestFromDirectory(dir / "in", dir / "p");
  EXPECT_EQ(RunBatch(serial, cfg, 1).succeeded, 10u);
  EXPECT_EQ(RunBatch(parallel, cfg, 4).succeeded, 10u);
  for (std::size_t i = 0; i < serial.items.size(); ++i) {
    fs::path a = FeaturePathFor(serial, serial.items[i]), b = FeaturePathFor(parallel, parallel.items[i]);
    EXPECT_EQ(ReadFileBytes(a), ReadFileBytes(b));
    EXPECT_EQ(ReadFileBytes(SidecarPath(a)), ReadFileBytes(SidecarPath(b)));
    EXPECT_EQ(ReadSpectrogram(a).frames, 63u);
    EXPECT_EQ(ReadSpectrogram(a).bins, 256u);
  }
  EXPECT_FALSE(fs::exists(dir / "s/errors.log"));
}

TEST(RunBatch, CorruptItemIsIsolated) {
  TempDir dir;
  WriteClips(dir / "in", 4);
  std::ofstream(dir / "in/c0/broken.wav") << "RIFF....WAVEjunk";
  BatchManifest m = ManifestFromDirectory(dir / "in", dir / "out");
  BatchResult r = RunBatch(m, AugmentConfig{}, 2);
  EXPECT_EQ(r.succeeded, 4u);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].first, "c0/broken.wav");
  EXPECT_TRUE(fs::exists(dir / "out/errors.log"));
  EXPECT_TRUE(fs::exists(dir / "out/c0/clip3.f32"));
  EXPECT_FALSE(fs::exists(dir / "out/c0/broken.f32"));
}

}  // namespace
}  // namespace tfblur

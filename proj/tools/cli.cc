#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tfblur/augment.h"
#include "tfblur/batch.h"
#include "tfblur/config.h"
#include "tfblur/error.h"
#include "tfblur/features.h"
#include "tfblur/kernels.h"
#include "tfblur/operators.h"
#include "tfblur/serialize.h"
#include "tfblur/signal.h"
#include "tfblur/verify.h"

namespace tfblur::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string config;
  std::string out;
};

struct KernelFlags {
  std::string kind = "gaussian";
  double sigma_t;
  double sigma_f;
  double truncation = 4.0;
  std::string file;

  KernelFlags(double st, double sf) : sigma_t(st), sigma_f(sf) {}

  void Add(CLI::App* cmd) {
    cmd->add_option("--kernel", kind, "gaussian | delta")
        ->check(CLI::IsMember({"gaussian", "delta"}))
        ->capture_default_str();
    cmd->add_option("--sigma-t", sigma_t, "Gaussian width along time (frames)")
        ->capture_default_str();
    cmd->add_option("--sigma-f", sigma_f, "Gaussian width along frequency (bins)")
        ->capture_default_str();
    cmd->add_option("--truncation", truncation, "Gaussian support in sigmas")
        ->capture_default_str();
    cmd->add_option("--kernel-file", file, "JSON kernel description (overrides --kernel)");
  }

  Kernel Build() const {
    if (!file.empty()) {
      auto bytes = ReadFileBytes(file);
      json j = json::parse(bytes.begin(), bytes.end(), nullptr, false);
      if (j.is_discarded()) Fail(ErrorCode::kFormat, file + ": not valid JSON");
      return KernelFromJson(j);
    }
    if (kind == "delta") return DeltaKernel();
    return GaussianKernel(sigma_t, sigma_f, truncation);
  }
};

enum class ExtraFormat { kRaw, kCsv, kPgm };

void AddFormat(CLI::App* cmd, ExtraFormat& format) {
  std::map<std::string, ExtraFormat> names{
      {"raw", ExtraFormat::kRaw}, {"csv", ExtraFormat::kCsv}, {"pgm", ExtraFormat::kPgm}};
  cmd->add_option("--format", format, "also write csv or pgm next to the feature file")
      ->transform(CLI::CheckedTransformer(names, CLI::ignore_case));
}

fs::path RequireOut(const Globals& g, const char* what) {
  if (g.out.empty()) Fail(ErrorCode::kInvalidArgument, std::string("--out is required for ") + what);
  return g.out;
}

fs::path WithSuffix(const fs::path& p, const std::string& suffix, const std::string& ext) {
  fs::path r = p;
  r.replace_filename(p.stem().string() + suffix + ext);
  return r;
}

void WriteFeatures(const Spectrogram& spec, const fs::path& out, ExtraFormat format,
                   const json& extra, std::ostream& log) {
  WriteSpectrogram(spec, out, extra);
  log << "wrote " << out.string() << " (" << spec.frames << "x" << spec.bins << ")\n";
  if (format == ExtraFormat::kCsv) {
    fs::path p = WithSuffix(out, "", ".csv");
    WriteFileAtomic(p, SpectrogramToCsv(spec));
    log << "wrote " << p.string() << "\n";
  } else if (format == ExtraFormat::kPgm) {
    fs::path p = WithSuffix(out, "", ".pgm");
    WriteFileAtomic(p, SpectrogramToPgm(spec));
    log << "wrote " << p.string() << "\n";
  }
}

AugmentConfig ConfigFrom(const Globals& g) {
  AugmentConfig c = g.config.empty() ? AugmentConfig{} : LoadAugmentConfig(g.config);
  if (g.seed_given) c.master_seed = g.seed;
  c.Validate();
  return c;
}

Spectrogram DbSpectrogram(const Signal& s, const Window& w, const Lattice& lat, double floor) {
  Spectrogram spec = HalfSpectrum(PowerSpectrogram(Stft(s, w, lat)));
  for (double& v : spec.values) v = 10.0 * std::log10(std::max(v, floor));
  spec.scale = SpecScale::kDb;
  spec.floor_power = floor;
  spec.sample_rate = s.sample_rate;
  return spec;
}

// ---------------------------------------------------------------------------

struct SpectrogramCmd {
  std::string input;
  ExtraFormat format = ExtraFormat::kRaw;
  bool linear = false;
  bool normalize = false;
  std::optional<std::size_t> window_len, hop, channels, n_mels;

  void Add(CLI::App* cmd) {
    cmd->add_option("input", input, "input WAV")->required();
    AddFormat(cmd, format);
    cmd->add_flag("--linear", linear, "dB power spectrogram instead of log-mel");
    cmd->add_flag("--normalize", normalize, "rescale values to [0, 1]");
    cmd->add_option("--window-len", window_len);
    cmd->add_option("--hop", hop);
    cmd->add_option("--channels", channels, "FFT size");
    cmd->add_option("--n-mels", n_mels);
  }

  int Run(const Globals& g, std::ostream& out) {
    FeatureConfig fc = ConfigFrom(g).features;
    if (window_len) fc.window_len = *window_len;
    if (hop) fc.hop = *hop;
    if (channels) fc.channels = *channels;
    if (n_mels) fc.n_mels = *n_mels;
    const fs::path dest = RequireOut(g, "spectrogram");

    Signal s = ReadWav(input);
    Require(s.sample_rate == fc.sample_rate,
            "input sample rate " + std::to_string(s.sample_rate) + " differs from configured " +
                std::to_string(fc.sample_rate));
    if (fc.pad_seconds > 0) {
      auto target = static_cast<std::size_t>(std::llround(fc.pad_seconds * fc.sample_rate));
      if (s.length() < target) s = PadToLength(s, target);
    }
    Spectrogram spec =
        linear ? DbSpectrogram(s, MakeWindow(fc.window, fc.window_len), fc.LatticeFor(s.length()),
                               fc.floor)
               : ComputeLogMel(s, fc);
    if (normalize || fc.normalize_01) spec = Normalize01(spec);
    WriteFeatures(spec, dest, format, json{{"input", fs::path(input).filename().string()}}, out);
    return kExitOk;
  }
};

struct BlurCmd {
  std::string input;
  KernelFlags kernel{2.0, 4.0};
  std::string window = "hann";
  std::size_t window_len = 512;
  double window_width = 0.0;
  std::size_t hop = 128;
  std::size_t channels = 512;
  std::string synthesis = "dual";
  std::string mode = "circular";
  bool renormalize = false;
  bool side_by_side = false;

  void Add(CLI::App* cmd) {
    cmd->add_option("input", input, "input WAV")->required();
    kernel.Add(cmd);
    cmd->add_option("--window", window, "hann | gaussian")->capture_default_str();
    cmd->add_option("--window-len", window_len)->capture_default_str();
    cmd->add_option("--window-width", window_width, "Gaussian width (0 = len/4)");
    cmd->add_option("--hop", hop)->capture_default_str();
    cmd->add_option("--channels", channels, "FFT size")->capture_default_str();
    cmd->add_option("--synthesis", synthesis, "dual | tight")->capture_default_str();
    cmd->add_option("--mode", mode, "circular | zeropad")->capture_default_str();
    cmd->add_flag("--renormalize", renormalize, "rescale output to the input energy");
    cmd->add_flag("--side-by-side", side_by_side, "write before/after spectrogram images");
  }

  int Run(const Globals& g, std::ostream& out, std::ostream& err) {
    const fs::path dest = RequireOut(g, "blur");
    Signal s = ReadWav(input);

    BlurSpec spec;
    spec.window = MakeWindow(ParseWindowKind(window), window_len, window_width);
    spec.synthesis = ParseSynthesisChoice(synthesis);
    spec.kernel = kernel.Build();
    spec.renormalize_energy = renormalize;
    const BoundaryMode bm = ParseBoundaryMode(mode);
    Require(hop >= 1 && channels >= 1, "hop and channels must be positive");

    // Circular runs on a zero-extended copy long enough that neither the
    // window nor the kernel wraps real samples onto each other. Zeropad gets
    // leading zeros so the first samples are covered by full frames.
    const std::size_t len = s.length();
    std::size_t lead = 0;
    Signal work = s;
    if (bm == BoundaryMode::kZeroPad && window_len > hop) {
      lead = (window_len - hop + hop - 1) / hop * hop;
      work.samples.insert(work.samples.begin(), lead, cplx{});
    }
    if (bm == BoundaryMode::kCircular) {
      const std::size_t block = std::lcm(hop, channels);
      std::size_t target = len + window_len +
                           static_cast<std::size_t>(spec.kernel.time_radius()) * hop;
      target = std::max(target, channels);
      target = (target + block - 1) / block * block;
      work.samples.resize(target, cplx{});
    }
    spec.lattice = Lattice{work.length(), hop, channels, window_len, bm};
    spec.lattice.Validate();

    Signal blurred = Blur(work, spec);
    double imag = 0.0;
    for (const auto& v : blurred.samples) imag += v.imag() * v.imag();
    if (!s.is_complex && imag > 1e-20 * std::max(blurred.Energy(), 1e-300))
      err << "warning: discarding imaginary part (relative energy "
          << imag / std::max(blurred.Energy(), 1e-300) << ")\n";

    Signal result = blurred;
    result.samples.erase(result.samples.begin(), result.samples.begin() + static_cast<long>(lead));
    result.samples.resize(len);
    if (renormalize) {
      const double n = result.Norm();
      if (n > 0)
        for (auto& v : result.samples) v *= s.Norm() / n;
    }
    WriteWav(result, dest);
    out << "wrote " << dest.string() << "\n";

    if (side_by_side) {
      const Window& w = spec.window;
      const Lattice& lat = spec.lattice;
      for (const auto& [suffix, sig] : {std::pair{"_before", &work}, std::pair{"_after", &blurred}}) {
        fs::path p = WithSuffix(dest, suffix, ".pgm");
        WriteFileAtomic(p, SpectrogramToPgm(DbSpectrogram(*sig, w, lat, 1e-10)));
        out << "wrote " << p.string() << "\n";
      }
    }
    return kExitOk;
  }
};

struct SpecBlurCmd {
  std::string input;
  KernelFlags kernel{1.0, 2.0};
  std::string boundary = "replicate";
  ExtraFormat format = ExtraFormat::kRaw;

  void Add(CLI::App* cmd) {
    cmd->add_option("input", input, "feature file (.f32 with sidecar) or WAV")->required();
    kernel.Add(cmd);
    cmd->add_option("--boundary", boundary, "replicate | zero | circular")->capture_default_str();
    AddFormat(cmd, format);
  }

  int Run(const Globals& g, std::ostream& out) {
    const fs::path dest = RequireOut(g, "specblur");
    Spectrogram spec;
    if (fs::path(input).extension() == ".wav") {
      FeatureConfig fc = ConfigFrom(g).features;
      Signal s = ReadWav(input);
      Require(s.sample_rate == fc.sample_rate, "input sample rate differs from configured");
      if (fc.pad_seconds > 0) {
        auto target = static_cast<std::size_t>(std::llround(fc.pad_seconds * fc.sample_rate));
        if (s.length() < target) s = PadToLength(s, target);
      }
      spec = ComputeLogMel(s, fc);
    } else {
      spec = ReadSpectrogram(input);
    }
    spec = SpecBlur(spec, kernel.Build(), ParseGridBoundary(boundary));
    WriteFeatures(spec, dest, format, json{{"input", fs::path(input).filename().string()}}, out);
    return kExitOk;
  }
};

struct AugmentCmd {
  std::string manifest;
  std::string input_dir;
  unsigned workers = 0;
  std::uint64_t epoch = 0;

  void Add(CLI::App* cmd) {
    auto* m = cmd->add_option("--manifest", manifest, "listing file, one WAV path per line");
    auto* d = cmd->add_option("--input-dir", input_dir, "process every WAV below this directory");
    m->excludes(d);
    cmd->add_option("--workers", workers, "worker threads (0 = all cores)");
    cmd->add_option("--epoch", epoch, "epoch index for per_epoch replay");
  }

  int Run(const Globals& g, std::ostream& out, std::ostream& err) {
    const fs::path dest = RequireOut(g, "augment");
    Require(!manifest.empty() || !input_dir.empty(), "augment needs --manifest or --input-dir");
    AugmentConfig cfg = ConfigFrom(g);
    BatchManifest m =
        manifest.empty() ? ManifestFromDirectory(input_dir, dest) : ManifestFromListing(manifest, dest);
    BatchResult r = RunBatch(m, cfg, workers, epoch);
    out << r.succeeded << " item(s) written to " << dest.string() << "\n";
    for (const auto& [id, msg] : r.failures) err << "failed: " << id << ": " << msg << "\n";
    if (!r.failures.empty()) {
      err << r.failures.size() << " item(s) failed, see " << (dest / "errors.log").string() << "\n";
      return kExitFailed;
    }
    return kExitOk;
  }
};

struct GenCmd {
  std::string kind;
  GenParams params;
  std::optional<std::size_t> position;

  void Add(CLI::App* cmd) {
    cmd->add_option("kind", kind, "sinusoid | chirp | white_noise | impulse | gaussian_pulse")
        ->required();
    cmd->add_option("--length", params.length, "samples")->capture_default_str();
    cmd->add_option("--sample-rate", params.sample_rate)->capture_default_str();
    cmd->add_option("--frequency", params.frequency, "Hz")->capture_default_str();
    cmd->add_option("--f-start", params.f_start, "chirp start, Hz")->capture_default_str();
    cmd->add_option("--f-end", params.f_end, "chirp end, Hz")->capture_default_str();
    cmd->add_option("--position", position, "impulse / pulse centre (samples)");
    cmd->add_option("--width", params.width, "pulse width (samples)")->capture_default_str();
  }

  int Run(const Globals& g, std::ostream& out) {
    const fs::path dest = RequireOut(g, "gen");
    params.position = position;
    WriteWav(GenSignal(ParseSignalKind(kind), params, g.seed), dest);
    out << "wrote " << dest.string() << "\n";
    return kExitOk;
  }
};

struct VerifyCmd {
  std::vector<std::string> suites;
  std::optional<double> tol;
  bool list = false;

  void Add(CLI::App* cmd) {
    cmd->add_option("--suite", suites, "suite to run (repeatable; default all)")
        ->check(CLI::IsMember(VerifySuiteNames()));
    cmd->add_option("--tol", tol, "override every upper-bound tolerance");
    cmd->add_flag("--list", list, "print suite names and exit");
  }

  int Run(const Globals& g, std::ostream& out, std::ostream& err) {
    if (list) {
      for (const auto& s : VerifySuiteNames()) out << s << "\n";
      return kExitOk;
    }
    if (suites.empty()) suites = VerifySuiteNames();
    VerifyOptions opt;
    opt.seed = g.seed;
    opt.tolerance_override = tol;

    std::ostringstream report;
    report << "# suite check value bound status\n";
    std::vector<std::string> failed;
    for (const auto& suite : suites) {
      auto t0 = std::chrono::steady_clock::now();
      bool ok = true;
      for (const auto& r : RunVerifySuite(suite, opt)) {
        report << FormatCheck(r) << "\n";
        ok = ok && r.pass;
      }
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      char line[128];
      std::snprintf(line, sizeof(line), "# %s %.2fs %s\n", suite.c_str(), secs, ok ? "ok" : "FAILED");
      report << line;
      if (!ok) failed.push_back(suite);
    }
    out << report.str();
    if (!g.out.empty()) WriteFileAtomic(g.out, report.str());
    if (!failed.empty()) {
      err << "verification failed:";
      for (const auto& f : failed) err << " " << f;
      err << "\n";
      return kExitFailed;
    }
    return kExitOk;
  }
};

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-frequency blurring operators, features and augmentation", "tfblur"};
  app.require_subcommand(1);
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--config", g.config, "augmentation/feature config (JSON)");
  app.add_option("--out", g.out, "output file or directory");

  SpectrogramCmd spectrogram;
  BlurCmd blur;
  SpecBlurCmd specblur;
  AugmentCmd augment;
  GenCmd gen;
  VerifyCmd verify;
  auto* c_spec = app.add_subcommand("spectrogram", "log-mel or dB spectrogram of a WAV");
  auto* c_blur = app.add_subcommand("blur", "apply a time-frequency blurring operator to a WAV");
  auto* c_specblur = app.add_subcommand("specblur", "blur a spectrogram grid");
  auto* c_augment = app.add_subcommand("augment", "batch feature extraction with augmentation");
  auto* c_gen = app.add_subcommand("gen", "generate a test signal");
  auto* c_verify = app.add_subcommand("verify", "run the numerical property suites");
  spectrogram.Add(c_spec);
  blur.Add(c_blur);
  specblur.Add(c_specblur);
  augment.Add(c_augment);
  gen.Add(c_gen);
  verify.Add(c_verify);
  for (auto* c : {c_spec, c_blur, c_specblur, c_augment, c_gen, c_verify}) c->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (c_spec->parsed()) return spectrogram.Run(g, out);
    if (c_blur->parsed()) return blur.Run(g, out, err);
    if (c_specblur->parsed()) return specblur.Run(g, out);
    if (c_augment->parsed()) return augment.Run(g, out, err);
    if (c_gen->parsed()) return gen.Run(g, out);
    if (c_verify->parsed()) return verify.Run(g, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace tfblur::cli

#include "tfblur/config.h"

#include <fstream>
#include <limits>
#include <set>
#include <string>

#include "tfblur/error.h"

namespace tfblur {

using nlohmann::json;

namespace {

void RejectUnknown(const json& j, std::initializer_list<const char*> allowed,
                   const std::string& where) {
  if (!j.is_object()) Fail(ErrorCode::kFormat, where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key()))
      Fail(ErrorCode::kFormat, "unknown key '" + it.key() + "' in " + where);
}

template <typename T>
T Get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    Fail(ErrorCode::kFormat, std::string("bad value for '") + key + "': " + e.what());
  }
}

std::string WindowKindName(WindowKind k) {
  switch (k) {
    case WindowKind::kGaussian: return "gaussian";
    case WindowKind::kHann: return "hann";
    case WindowKind::kCustom: return "custom";
  }
  return "?";
}

std::string SynthesisName(SynthesisChoice s) {
  switch (s) {
    case SynthesisChoice::kDual: return "dual";
    case SynthesisChoice::kTight: return "tight";
    case SynthesisChoice::kExplicit: return "explicit";
  }
  return "?";
}

double ParseSnr(const json& j) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    Fail(ErrorCode::kFormat, "snr_db string must be \"inf\"");
  }
  if (!j.is_number()) Fail(ErrorCode::kFormat, "snr_db must be a number or \"inf\"");
  return j.get<double>();
}

}  // namespace

Kernel KernelFromJson(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    Fail(ErrorCode::kFormat, "kernel literal needs a 'kind'");
  const auto kind = Get<std::string>(j, "kind", "");
  if (kind == "delta") {
    RejectUnknown(j, {"kind"}, "delta kernel");
    return DeltaKernel();
  }
  if (kind == "gaussian") {
    RejectUnknown(j, {"kind", "sigma_t", "sigma_f", "truncation", "normalize"},
                  "gaussian kernel");
    return GaussianKernel(Get<double>(j, "sigma_t", 0.0), Get<double>(j, "sigma_f", 0.0),
                          Get<double>(j, "truncation", 4.0), Get<bool>(j, "normalize", true));
  }
  if (kind == "custom") {
    RejectUnknown(j, {"kind", "taps"}, "custom kernel");
    auto rows = Get<std::vector<std::vector<double>>>(j, "taps", {});
    if (rows.empty() || rows[0].empty()) Fail(ErrorCode::kFormat, "custom kernel has no taps");
    std::vector<double> taps;
    for (const auto& r : rows) {
      if (r.size() != rows[0].size()) Fail(ErrorCode::kFormat, "ragged custom kernel taps");
      taps.insert(taps.end(), r.begin(), r.end());
    }
    return Kernel(rows.size(), rows[0].size(), std::move(taps));
  }
  Fail(ErrorCode::kFormat, "unknown kernel kind '" + kind + "'");
}

json KernelToJson(const Kernel& kernel) {
  if (kernel.IsDelta()) return json{{"kind", "delta"}};
  json rows = json::array();
  for (std::size_t i = 0; i < kernel.time_taps(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < kernel.freq_taps(); ++k)
      row.push_back(kernel.taps()[i * kernel.freq_taps() + k]);
    rows.push_back(row);
  }
  return json{{"kind", "custom"}, {"taps", rows}};
}

FeatureConfig FeatureConfigFromJson(const json& j) {
  RejectUnknown(j,
                {"sample_rate", "window", "window_len", "hop", "channels", "n_mels", "fmin",
                 "fmax", "floor", "mel_l1_norm", "pad_seconds", "normalize_01"},
                "features");
  FeatureConfig c;
  c.sample_rate = Get<int>(j, "sample_rate", c.sample_rate);
  c.window = ParseWindowKind(Get<std::string>(j, "window", "hann"));
  c.window_len = Get<std::size_t>(j, "window_len", c.window_len);
  c.hop = Get<std::size_t>(j, "hop", c.hop);
  c.channels = Get<std::size_t>(j, "channels", c.channels);
  c.n_mels = Get<std::size_t>(j, "n_mels", c.n_mels);
  c.fmin = Get<double>(j, "fmin", c.fmin);
  c.fmax = Get<double>(j, "fmax", c.fmax);
  c.floor = Get<double>(j, "floor", c.floor);
  c.mel_l1_norm = Get<bool>(j, "mel_l1_norm", c.mel_l1_norm);
  c.pad_seconds = Get<double>(j, "pad_seconds", c.pad_seconds);
  c.normalize_01 = Get<bool>(j, "normalize_01", c.normalize_01);
  return c;
}

json FeatureConfigToJson(const FeatureConfig& c) {
  return json{{"sample_rate", c.sample_rate}, {"window", WindowKindName(c.window)},
              {"window_len", c.window_len},   {"hop", c.hop},
              {"channels", c.channels},       {"n_mels", c.n_mels},
              {"fmin", c.fmin},               {"fmax", c.EffectiveFmax()},
              {"floor", c.floor},             {"mel_l1_norm", c.mel_l1_norm},
              {"pad_seconds", c.pad_seconds}, {"normalize_01", c.normalize_01}};
}

namespace {

AugmentStep StepFromJson(const json& j) {
  const auto type = Get<std::string>(j, "type", "");
  if (type == "white_noise") {
    RejectUnknown(j, {"type", "snr_db"}, "white_noise step");
    WhiteNoiseStep s;
    if (j.contains("snr_db")) s.snr_db = ParseSnr(j.at("snr_db"));
    return s;
  }
  if (type == "stft_blur") {
    RejectUnknown(j,
                  {"type", "window", "window_len", "window_width", "hop", "channels",
                   "synthesis", "kernel", "renormalize"},
                  "stft_blur step");
    StftBlurStep s;
    s.window = ParseWindowKind(Get<std::string>(j, "window", "hann"));
    s.window_len = Get<std::size_t>(j, "window_len", s.window_len);
    s.window_width = Get<double>(j, "window_width", s.window_width);
    s.hop = Get<std::size_t>(j, "hop", s.hop);
    s.channels = Get<std::size_t>(j, "channels", s.channels);
    s.synthesis = ParseSynthesisChoice(Get<std::string>(j, "synthesis", "dual"));
    Require(s.synthesis != SynthesisChoice::kExplicit,
            "stft_blur step supports dual or tight synthesis");
    if (j.contains("kernel")) s.kernel = KernelFromJson(j.at("kernel"));
    s.renormalize = Get<bool>(j, "renormalize", s.renormalize);
    return s;
  }
  if (type == "spec_augment") {
    RejectUnknown(j,
                  {"type", "n_time_masks", "max_time_width", "n_freq_masks",
                   "max_freq_width", "fill"},
                  "spec_augment step");
    SpecAugmentStep s;
    s.n_time_masks = Get<std::size_t>(j, "n_time_masks", s.n_time_masks);
    s.max_time_width = Get<std::size_t>(j, "max_time_width", s.max_time_width);
    s.n_freq_masks = Get<std::size_t>(j, "n_freq_masks", s.n_freq_masks);
    s.max_freq_width = Get<std::size_t>(j, "max_freq_width", s.max_freq_width);
    auto fill = Get<std::string>(j, "fill", "mean");
    if (fill == "mean") s.fill = MaskFill::kMean;
    else if (fill == "zero") s.fill = MaskFill::kZero;
    else Fail(ErrorCode::kFormat, "fill must be 'mean' or 'zero'");
    return s;
  }
  if (type == "spec_blur") {
    RejectUnknown(j, {"type", "kernel", "boundary"}, "spec_blur step");
    SpecBlurStep s;
    if (j.contains("kernel")) s.kernel = KernelFromJson(j.at("kernel"));
    s.boundary = ParseGridBoundary(Get<std::string>(j, "boundary", "replicate"));
    return s;
  }
  Fail(ErrorCode::kFormat, "unknown step type '" + type + "'");
}

json StepToJson(const AugmentStep& step) {
  if (const auto* s = std::get_if<WhiteNoiseStep>(&step)) {
    json snr = std::isinf(s->snr_db) ? json("inf") : json(s->snr_db);
    return json{{"type", "white_noise"}, {"snr_db", snr}};
  }
  if (const auto* s = std::get_if<StftBlurStep>(&step)) {
    return json{{"type", "stft_blur"},
                {"window", WindowKindName(s->window)},
                {"window_len", s->window_len},
                {"window_width", s->window_width},
                {"hop", s->hop},
                {"channels", s->channels},
                {"synthesis", SynthesisName(s->synthesis)},
                {"kernel", KernelToJson(s->kernel)},
                {"renormalize", s->renormalize}};
  }
  if (const auto* s = std::get_if<SpecAugmentStep>(&step)) {
    return json{{"type", "spec_augment"},
                {"n_time_masks", s->n_time_masks},
                {"max_time_width", s->max_time_width},
                {"n_freq_masks", s->n_freq_masks},
                {"max_freq_width", s->max_freq_width},
                {"fill", s->fill == MaskFill::kMean ? "mean" : "zero"}};
  }
  const auto& s = std::get<SpecBlurStep>(step);
  return json{{"type", "spec_blur"},
              {"kernel", KernelToJson(s.kernel)},
              {"boundary", GridBoundaryName(s.boundary)}};
}

}  // namespace

AugmentConfig AugmentConfigFromJson(const json& j) {
  RejectUnknown(j, {"schema_version", "master_seed", "replay", "features", "steps"},
                "config");
  const int version = Get<int>(j, "schema_version", -1);
  if (version != kConfigSchemaVersion)
    Fail(ErrorCode::kFormat, "unsupported schema_version " + std::to_string(version));
  AugmentConfig c;
  c.master_seed = Get<std::uint64_t>(j, "master_seed", 0);
  auto replay = Get<std::string>(j, "replay", "fixed");
  if (replay == "fixed") c.replay = ReplayMode::kFixed;
  else if (replay == "per_epoch") c.replay = ReplayMode::kPerEpoch;
  else Fail(ErrorCode::kFormat, "replay must be 'fixed' or 'per_epoch'");
  if (j.contains("features")) c.features = FeatureConfigFromJson(j.at("features"));
  if (j.contains("steps")) {
    if (!j.at("steps").is_array()) Fail(ErrorCode::kFormat, "steps must be an array");
    for (const auto& s : j.at("steps")) c.steps.push_back(StepFromJson(s));
  }
  c.Validate();
  return c;
}

json AugmentConfigToJson(const AugmentConfig& c) {
  json steps = json::array();
  for (const auto& s : c.steps) steps.push_back(StepToJson(s));
  return json{{"schema_version", kConfigSchemaVersion},
              {"master_seed", c.master_seed},
              {"replay", c.replay == ReplayMode::kFixed ? "fixed" : "per_epoch"},
              {"features", FeatureConfigToJson(c.features)},
              {"steps", steps}};
}

AugmentConfig LoadAugmentConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kFormat, "config " + path.string() + ": " + e.what());
  }
  return AugmentConfigFromJson(j);
}

}  // namespace tfblur

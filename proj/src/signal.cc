#include "tfblur/signal.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numbers>
#include <random>

#include "tfblur/error.h"

namespace tfblur {

double Signal::Energy() const {
  double e = 0.0;
  for (const auto& s : samples) e += std::norm(s);
  return e;
}

double Signal::Norm() const { return std::sqrt(Energy()); }

std::vector<double> Signal::Real() const {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].real();
  return out;
}

Signal Signal::FromReal(std::span<const double> values, int sample_rate) {
  Signal s;
  s.sample_rate = sample_rate;
  s.samples.assign(values.begin(), values.end());
  return s;
}

Signal Signal::FromComplex(std::vector<cplx> values, int sample_rate) {
  Signal s;
  s.sample_rate = sample_rate;
  s.samples = std::move(values);
  s.is_complex = true;
  return s;
}

void CheckSignal(const Signal& signal) {
  Require(signal.sample_rate > 0, "sample rate must be positive");
  for (const auto& s : signal.samples) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      Fail(ErrorCode::kInvalidArgument, "signal contains non-finite samples");
  }
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV codec assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T Load(std::span<const std::uint8_t> bytes, std::size_t offset) {
  if (offset + sizeof(T) > bytes.size())
    Fail(ErrorCode::kFormat, "truncated WAV data");
  T v;
  std::memcpy(&v, bytes.data() + offset, sizeof(T));
  return v;
}

template <typename T>
void Store(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

void StoreTag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

bool TagIs(std::span<const std::uint8_t> bytes, std::size_t offset,
           const char* tag) {
  return offset + 4 <= bytes.size() &&
         std::memcmp(bytes.data() + offset, tag, 4) == 0;
}

}  // namespace

Signal ParseWav(std::span<const std::uint8_t> bytes) {
  if (!TagIs(bytes, 0, "RIFF") || !TagIs(bytes, 8, "WAVE"))
    Fail(ErrorCode::kFormat, "missing RIFF/WAVE header");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_offset = 0, data_size = 0;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    auto size = Load<std::uint32_t>(bytes, pos + 4);
    std::size_t body = pos + 8;
    if (TagIs(bytes, pos, "fmt ")) {
      if (size < 16) Fail(ErrorCode::kFormat, "fmt chunk too short");
      format = Load<std::uint16_t>(bytes, body);
      channels = Load<std::uint16_t>(bytes, body + 2);
      rate = Load<std::uint32_t>(bytes, body + 4);
      bits = Load<std::uint16_t>(bytes, body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) Fail(ErrorCode::kFormat, "extensible fmt chunk too short");
        format = Load<std::uint16_t>(bytes, body + 24);
      }
      have_fmt = true;
    } else if (TagIs(bytes, pos, "data")) {
      data_offset = body;
      data_size = std::min<std::size_t>(size, bytes.size() - body);
      have_data = true;
      break;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) Fail(ErrorCode::kFormat, "missing fmt chunk");
  if (!have_data) Fail(ErrorCode::kFormat, "missing data chunk");
  if (channels == 0 || rate == 0) Fail(ErrorCode::kFormat, "bad fmt fields");

  std::size_t sample_bytes;
  if (format == kFormatPcm && bits == 16) {
    sample_bytes = 2;
  } else if (format == kFormatFloat && bits == 32) {
    sample_bytes = 4;
  } else {
    Fail(ErrorCode::kUnsupported, "encoding format " + std::to_string(format) +
                                      " with " + std::to_string(bits) +
                                      " bits per sample");
  }
  if (channels > 1) {
    std::cerr << "warning: " << channels
              << "-channel WAV, using channel 0 only\n";
  }

  std::size_t frame_bytes = sample_bytes * channels;
  std::size_t frames = data_size / frame_bytes;
  Signal out;
  out.sample_rate = static_cast<int>(rate);
  out.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    std::size_t off = data_offset + i * frame_bytes;
    double v;
    if (sample_bytes == 2) {
      v = Load<std::int16_t>(bytes, off) / 32768.0;
    } else {
      v = Load<float>(bytes, off);
      if (!std::isfinite(v)) Fail(ErrorCode::kFormat, "non-finite float sample");
    }
    out.samples[i] = v;
  }
  return out;
}

Signal ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return ParseWav(bytes);
}

std::vector<std::uint8_t> EncodeWav(const Signal& signal) {
  CheckSignal(signal);
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(signal.length() * sizeof(float));
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  StoreTag(out, "RIFF");
  Store<std::uint32_t>(out, 36 + data_size);
  StoreTag(out, "WAVE");
  StoreTag(out, "fmt ");
  Store<std::uint32_t>(out, 16);
  Store<std::uint16_t>(out, kFormatFloat);
  Store<std::uint16_t>(out, 1);
  Store<std::uint32_t>(out, static_cast<std::uint32_t>(signal.sample_rate));
  Store<std::uint32_t>(out, static_cast<std::uint32_t>(signal.sample_rate) * 4);
  Store<std::uint16_t>(out, 4);
  Store<std::uint16_t>(out, 32);
  StoreTag(out, "data");
  Store<std::uint32_t>(out, data_size);
  for (const auto& s : signal.samples) Store<float>(out, static_cast<float>(s.real()));
  return out;
}

void WriteWav(const Signal& signal, const std::filesystem::path& path) {
  auto bytes = EncodeWav(signal);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIo, "short write to " + path.string());
}

Signal PadToLength(const Signal& signal, std::size_t target) {
  if (target < signal.length())
    Fail(ErrorCode::kInvalidArgument,
         "pad target " + std::to_string(target) + " shorter than signal (" +
             std::to_string(signal.length()) + ")");
  std::size_t extra = target - signal.length();
  Signal out = signal;
  out.samples.assign(target, cplx{});
  std::copy(signal.samples.begin(), signal.samples.end(),
            out.samples.begin() + static_cast<std::ptrdiff_t>(extra / 2));
  return out;
}

SignalKind ParseSignalKind(const std::string& name) {
  if (name == "sinusoid") return SignalKind::kSinusoid;
  if (name == "chirp") return SignalKind::kChirp;
  if (name == "white_noise") return SignalKind::kWhiteNoise;
  if (name == "impulse") return SignalKind::kImpulse;
  if (name == "gaussian_pulse") return SignalKind::kGaussianPulse;
  Fail(ErrorCode::kInvalidArgument, "unknown signal kind '" + name + "'");
}

Signal GenSignal(SignalKind kind, const GenParams& p, std::uint64_t seed) {
  Require(p.sample_rate > 0, "sample rate must be positive");
  const double nyquist = p.sample_rate / 2.0;
  const double sr = p.sample_rate;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> x(p.length, 0.0);

  switch (kind) {
    case SignalKind::kSinusoid:
      Require(p.frequency >= 0 && p.frequency < nyquist,
              "sinusoid frequency must lie in [0, Nyquist)");
      for (std::size_t t = 0; t < p.length; ++t)
        x[t] = std::sin(two_pi * p.frequency * static_cast<double>(t) / sr);
      break;
    case SignalKind::kChirp: {
      Require(p.f_start >= 0 && p.f_start < nyquist && p.f_end >= 0 &&
                  p.f_end < nyquist,
              "chirp frequencies must lie in [0, Nyquist)");
      const double duration = static_cast<double>(p.length) / sr;
      const double rate = duration > 0 ? (p.f_end - p.f_start) / duration : 0.0;
      for (std::size_t t = 0; t < p.length; ++t) {
        double tau = static_cast<double>(t) / sr;
        x[t] = std::sin(two_pi * (p.f_start * tau + 0.5 * rate * tau * tau));
      }
      break;
    }
    case SignalKind::kWhiteNoise: {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (auto& v : x) v = normal(rng);
      break;
    }
    case SignalKind::kImpulse: {
      std::size_t at = p.position.value_or(0);
      Require(at < p.length, "impulse position outside signal");
      x[at] = 1.0;
      break;
    }
    case SignalKind::kGaussianPulse: {
      Require(p.frequency >= 0 && p.frequency < nyquist,
              "pulse carrier frequency must lie in [0, Nyquist)");
      Require(p.width > 0, "pulse width must be positive");
      const double center = static_cast<double>(p.position.value_or(p.length / 2));
      for (std::size_t t = 0; t < p.length; ++t) {
        double d = static_cast<double>(t) - center;
        x[t] = std::exp(-std::numbers::pi * (d / p.width) * (d / p.width)) *
               std::cos(two_pi * p.frequency * d / sr);
      }
      break;
    }
  }
  return Signal::FromReal(x, p.sample_rate);
}

Signal RandomSignal(std::size_t length, std::uint64_t seed, bool complex_valued,
                    int sample_rate) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Signal s;
  s.sample_rate = sample_rate;
  s.is_complex = complex_valued;
  s.samples.resize(length);
  const double scale = complex_valued ? std::sqrt(0.5) : 1.0;
  for (auto& v : s.samples) {
    double re = normal(rng);
    double im = complex_valued ? normal(rng) : 0.0;
    v = scale * cplx(re, im);
  }
  return s;
}

}  // namespace tfblur

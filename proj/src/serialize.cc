#include "tfblur/serialize.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "tfblur/error.h"

namespace tfblur {

using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little,
              "feature files are written in host order, which must be little-endian");

void AppendFloat(std::vector<std::uint8_t>& out, double v) {
  float f = static_cast<float>(v);
  std::uint8_t buf[4];
  std::memcpy(buf, &f, 4);
  out.insert(out.end(), buf, buf + 4);
}

float LoadFloat(const std::vector<std::uint8_t>& bytes, std::size_t index) {
  float f;
  std::memcpy(&f, bytes.data() + 4 * index, 4);
  return f;
}

json ReadJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

}  // namespace

std::filesystem::path SidecarPath(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

void WriteFileAtomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) Fail(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) Fail(ErrorCode::kIo, "rename to " + path.string() + ": " + ec.message());
}

void WriteFileAtomic(const std::filesystem::path& path, const std::string& text) {
  WriteFileAtomic(path, std::span<const std::uint8_t>(
                            reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json LatticeToJson(const Lattice& lat) {
  return json{{"L", lat.signal_len}, {"a", lat.hop},
              {"M", lat.channels},   {"W", lat.window_len},
              {"mode", BoundaryModeName(lat.mode)}};
}

Lattice LatticeFromJson(const json& j) {
  try {
    Lattice lat;
    lat.signal_len = j.at("L").get<std::size_t>();
    lat.hop = j.at("a").get<std::size_t>();
    lat.channels = j.at("M").get<std::size_t>();
    lat.window_len = j.at("W").get<std::size_t>();
    lat.mode = ParseBoundaryMode(j.at("mode").get<std::string>());
    return lat;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kFormat, std::string("lattice sidecar: ") + e.what());
  }
}

std::vector<std::uint8_t> EncodeTfMatrix(const TfMatrix& tf) {
  std::vector<std::uint8_t> out;
  out.reserve(tf.coeffs.size() * 8);
  for (const auto& c : tf.coeffs) {
    AppendFloat(out, c.real());
    AppendFloat(out, c.imag());
  }
  return out;
}

void WriteTfMatrix(const TfMatrix& tf, const std::filesystem::path& path) {
  json side = LatticeToJson(tf.lattice);
  side["sample_rate"] = tf.sample_rate;
  WriteFileAtomic(path, EncodeTfMatrix(tf));
  WriteFileAtomic(SidecarPath(path), side.dump(2) + "\n");
}

TfMatrix ReadTfMatrix(const std::filesystem::path& path) {
  json side = ReadJson(SidecarPath(path));
  TfMatrix tf(LatticeFromJson(side), side.value("sample_rate", 16000));
  auto bytes = ReadFileBytes(path);
  if (bytes.size() != tf.coeffs.size() * 8)
    Fail(ErrorCode::kFormat, "coefficient file size does not match sidecar");
  for (std::size_t i = 0; i < tf.coeffs.size(); ++i)
    tf.coeffs[i] = {LoadFloat(bytes, 2 * i), LoadFloat(bytes, 2 * i + 1)};
  return tf;
}

std::vector<std::uint8_t> EncodeSpectrogram(const Spectrogram& spec) {
  std::vector<std::uint8_t> out;
  out.reserve(spec.values.size() * 4);
  for (double v : spec.values) AppendFloat(out, v);
  return out;
}

json SpectrogramSidecar(const Spectrogram& spec) {
  return json{{"frames", spec.frames},
              {"bins", spec.bins},
              {"scale", spec.scale == SpecScale::kDb ? "db" : "power"},
              {"floor_power", spec.floor_power},
              {"mel", spec.mel},
              {"sample_rate", spec.sample_rate},
              {"lattice", LatticeToJson(spec.lattice)},
              {"dtype", "float32le"},
              {"layout", "row-major, frames first"}};
}

void WriteSpectrogram(const Spectrogram& spec, const std::filesystem::path& path,
                      const json& extra) {
  json side = SpectrogramSidecar(spec);
  for (auto it = extra.begin(); it != extra.end(); ++it) side[it.key()] = it.value();
  WriteFileAtomic(path, EncodeSpectrogram(spec));
  WriteFileAtomic(SidecarPath(path), side.dump(2) + "\n");
}

Spectrogram ReadSpectrogram(const std::filesystem::path& path) {
  json side = ReadJson(SidecarPath(path));
  Spectrogram s;
  try {
    s.frames = side.at("frames").get<std::size_t>();
    s.bins = side.at("bins").get<std::size_t>();
    s.scale = side.at("scale").get<std::string>() == "db" ? SpecScale::kDb : SpecScale::kPower;
    s.floor_power = side.value("floor_power", 0.0);
    s.mel = side.value("mel", false);
    s.sample_rate = side.value("sample_rate", 16000);
    s.lattice = LatticeFromJson(side.at("lattice"));
  } catch (const json::exception& e) {
    Fail(ErrorCode::kFormat, "feature sidecar: " + std::string(e.what()));
  }
  auto bytes = ReadFileBytes(path);
  if (bytes.size() != s.frames * s.bins * 4)
    Fail(ErrorCode::kFormat, "feature file size does not match sidecar");
  s.values.resize(s.frames * s.bins);
  for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = LoadFloat(bytes, i);
  return s;
}

std::string SpectrogramToCsv(const Spectrogram& spec) {
  std::ostringstream os;
  os.precision(9);
  for (std::size_t n = 0; n < spec.frames; ++n) {
    for (std::size_t k = 0; k < spec.bins; ++k) {
      if (k) os << ',';
      os << spec.at(n, k);
    }
    os << '\n';
  }
  return os.str();
}

std::vector<std::uint8_t> SpectrogramToPgm(const Spectrogram& spec) {
  Spectrogram norm = Normalize01(spec);
  std::string header = "P5\n" + std::to_string(spec.frames) + " " +
                       std::to_string(spec.bins) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + spec.frames * spec.bins);
  for (std::size_t row = 0; row < spec.bins; ++row) {
    std::size_t k = spec.bins - 1 - row;
    for (std::size_t n = 0; n < spec.frames; ++n)
      out.push_back(static_cast<std::uint8_t>(std::lround(norm.at(n, k) * 255.0)));
  }
  return out;
}

}  // namespace tfblur

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfblur/features.h"
#include "tfblur/gabor.h"

namespace tfblur {

// Writes to a sibling temp file and renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void WriteFileAtomic(const std::filesystem::path& path, const std::string& text);
std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);

nlohmann::json LatticeToJson(const Lattice& lattice);
Lattice LatticeFromJson(const nlohmann::json& j);

// Raw little-endian float32, interleaved (re, im), frames first, plus a JSON
// sidecar {L, a, M, W, mode, sample_rate} at <path>.json.
std::vector<std::uint8_t> EncodeTfMatrix(const TfMatrix& tf);
void WriteTfMatrix(const TfMatrix& tf, const std::filesystem::path& path);
TfMatrix ReadTfMatrix(const std::filesystem::path& path);

// Raw little-endian float32 row-major (frames first) plus a JSON sidecar.
std::vector<std::uint8_t> EncodeSpectrogram(const Spectrogram& spec);
nlohmann::json SpectrogramSidecar(const Spectrogram& spec);
void WriteSpectrogram(const Spectrogram& spec, const std::filesystem::path& path,
                      const nlohmann::json& extra = nlohmann::json::object());
Spectrogram ReadSpectrogram(const std::filesystem::path& path);

std::string SpectrogramToCsv(const Spectrogram& spec);

// 8-bit binary PGM after 0-1 normalization. Rows are bins with the highest
// bin on top, columns are frames.
std::vector<std::uint8_t> SpectrogramToPgm(const Spectrogram& spec);

std::filesystem::path SidecarPath(const std::filesystem::path& path);

}  // namespace tfblur

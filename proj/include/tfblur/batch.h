#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tfblur/augment.h"

namespace tfblur {

struct BatchItem {
  std::filesystem::path input;
  std::string item_id;  // relative path; also keys the random streams
};

struct BatchManifest {
  std::vector<BatchItem> items;
  std::filesystem::path output_dir;

  // Item ids must be unique relative paths that stay inside output_dir.
  void Validate() const;
};

// One input path per line, relative to the listing file's directory unless
// absolute. Blank lines and lines starting with '#' are skipped. The item id
// is the path as written.
BatchManifest ManifestFromListing(const std::filesystem::path& listing,
                                  const std::filesystem::path& output_dir);

// Every *.wav below `dir`, sorted; item id = path relative to `dir`.
BatchManifest ManifestFromDirectory(const std::filesystem::path& dir,
                                    const std::filesystem::path& output_dir);

// <output_dir>/<item_id with extension replaced by .f32>
std::filesystem::path FeaturePathFor(const BatchManifest& manifest, const BatchItem& item);

struct BatchResult {
  std::size_t succeeded = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // (item id, message)
};

// Runs the pipeline for every item on `workers` threads (0 = hardware
// concurrency). Outputs depend only on (config, item id, epoch), never on
// scheduling. Failures are collected in <output_dir>/errors.log.
BatchResult RunBatch(const BatchManifest& manifest, const AugmentConfig& config,
                     unsigned workers = 0, std::uint64_t epoch = 0);

}  // namespace tfblur

#include "tfblur/batch.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "tfblur/config.h"
#include "tfblur/error.h"
#include "tfblur/serialize.h"

namespace tfblur {

namespace fs = std::filesystem;

void BatchManifest::Validate() const {
  std::set<std::string> seen;
  for (const auto& item : items) {
    fs::path id(item.item_id);
    Require(!item.item_id.empty() && id.is_relative(),
            "item id '" + item.item_id + "' must be a relative path");
    for (const auto& part : id)
      Require(part != "..", "item id '" + item.item_id + "' escapes the output directory");
    Require(seen.insert(item.item_id).second, "duplicate item id '" + item.item_id + "'");
  }
}

BatchManifest ManifestFromListing(const fs::path& listing, const fs::path& output_dir) {
  std::ifstream in(listing);
  if (!in) Fail(ErrorCode::kIo, "cannot open manifest " + listing.string());
  BatchManifest m;
  m.output_dir = output_dir;
  const fs::path base = listing.parent_path();
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    fs::path p(line);
    BatchItem item;
    item.input = p.is_absolute() ? p : base / p;
    item.item_id = p.is_absolute() ? p.relative_path().string() : p.lexically_normal().string();
    m.items.push_back(std::move(item));
  }
  m.Validate();
  return m;
}

BatchManifest ManifestFromDirectory(const fs::path& dir, const fs::path& output_dir) {
  if (!fs::is_directory(dir)) Fail(ErrorCode::kIo, dir.string() + " is not a directory");
  BatchManifest m;
  m.output_dir = output_dir;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".wav") continue;
    m.items.push_back({entry.path(), fs::relative(entry.path(), dir).string()});
  }
  std::sort(m.items.begin(), m.items.end(),
            [](const BatchItem& a, const BatchItem& b) { return a.item_id < b.item_id; });
  m.Validate();
  return m;
}

fs::path FeaturePathFor(const BatchManifest& manifest, const BatchItem& item) {
  fs::path rel(item.item_id);
  rel.replace_extension(".f32");
  return manifest.output_dir / rel;
}

BatchResult RunBatch(const BatchManifest& manifest, const AugmentConfig& config,
                     unsigned workers, std::uint64_t epoch) {
  manifest.Validate();
  config.Validate();
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max<std::size_t>(1, manifest.items.size()));

  const nlohmann::json config_json = AugmentConfigToJson(config);
  std::vector<std::string> errors(manifest.items.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= manifest.items.size()) return;
      const BatchItem& item = manifest.items[i];
      try {
        Signal s = ReadWav(item.input);
        Spectrogram feats = RunPipeline(s, config, item.item_id, epoch);
        nlohmann::json extra{{"item_id", item.item_id}, {"config", config_json}};
        if (config.replay == ReplayMode::kPerEpoch) extra["epoch"] = epoch;
        WriteSpectrogram(feats, FeaturePathFor(manifest, item), extra);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        if (errors[i].empty()) errors[i] = "unknown failure";
      }
    }
  };

  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  BatchResult result;
  std::ostringstream log;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i].empty()) {
      ++result.succeeded;
    } else {
      result.failures.emplace_back(manifest.items[i].item_id, errors[i]);
      log << manifest.items[i].item_id << '\t' << errors[i] << '\n';
    }
  }
  const fs::path log_path = manifest.output_dir / "errors.log";
  if (!result.failures.empty()) {
    WriteFileAtomic(log_path, log.str());
  } else {
    std::error_code ec;
    fs::remove(log_path, ec);
  }
  return result;
}

}  // namespace tfblur

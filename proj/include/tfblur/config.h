#pragma once

#include <filesystem>

#include "json.hpp"
#include "tfblur/augment.h"
#include "tfblur/kernels.h"

namespace tfblur {

inline constexpr int kConfigSchemaVersion = 1;

// Kernel literal: {"kind": "gaussian", "sigma_t", "sigma_f", "truncation",
// "normalize"} | {"kind": "delta"} | {"kind": "custom", "taps": [[...], ...]}.
// Unknown keys raise kFormat.
Kernel KernelFromJson(const nlohmann::json& j);
nlohmann::json KernelToJson(const Kernel& kernel);

// Versioned pipeline config; see README for the schema.
AugmentConfig AugmentConfigFromJson(const nlohmann::json& j);
nlohmann::json AugmentConfigToJson(const AugmentConfig& config);
AugmentConfig LoadAugmentConfig(const std::filesystem::path& path);

FeatureConfig FeatureConfigFromJson(const nlohmann::json& j);
nlohmann::json FeatureConfigToJson(const FeatureConfig& config);

}  // namespace tfblur

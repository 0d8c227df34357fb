#pragma once

#include <string>

#include "json.hpp"

#include "phdae/model.h"

namespace phdae::cli {

/// Reads the model JSON format: "E","J","R","Q","B" as row-major nested
/// arrays, "x0", "T" and "input" (one tagged object or an array of them).
/// Throws ConfigError on malformed files.
PhDaeSystem ModelFromJson(const nlohmann::json& j);
nlohmann::json ModelToJson(const PhDaeSystem& sys);

PhDaeSystem LoadModelFile(const std::string& path);
void SaveModelFile(const PhDaeSystem& sys, const std::string& path);

}  // namespace phdae::cli

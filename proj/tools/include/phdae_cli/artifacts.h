#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace phdae::cli {

/// Shortest-exact formatting is not required; CSV cells use 17 significant
/// digits so values round-trip.
std::string FormatDouble(double v);

/// Hex SHA-256 of a byte string.
std::string Sha256Hex(const std::string& bytes);

/// Collects output files and writes manifest.json listing each with its hash.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);

  void WriteText(const std::string& name, const std::string& content);
  void WriteJson(const std::string& name, const nlohmann::json& j);
  void WriteCsv(const std::string& name, const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows);
  /// Writes manifest.json; call last.
  void WriteManifest(const std::string& command, const std::string& model);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  nlohmann::json files_ = nlohmann::json::array();
};

}  // namespace phdae::cli

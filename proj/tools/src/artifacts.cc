#include "phdae_cli/artifacts.h"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "phdae/error.h"

namespace phdae::cli {

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Sha256Hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* kHex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    throw Error(ErrorCode::kConfigError,
                "cannot create output directory " + dir_.string());
  }
}

void ArtifactWriter::WriteText(const std::string& name,
                               const std::string& content) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kConfigError, "cannot write " + path.string());
  out << content;
  out.close();
  files_.push_back({{"path", name},
                    {"bytes", content.size()},
                    {"sha256", Sha256Hex(content)}});
}

void ArtifactWriter::WriteJson(const std::string& name, const nlohmann::json& j) {
  WriteText(name, j.dump(2) + "\n");
}

void ArtifactWriter::WriteCsv(const std::string& name,
                              const std::vector<std::string>& header,
                              const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t c = 0; c < header.size(); ++c) {
    os << (c ? "," : "") << header[c];
  }
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << (c ? "," : "") << FormatDouble(row[c]);
    }
    os << "\n";
  }
  WriteText(name, os.str());
}

void ArtifactWriter::WriteManifest(const std::string& command,
                                   const std::string& model) {
  nlohmann::json m;
  m["command"] = command;
  m["model"] = model;
  m["files"] = files_;
  const auto path = dir_ / "manifest.json";
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kConfigError, "cannot write " + path.string());
  out << m.dump(2) << "\n";
}

}  // namespace phdae::cli

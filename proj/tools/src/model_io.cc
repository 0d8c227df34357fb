#include "phdae_cli/model_io.h"

#include <fstream>

#include "phdae/error.h"

namespace phdae::cli {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& msg) {
  throw Error(ErrorCode::kConfigError, "model file: " + msg);
}

const json& Field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) Fail(std::string("missing \"") + key + "\"");
  return j.at(key);
}

double Number(const json& j, const char* key) {
  const json& v = Field(j, key);
  if (!v.is_number()) Fail(std::string("\"") + key + "\" must be a number");
  return v.get<double>();
}

Matrix ReadMatrix(const json& j, const char* key) {
  const json& v = Field(j, key);
  if (!v.is_array()) Fail(std::string("\"") + key + "\" must be a nested array");
  const auto rows = v.size();
  if (rows == 0) return Matrix(0, 0);
  if (!v[0].is_array()) Fail(std::string("\"") + key + "\" rows must be arrays");
  const auto cols = v[0].size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) {
      Fail(std::string("\"") + key + "\" is ragged");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!v[i][c].is_number()) Fail(std::string("\"") + key + "\" has a non-number");
      m(i, c) = v[i][c].get<double>();
    }
  }
  return m;
}

std::vector<double> ReadArray(const json& j, const char* key) {
  const json& v = Field(j, key);
  if (!v.is_array()) Fail(std::string("\"") + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) Fail(std::string("\"") + key + "\" has a non-number");
    out.push_back(x.get<double>());
  }
  return out;
}

Waveform ReadWaveform(const json& j) {
  const std::string kind = Field(j, "kind").get<std::string>();
  if (kind == "sine_burst") {
    return SineBurst{Number(j, "amplitude"), Number(j, "frequency"),
                     Number(j, "cutoff")};
  }
  if (kind == "gaussian") {
    return GaussianPulse{Number(j, "amplitude"), Number(j, "center"),
                         Number(j, "width")};
  }
  if (kind == "table") {
    return PiecewiseLinearTable{ReadArray(j, "times"), ReadArray(j, "values")};
  }
  if (kind == "zero") return ZeroInput{};
  Fail("unknown input kind \"" + kind + "\"");
}

json WriteWaveform(const Waveform& w) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SineBurst>) {
          return {{"kind", "sine_burst"}, {"amplitude", v.amplitude},
                  {"frequency", v.frequency}, {"cutoff", v.cutoff}};
        } else if constexpr (std::is_same_v<T, GaussianPulse>) {
          return {{"kind", "gaussian"}, {"amplitude", v.amplitude},
                  {"center", v.center}, {"width", v.width}};
        } else if constexpr (std::is_same_v<T, PiecewiseLinearTable>) {
          return {{"kind", "table"}, {"times", v.times}, {"values", v.values}};
        } else {
          return {{"kind", "zero"}};
        }
      },
      w);
}

json WriteMatrix(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

PhDaeSystem ModelFromJson(const json& j) {
  if (!j.is_object()) Fail("top level must be an object");
  PhDaeSystem sys;
  try {
    sys.E = ReadMatrix(j, "E");
    sys.J = ReadMatrix(j, "J");
    sys.R = ReadMatrix(j, "R");
    sys.Q = ReadMatrix(j, "Q");
    sys.B = ReadMatrix(j, "B");
    const std::vector<double> x0 = ReadArray(j, "x0");
    sys.x0 = Eigen::Map<const Vector>(x0.data(), static_cast<Eigen::Index>(x0.size()));
    sys.T = Number(j, "T");
    const json& in = Field(j, "input");
    std::vector<Waveform> channels;
    if (in.is_array()) {
      for (const auto& w : in) channels.push_back(ReadWaveform(w));
    } else {
      channels.push_back(ReadWaveform(in));
    }
    const bool exact = j.value("exact_moments", true);
    sys.input = InputSignal(std::move(channels), exact);
  } catch (const json::exception& e) {
    Fail(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    Fail(e.what());
  }
  return sys;
}

json ModelToJson(const PhDaeSystem& sys) {
  json j;
  j["E"] = WriteMatrix(sys.E);
  j["J"] = WriteMatrix(sys.J);
  j["R"] = WriteMatrix(sys.R);
  j["Q"] = WriteMatrix(sys.Q);
  j["B"] = WriteMatrix(sys.B);
  j["x0"] = std::vector<double>(sys.x0.data(), sys.x0.data() + sys.x0.size());
  j["T"] = sys.T;
  if (sys.input.channels() == 1) {
    j["input"] = WriteWaveform(sys.input.channel(0));
  } else {
    json arr = json::array();
    for (const auto& w : sys.input.waveforms()) arr.push_back(WriteWaveform(w));
    j["input"] = arr;
  }
  j["exact_moments"] = sys.input.exact();
  return j;
}

PhDaeSystem LoadModelFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open model file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    Fail(e.what());
  }
  return ModelFromJson(j);
}

void SaveModelFile(const PhDaeSystem& sys, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kConfigError, "cannot write " + path);
  out << ModelToJson(sys).dump(2) << "\n";
}

}  // namespace phdae::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace phdae::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitStudy = 2;

struct RunConfig {
  std::string command;
  /// Builtin name (academic, tline, tline-reg) or path to a model JSON file.
  std::string model{"academic"};
  std::filesystem::path out_dir{"out"};
  /// 0 keeps PHDAE_THREADS or the hardware default.
  int threads{0};
  std::uint64_t seed{20240531};

  std::optional<int> N;
  std::optional<double> tol;
  std::optional<double> theta;
  std::optional<double> rho;
  std::optional<int> max_iter;
  std::optional<int> max_N;
  std::optional<int> sweeps;
  std::optional<int> N_ref;
  std::optional<std::string> indicator;
  std::optional<std::string> adjoint;
  std::vector<double> targets;
  std::vector<int> N_list;
  std::vector<int> nodes;
  /// contraction: adaptive iterations applied before reporting.
  int adapt_iter{0};
};

const std::vector<std::string>& Commands();

/// Executes one command, writes artifacts plus manifest.json into out_dir and
/// returns the exit status. Failures print "error: <Kind>: <reason>" on err.
int Run(const RunConfig& config, std::ostream& log, std::ostream& err);

}  // namespace phdae::cli

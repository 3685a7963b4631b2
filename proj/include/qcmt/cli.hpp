#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qcmt/gaussian.hpp"
#include "qcmt/kernels.hpp"
#include "qcmt/vacuum.hpp"

namespace qcmt::cli {

enum class Mode { verify, moments, gram, boost_scan, witness };

std::string to_string(Mode m);
std::optional<Mode> parse_mode(const std::string& s);

enum ExitCode : int {
  kExitPass = 0,
  kExitCheckFailure = 1,
  kExitConfigError = 2,
  kExitNumericalFailure = 3,
};

/// Invalid configuration; `field()` is a JSON-pointer-like path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct MatrixKernelConfig {
  std::vector<std::string> indices;
  std::vector<std::pair<std::string, std::string>> involution;
  Eigen::MatrixXcd entries;
};

struct GibbsKernelConfig {
  double mass = 1.0;
  double frequency = 1.0;
  double temperature = 1.0;
};

struct NamedPacket {
  std::string name;
  Wavepacket packet;
};

struct FieldKernelConfig {
  FieldKernelSpec spec;
  std::vector<NamedPacket> packets;
};

using KernelConfig =
    std::variant<MatrixKernelConfig, GibbsKernelConfig, FieldKernelConfig>;

struct ExperimentConfig {
  std::optional<Mode> mode;
  KernelConfig kernel;
  std::vector<std::string> words;
  std::vector<double> rapidities;
  std::vector<double> betas;
  std::vector<double> separations;
  std::vector<std::string> pair;
  std::uint64_t seed = 0;
  double tolerance = kPsdTolerance;
  std::size_t max_degree = 2;
  std::size_t trials = 200;
  std::string output;
  bool record_timing = false;
  nlohmann::ordered_json echo;
};

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::ordered_json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// 3x3 trivial-involution kernel [[1,.5,.2],[.5,1,.3],[.2,.3,1]].
ExperimentConfig default_config();

/// Kernel over user-facing index names. Field packets that are not real get
/// a conjugate index named "<name>^c".
GaussianKernel build_kernel(const ExperimentConfig& config);

/**
 * Parses "M1*M2", "V*Ma", "1" against the kernel's tags. Factors are "M"
 * followed by a tag, or "V" for the vacuum projector. Throws ConfigError
 * (with `field`) for unknown tags.
 */
ExtendedWord parse_word(const std::string& text, const GaussianKernel& kernel,
                        const std::string& field);

struct RunResult {
  int exit_code = kExitPass;
  std::string output;  // report or table
  std::vector<std::string> warnings;
};

RunResult run_verify(const ExperimentConfig& config);
RunResult run_moments(const ExperimentConfig& config);
RunResult run_gram(const ExperimentConfig& config);
RunResult run_boost_scan(const ExperimentConfig& config);
RunResult run_witness(const ExperimentConfig& config);

RunResult run(Mode mode, const ExperimentConfig& config);

}  // namespace qcmt::cli

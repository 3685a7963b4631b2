#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "qcmt/cli.hpp"

namespace {

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("qcmt");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("QCMT_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
};

int execute(qcmt::cli::Mode mode, const Options& opts) {
  using namespace qcmt::cli;
  try {
    ExperimentConfig cfg = opts.config.empty() ? default_config() : load_config(opts.config);
    if (cfg.mode && *cfg.mode != mode) {
      spdlog::warn("config mode '{}' overridden by command '{}'", to_string(*cfg.mode), to_string(mode));
    }
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.tolerance) {
      if (*opts.tolerance < 0) throw ConfigError("--tolerance", "must be non-negative");
      cfg.tolerance = *opts.tolerance;
    }
    if (!opts.out.empty()) cfg.output = opts.out;

    const RunResult result = run(mode, cfg);
    for (const auto& w : result.warnings) spdlog::warn("{}", w);
    if (cfg.output.empty() || cfg.output == "-") {
      std::cout << result.output;
    } else {
      std::ofstream file(cfg.output, std::ios::binary);
      if (!file) throw ConfigError("output", "cannot write '" + cfg.output + "'");
      file << result.output;
    }
    return result.exit_code;
  } catch (const ConfigError& e) {
    spdlog::error("config error in {}", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitNumericalFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Gaussian-state, Koopman and free-field verification toolkit"};
  app.require_subcommand(1);

  Options opts;
  std::optional<qcmt::cli::Mode> chosen;
  for (auto mode : {qcmt::cli::Mode::verify, qcmt::cli::Mode::moments, qcmt::cli::Mode::gram,
                    qcmt::cli::Mode::boost_scan, qcmt::cli::Mode::witness}) {
    auto* sub = app.add_subcommand(qcmt::cli::to_string(mode));
    sub->add_option("--config", opts.config, "JSON experiment config");
    sub->add_option("--out", opts.out, "output path (default stdout)");
    sub->add_option("--seed", opts.seed, "random seed");
    sub->add_option("--tolerance", opts.tolerance, "eigenvalue tolerance");
    sub->callback([mode, &chosen] { chosen = mode; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qcmt::cli::kExitConfigError;
  }
  return execute(*chosen, opts);
}

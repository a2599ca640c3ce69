#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "myula/config.hpp"

namespace myula::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kDiverged = 3, kIoError = 4 };

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"sample", "tmg", "volume", "lasso-path", "bounds", "plan"};
  return names;
}

struct RunOptions {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "run";
  std::optional<std::size_t> reps;
  bool paper_scale = false;
  unsigned threads = 1;
  /// `key=value` entries applied after the config file.
  std::vector<std::string> overrides;
};

/// Everything a subcommand reads. Output files depend only on `config`,
/// `seed`, `reps` and `paper_scale`.
struct RunContext {
  Config config;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  std::size_t reps = 1;
  bool paper_scale = false;
  unsigned threads = 1;
  std::ostream* log = nullptr;
};

/// Merges the config file, `--set` overrides and flags; `seed` and `reps`
/// flags win over the `seed` and `reps` keys.
RunContext make_context(const std::string& command, const RunOptions& opts, std::ostream& log);

void cmd_sample(const RunContext& ctx);
void cmd_tmg(const RunContext& ctx);
void cmd_volume(const RunContext& ctx);
void cmd_lasso_path(const RunContext& ctx);
void cmd_bounds(const RunContext& ctx);
void cmd_plan(const RunContext& ctx);

/// Writes `<out>/manifest`: command, seed, config hash, every config entry
/// and library versions.
void write_run_manifest(const std::string& command, const RunContext& ctx);

/// Maps an exception to 2 (configuration), 3 (numerical divergence) or 4 (I/O).
int exit_code_for(const std::exception_ptr& error);

/// Builds the context, runs the subcommand and reports failures on `err`.
int run(const std::string& command, const RunOptions& opts, std::ostream& log, std::ostream& err);

}  // namespace myula::cli

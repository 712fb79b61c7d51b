#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace okl {

/// Stable process exit codes.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitViolation = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitIo = 4,
};

struct CommandOptions {
  std::string config_path;
  bool force = false;
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed;      // overrides seed0
  std::optional<std::string> out_dir;     // overrides output.directory
  bool quiet = false;
  bool self_test = false;                 // rate-study only
};

/// Runs the loss property battery; 0 iff every check passes.
int cmd_verify_loss(const std::string& name, std::optional<double> q, bool quiet, std::ostream& out,
                    std::ostream& err);

/// Trains every seed of the config, writes one trajectory per seed and a summary.
int cmd_train(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Replicated study plus log-log rate fit against the theoretical exponent.
int cmd_rate_study(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Per-iteration norm envelope, sup bound and partial-sum checks; 1 on any
/// asserted violation.
int cmd_check_bounds(const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace okl

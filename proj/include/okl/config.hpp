#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "okl/kernels.hpp"
#include "okl/losses.hpp"
#include "okl/schedule.hpp"
#include "okl/synthetic.hpp"

namespace okl {

enum class Algorithm { Pointwise, Pairwise };

/// "alg1" / "alg2".
const char* to_string(Algorithm algorithm);

struct LossSpec {
  std::string name = "logistic";
  std::optional<double> q;
  friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

struct KernelSpec {
  std::string family = "gaussian";
  std::optional<double> bandwidth;
  std::optional<int> degree;
  std::optional<double> offset;
  double domain_radius = 1.0;
  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

struct DistributionSpec {
  std::size_t centers = 10;
  double amplitude = 1.5;
  std::uint64_t seed = 1;
  /// "auto" (the link under which the planted h is the loss minimizer),
  /// "logistic", "affine" or "power" (with link_exponent).
  std::string link = "auto";
  std::optional<double> link_exponent;
  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

struct CheckpointSpec {
  /// "geometric": start, 2 start, 4 start, ... up to T, plus T.
  /// "list": the given values.
  std::string policy = "geometric";
  std::size_t start = 1;
  std::vector<std::size_t> values;
  friend bool operator==(const CheckpointSpec&, const CheckpointSpec&) = default;
};

struct ReferenceSpec {
  /// "bayes": closed-form minimizer on the eval set.
  /// "proxy": risk of one long run of length T from its own seed.
  std::string mode = "bayes";
  std::size_t T = 0;
  std::uint64_t seed = 0;
  friend bool operator==(const ReferenceSpec&, const ReferenceSpec&) = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  Algorithm algorithm = Algorithm::Pointwise;
  LossSpec loss;
  KernelSpec kernel;
  double c = 0.5;
  double theta = 0.75;
  std::size_t T = 1024;
  std::size_t n_seeds = 1;
  std::uint64_t seed = 1000;
  std::size_t dimension = 2;
  std::size_t eval_size = 1000;
  std::uint64_t eval_seed = 999;
  DistributionSpec distribution;
  CheckpointSpec checkpoints;
  double delta = 0.02;
  /// "auto", "thm2", "thm3" or "thm4".
  std::string theorem = "auto";
  ReferenceSpec reference;
  bool merge_duplicates = false;
  std::size_t max_pairwise_T = 5000;
  bool exact_norms = false;
  std::string output_directory = "out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses and validates. ConfigError on malformed documents, unknown keys or
/// invalid values.
ExperimentConfig parse_config(const std::string& text);

/// Full document including defaults; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// IoError when the file cannot be read, ConfigError otherwise.
ExperimentConfig load_config(const std::string& path);

/// Every field check, run by parse_config and again before any computation.
void validate_config(const ExperimentConfig& config);

ActivatingLoss build_loss(const ExperimentConfig& config);
Kernel build_kernel(const ExperimentConfig& config);
StepSchedule build_schedule(const ExperimentConfig& config);
Link build_link(const ExperimentConfig& config, const ActivatingLoss& loss);
std::vector<std::size_t> build_checkpoints(const ExperimentConfig& config);
/// The theorem whose exponent the study is compared with.
RateTheorem build_theorem(const ExperimentConfig& config, const ActivatingLoss& loss);

}  // namespace okl

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "okl/config.hpp"
#include "okl/risk.hpp"
#include "okl/synthetic.hpp"
#include "okl/trainers.hpp"

namespace okl {

/// Everything a study shares read-only across its runs.
struct StudyContext {
  ExperimentConfig config;
  ActivatingLoss loss;
  Kernel kernel;
  StepSchedule schedule;
  std::vector<std::size_t> checkpoints;
  SyntheticDistribution distribution;
  EvalSet eval;
  AdmissibilityReport admissibility;
  double reference_risk = 0.0;
  /// "bayes" or "proxy".
  std::string reference_kind;
  /// True when the reference is a minimizer inside the hypothesis space.
  bool reference_in_space = false;
  std::string reference_note;
};

/// Validates the config, plants the distribution, draws the eval set and
/// computes the reference risk (running the proxy run when requested).
StudyContext prepare_study(const ExperimentConfig& config, bool force = false);

struct RunOutcome {
  std::uint64_t seed = 0;
  TrajectoryRecord trajectory;
};

/// One training run whose stream is seeded by `seed`.
RunOutcome run_single(const StudyContext& context, std::uint64_t seed, bool force = false);

struct StudyResult {
  std::vector<std::size_t> checkpoints;
  std::vector<double> mean_risk;
  std::vector<double> mean_excess;
  std::vector<double> stderr_excess;
  std::vector<RunOutcome> runs;  // ordered by seed index
};

/// Runs seeds seed0 .. seed0 + n - 1 on up to `workers` threads and reduces
/// in seed order, so the result does not depend on scheduling. StudyError,
/// naming the seed, when any run fails.
StudyResult run_replicated(const StudyContext& context, std::size_t n_seeds, std::size_t workers = 1,
                           bool force = false);

/// The same driver over an arbitrary per-seed runner; every run must report
/// the same checkpoints.
StudyResult run_replicated(const std::function<RunOutcome(std::uint64_t)>& runner, std::uint64_t seed0,
                           std::size_t n_seeds, std::size_t workers = 1);

/// Mean and standard error per checkpoint of the runs' excess risks.
void aggregate(StudyResult& result);

struct RateFit {
  std::vector<double> abscissae;
  std::vector<double> ordinates;
  std::vector<double> excluded;  // abscissae dropped for nonpositive ordinates
  std::vector<std::string> warnings;
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
};

/// OLS of ln R on ln T. Nonpositive ordinates are dropped with a warning;
/// FitError with fewer than four usable points.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

/// Sample mean and standard error (n - 1 in the variance).
double mean_of(const std::vector<double>& v);
double standard_error(const std::vector<double>& v);

}  // namespace okl

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "okl/hypothesis.hpp"
#include "okl/kernels.hpp"
#include "okl/losses.hpp"
#include "okl/schedule.hpp"

namespace okl {

struct LabeledExample {
  std::vector<double> x;
  int y = 1;
};

/// LabelError unless y is -1 or +1.
void check_label(int y);

/// Pull-based stream of examples.
class ExampleSource {
 public:
  virtual ~ExampleSource() = default;
  /// The next example, or nullopt once the stream is exhausted.
  virtual std::optional<LabeledExample> next() = 0;
};

class VectorSource final : public ExampleSource {
 public:
  explicit VectorSource(std::vector<LabeledExample> examples) : examples_(std::move(examples)) {}
  std::optional<LabeledExample> next() override;

 private:
  std::vector<LabeledExample> examples_;
  std::size_t pos_ = 0;
};

/// g_{t+1} = g_t - gamma_t phi'(y_t g_t(x_t)) y_t G_{x_t}, starting at g_1 = 0.
class PointwiseTrainer {
 public:
  struct Step {
    std::size_t t = 0;
    double gamma = 0.0;
    double prediction = 0.0;   // g_t(x_t)
    double coefficient = 0.0;  // weight on G_{x_t}; 0 leaves g unchanged
  };

  PointwiseTrainer(ActivatingLoss loss, Kernel kernel, StepSchedule schedule, std::size_t dim,
                   ExpansionOptions options = {.merge_duplicates = false, .track_norm = true});

  /// One update with gamma_t from the schedule.
  Step step(const LabeledExample& z);
  /// One update with an explicit step size (DomainError unless gamma > 0).
  Step step(const LabeledExample& z, double gamma);

  /// Index of the next example (1 before any step).
  std::size_t t() const { return t_; }
  const DualExpansion& hypothesis() const { return g_; }
  const ActivatingLoss& loss() const { return loss_; }
  const StepSchedule& schedule() const { return schedule_; }

 private:
  ActivatingLoss loss_;
  StepSchedule schedule_;
  DualExpansion g_;
  std::size_t t_ = 1;
};

/// f_{t+1} = f_t - gamma_t/(t-1) sum_{j<t} phi'((y_t - y_j) f_t(x_t, x_j)) (y_t - y_j) K_{(x_t, x_j)},
/// with f_1 = f_2 = 0. The first example only enters the history. Pairs with
/// equal labels carry an exactly zero coefficient and are not stored.
class PairwiseTrainer {
 public:
  struct Step {
    std::size_t t = 0;
    double gamma = 0.0;
    std::size_t terms_added = 0;
  };

  PairwiseTrainer(ActivatingLoss loss, PairKernel kernel, StepSchedule schedule, std::size_t dim,
                  ExpansionOptions options = {.merge_duplicates = false, .track_norm = true});

  /// Stores z_1. StateError unless no example has been seen.
  void observe_first(const LabeledExample& z);
  /// Update at t >= 2. StateError before observe_first.
  Step step(const LabeledExample& z);
  Step step(const LabeledExample& z, double gamma);
  /// observe_first for the first example, step afterwards.
  Step observe(const LabeledExample& z);

  std::size_t t() const { return history_labels_.size() + 1; }
  std::size_t history_size() const { return history_labels_.size(); }
  std::span<const int> history_labels() const { return history_labels_; }
  /// Row of each past example in hypothesis().points().
  std::span<const std::size_t> history_points() const { return history_points_; }
  const PairExpansion& hypothesis() const { return f_; }
  const ActivatingLoss& loss() const { return loss_; }
  const StepSchedule& schedule() const { return schedule_; }

 private:
  ActivatingLoss loss_;
  StepSchedule schedule_;
  PairExpansion f_;
  std::vector<int> history_labels_;
  std::vector<std::size_t> history_points_;
  std::vector<std::size_t> partner_scratch_;
  std::vector<double> weight_scratch_;
};

/// Observer for held-out risk. after_step runs after every update so that
/// incremental evaluators can follow the expansion; measure runs at
/// checkpoints only.
template <class Hypothesis>
class RiskMonitor {
 public:
  struct Values {
    std::optional<double> heldout_risk;
    std::optional<double> excess_risk;
  };

  virtual ~RiskMonitor() = default;
  virtual void after_step(const Hypothesis&) {}
  virtual Values measure(std::size_t t, const Hypothesis& h) = 0;
};

struct TrajectoryRow {
  std::size_t t = 0;
  double gamma_t = 0.0;
  double rkhs_norm = 0.0;  // norm of the hypothesis after step t
  std::optional<double> lemma4_envelope;
  std::optional<double> heldout_risk;
  std::optional<double> excess_risk;
};

/// Per-iteration comparison of ||f_{t+1}|| with C_phi sqrt(sum_{j=2}^t gamma_j).
struct NormBoundSummary {
  bool applicable = false;         // pairwise run with a 1-activating loss
  bool precondition_holds = false; // gamma_t kappa_tilde^2 <= 1/(4L) for all t
  std::string note;
  std::size_t iterations_checked = 0;
  std::size_t violations = 0;
  std::optional<std::size_t> first_violation;
  double worst_gap = 0.0;  // max over t of norm_t - envelope_t (<= 0 when the bound holds)
  double max_ratio = 0.0;  // max over t >= 2 of norm_t / envelope_t
};

struct TrajectoryRecord {
  std::string algorithm;
  std::vector<TrajectoryRow> rows;
  NormBoundSummary norm_bound;
};

struct LogOptions {
  /// Ascending checkpoints in [1, T]; empty selects powers of two plus T.
  std::vector<std::size_t> checkpoints;
  /// Recompute norms from scratch at checkpoints instead of the tracked value.
  bool exact_norms = false;
  /// Tolerance of the per-iteration norm bound check.
  double norm_bound_tolerance = 1e-8;
};

struct RunOptions {
  /// Run pairwise training even when c kappa_tilde^2 > 1/(4L).
  bool allow_inadmissible = false;
  /// Pairwise history cap; ConfigError above it.
  std::size_t max_pairwise_T = 5000;
  ExpansionOptions expansion = {.merge_duplicates = false, .track_norm = true};
};

/// Powers of two up to T, plus T itself.
std::vector<std::size_t> geometric_checkpoints(std::size_t T);

struct PointwiseRun {
  DualExpansion hypothesis;
  TrajectoryRecord trajectory;
};

struct PairwiseRun {
  PairExpansion hypothesis;
  TrajectoryRecord trajectory;
};

/// T >= 1 steps in stream order. DataError when the stream runs dry.
PointwiseRun run_pointwise(ExampleSource& stream, std::size_t T, const StepSchedule& schedule,
                           const ActivatingLoss& loss, const Kernel& kernel, std::size_t dim,
                           const LogOptions& log = {}, RiskMonitor<DualExpansion>* monitor = nullptr,
                           const RunOptions& options = {});

/// T >= 2 examples in stream order. ConfigError when T < 2, T exceeds the
/// history cap, or c kappa_tilde^2 > 1/(4L) without allow_inadmissible.
PairwiseRun run_pairwise(ExampleSource& stream, std::size_t T, const StepSchedule& schedule,
                         const ActivatingLoss& loss, const PairKernel& kernel, std::size_t dim,
                         const LogOptions& log = {}, RiskMonitor<PairExpansion>* monitor = nullptr,
                         const RunOptions& options = {});

}  // namespace okl

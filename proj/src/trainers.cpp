#include "okl/trainers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "okl/errors.hpp"

namespace okl {

void check_label(int y) {
  if (y != 1 && y != -1) {
    std::ostringstream msg;
    msg << "label " << y << " is not in {-1, +1}";
    throw LabelError(msg.str());
  }
}

std::optional<LabeledExample> VectorSource::next() {
  if (pos_ >= examples_.size()) return std::nullopt;
  return examples_[pos_++];
}

namespace {

void check_gamma(double gamma) {
  if (!(std::isfinite(gamma) && gamma > 0.0)) throw DomainError("step size must be positive");
}

}  // namespace

PointwiseTrainer::PointwiseTrainer(ActivatingLoss loss, Kernel kernel, StepSchedule schedule,
                                   std::size_t dim, ExpansionOptions options)
    : loss_(std::move(loss)), schedule_(schedule), g_(std::move(kernel), dim, options) {}

PointwiseTrainer::Step PointwiseTrainer::step(const LabeledExample& z) {
  return step(z, schedule_.gamma(t_));
}

PointwiseTrainer::Step PointwiseTrainer::step(const LabeledExample& z, double gamma) {
  check_label(z.y);
  check_gamma(gamma);
  Step s;
  s.t = t_;
  s.gamma = gamma;
  s.prediction = g_.evaluate(z.x);
  const double y = static_cast<double>(z.y);
  s.coefficient = -gamma * loss_.grad(y * s.prediction) * y;
  g_.add_scaled_section(z.x, s.coefficient, s.prediction);
  ++t_;
  return s;
}

PairwiseTrainer::PairwiseTrainer(ActivatingLoss loss, PairKernel kernel, StepSchedule schedule,
                                 std::size_t dim, ExpansionOptions options)
    : loss_(std::move(loss)), schedule_(schedule), f_(std::move(kernel), dim, options) {}

void PairwiseTrainer::observe_first(const LabeledExample& z) {
  if (!history_labels_.empty()) throw StateError("observe_first called after the first example");
  check_label(z.y);
  history_points_.push_back(f_.add_point(z.x));
  history_labels_.push_back(z.y);
}

PairwiseTrainer::Step PairwiseTrainer::step(const LabeledExample& z) {
  return step(z, schedule_.gamma(t()));
}

PairwiseTrainer::Step PairwiseTrainer::step(const LabeledExample& z, double gamma) {
  if (history_labels_.empty()) throw StateError("pairwise updates start at t = 2; call observe_first first");
  check_label(z.y);
  check_gamma(gamma);
  Step s;
  s.t = t();
  s.gamma = gamma;

  const std::size_t anchor = f_.add_point(z.x);
  const std::vector<double> row = f_.evaluate_anchor_row(anchor);
  const double scale = gamma / static_cast<double>(s.t - 1);

  partner_scratch_.clear();
  weight_scratch_.clear();
  for (std::size_t j = 0; j < history_labels_.size(); ++j) {
    if (history_labels_[j] == z.y) continue;
    const double dy = static_cast<double>(z.y - history_labels_[j]);
    const std::size_t p = history_points_[j];
    const double w = -scale * loss_.grad(dy * row[p]) * dy;
    if (w == 0.0) continue;
    partner_scratch_.push_back(p);
    weight_scratch_.push_back(w);
  }
  f_.append_block(anchor, partner_scratch_, weight_scratch_, row);
  s.terms_added = partner_scratch_.size();

  history_points_.push_back(anchor);
  history_labels_.push_back(z.y);
  return s;
}

PairwiseTrainer::Step PairwiseTrainer::observe(const LabeledExample& z) {
  if (history_labels_.empty()) {
    observe_first(z);
    return Step{1, schedule_.gamma(1), 0};
  }
  return step(z);
}

std::vector<std::size_t> geometric_checkpoints(std::size_t T) {
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t <= T; t *= 2) out.push_back(t);
  if (out.empty() || out.back() != T) out.push_back(T);
  return out;
}

namespace {

std::vector<std::size_t> resolve_checkpoints(const LogOptions& log, std::size_t T) {
  if (log.checkpoints.empty()) return geometric_checkpoints(T);
  for (std::size_t i = 0; i < log.checkpoints.size(); ++i) {
    const std::size_t c = log.checkpoints[i];
    if (c < 1 || c > T) throw ConfigError("checkpoints must lie in [1, T]");
    if (i > 0 && c <= log.checkpoints[i - 1]) throw ConfigError("checkpoints must be strictly increasing");
  }
  return log.checkpoints;
}

LabeledExample pull(ExampleSource& stream, std::size_t t, std::size_t T) {
  auto z = stream.next();
  if (!z) {
    std::ostringstream msg;
    msg << "example stream exhausted at t = " << t << " of T = " << T;
    throw DataError(msg.str());
  }
  return std::move(*z);
}

template <class H>
double norm_of(const H& h, bool exact) {
  if (exact || !h.options().track_norm) return h.rkhs_norm();
  return h.tracked_norm();
}

}  // namespace

PointwiseRun run_pointwise(ExampleSource& stream, std::size_t T, const StepSchedule& schedule,
                           const ActivatingLoss& loss, const Kernel& kernel, std::size_t dim,
                           const LogOptions& log, RiskMonitor<DualExpansion>* monitor,
                           const RunOptions& options) {
  if (T < 1) throw ConfigError("the pointwise algorithm needs T >= 1");
  const auto checkpoints = resolve_checkpoints(log, T);
  PointwiseTrainer trainer(loss, kernel, schedule, dim, options.expansion);
  TrajectoryRecord record;
  record.algorithm = "alg1";
  record.norm_bound.note = "norm envelope is stated for the pairwise algorithm; skipped";

  std::size_t next_cp = 0;
  for (std::size_t t = 1; t <= T; ++t) {
    const auto step = trainer.step(pull(stream, t, T));
    if (monitor) monitor->after_step(trainer.hypothesis());
    if (next_cp < checkpoints.size() && checkpoints[next_cp] == t) {
      TrajectoryRow row;
      row.t = t;
      row.gamma_t = step.gamma;
      row.rkhs_norm = norm_of(trainer.hypothesis(), log.exact_norms);
      if (monitor) {
        const auto v = monitor->measure(t, trainer.hypothesis());
        row.heldout_risk = v.heldout_risk;
        row.excess_risk = v.excess_risk;
      }
      record.rows.push_back(row);
      ++next_cp;
    }
  }
  return {trainer.hypothesis(), std::move(record)};
}

PairwiseRun run_pairwise(ExampleSource& stream, std::size_t T, const StepSchedule& schedule,
                         const ActivatingLoss& loss, const PairKernel& kernel, std::size_t dim,
                         const LogOptions& log, RiskMonitor<PairExpansion>* monitor,
                         const RunOptions& options) {
  if (T < 2) throw ConfigError("the pairwise algorithm needs T >= 2");
  if (T > options.max_pairwise_T) {
    std::ostringstream msg;
    msg << "pairwise T = " << T << " exceeds the history cap " << options.max_pairwise_T;
    throw ConfigError(msg.str());
  }
  const auto report = validate_schedule(schedule, loss, kernel);
  if (!report.theorem3_c_ok && !options.allow_inadmissible) {
    std::ostringstream msg;
    msg << "step constant c = " << schedule.c() << " exceeds 1/(4 kappa_tilde^2 L) = " << *report.c_max;
    throw ConfigError(msg.str());
  }
  const auto checkpoints = resolve_checkpoints(log, T);

  TrajectoryRecord record;
  record.algorithm = "alg2";
  NormBoundSummary& nb = record.norm_bound;
  nb.applicable = loss.is_one_activating();
  nb.precondition_holds = report.theorem3_c_ok;
  nb.worst_gap = -INFINITY;
  std::vector<double> envelope;
  if (!nb.applicable) {
    nb.note = "norm envelope needs a 1-activating loss; skipped";
  } else {
    envelope = lemma4_envelopes(schedule, loss, T);
    if (!nb.precondition_holds) nb.note = "outside precondition, informational only";
  }

  PairwiseTrainer trainer(loss, kernel, schedule, dim, options.expansion);
  std::size_t next_cp = 0;
  for (std::size_t t = 1; t <= T; ++t) {
    const auto step = trainer.observe(pull(stream, t, T));
    if (monitor) monitor->after_step(trainer.hypothesis());
    const bool at_cp = next_cp < checkpoints.size() && checkpoints[next_cp] == t;
    double norm = 0.0;
    if (nb.applicable || at_cp) norm = norm_of(trainer.hypothesis(), log.exact_norms && at_cp);
    if (nb.applicable) {
      const double gap = norm - envelope[t - 1];
      nb.worst_gap = std::max(nb.worst_gap, gap);
      if (t >= 2 && envelope[t - 1] > 0.0) nb.max_ratio = std::max(nb.max_ratio, norm / envelope[t - 1]);
      ++nb.iterations_checked;
      if (gap > log.norm_bound_tolerance) {
        ++nb.violations;
        if (!nb.first_violation) nb.first_violation = t;
      }
    }
    if (at_cp) {
      TrajectoryRow row;
      row.t = t;
      row.gamma_t = step.gamma;
      row.rkhs_norm = norm;
      if (nb.applicable) row.lemma4_envelope = envelope[t - 1];
      if (monitor) {
        const auto v = monitor->measure(t, trainer.hypothesis());
        row.heldout_risk = v.heldout_risk;
        row.excess_risk = v.excess_risk;
      }
      record.rows.push_back(row);
      ++next_cp;
    }
  }
  if (!nb.applicable) nb.worst_gap = 0.0;
  return {trainer.hypothesis(), std::move(record)};
}

}  // namespace okl

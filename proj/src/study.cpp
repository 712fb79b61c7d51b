#include "okl/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "okl/errors.hpp"

namespace okl {

namespace {

SyntheticDistribution plant(const ExperimentConfig& c, const Kernel& kernel, const ActivatingLoss& loss) {
  DistributionParams p;
  p.dim = c.dimension;
  p.centers = c.distribution.centers;
  p.amplitude = c.distribution.amplitude;
  p.seed = c.distribution.seed;
  p.link = build_link(c, loss);
  return SyntheticDistribution(kernel, p);
}

RunOptions run_options(const ExperimentConfig& c, bool force) {
  RunOptions o;
  o.allow_inadmissible = force;
  o.max_pairwise_T = c.max_pairwise_T;
  o.expansion.merge_duplicates = c.merge_duplicates;
  o.expansion.track_norm = true;
  return o;
}

}  // namespace

StudyContext prepare_study(const ExperimentConfig& config, bool force) {
  validate_config(config);
  const ActivatingLoss loss = build_loss(config);
  const Kernel kernel = build_kernel(config);
  const StepSchedule schedule = build_schedule(config);
  SyntheticDistribution dist = plant(config, kernel, loss);
  EvalSet eval = EvalSet::draw(dist, config.eval_size, config.eval_seed);
  const bool pairwise = config.algorithm == Algorithm::Pairwise;
  const auto report = validate_schedule(schedule, loss,
                                        pairwise ? std::optional<PairKernel>(PairKernel(kernel)) : std::nullopt);
  StudyContext ctx{config, loss, kernel, schedule, build_checkpoints(config), std::move(dist),
                   std::move(eval), report, 0.0, "", false, ""};

  if (config.reference.mode == "bayes") {
    ctx.reference_kind = "bayes";
    if (pairwise) {
      ctx.reference_risk = bayes_pairwise_risk(ctx.eval, loss);
      ctx.reference_in_space = false;
      ctx.reference_note = kernel.family() == KernelFamily::Gaussian
                               ? "closed-form pairwise minimizer; equals the infimum over the product "
                                 "gaussian space (universal kernel), not attained"
                               : "closed-form pairwise minimizer; may lie below the infimum over a "
                                 "non-universal kernel space";
    } else {
      ctx.reference_risk = bayes_pointwise_risk(ctx.eval, loss);
      ctx.reference_in_space = ctx.distribution.link() == matching_link(loss);
      ctx.reference_note = ctx.reference_in_space
                               ? "planted expansion is the exact risk minimizer"
                               : "link does not match the loss; closed-form minimizer is outside the planted space";
    }
  } else {
    ctx.reference_kind = "proxy";
    ctx.reference_note = "proxy reference: risk of one long run";
    SampledSource stream(ctx.distribution, config.reference.seed);
    LogOptions log;
    log.checkpoints = {config.reference.T};
    if (pairwise) {
      PairwiseRiskTracker tracker(ctx.eval, loss, 0.0);
      const auto run = run_pairwise(stream, config.reference.T, schedule, loss, PairKernel(kernel),
                                    config.dimension, log, nullptr, run_options(config, force));
      ctx.reference_risk = tracker.risk(run.hypothesis);
    } else {
      const auto run = run_pointwise(stream, config.reference.T, schedule, loss, kernel, config.dimension,
                                     log, nullptr, run_options(config, force));
      ctx.reference_risk = true_risk(run.hypothesis, ctx.eval, loss);
    }
  }
  return ctx;
}

RunOutcome run_single(const StudyContext& ctx, std::uint64_t seed, bool force) {
  const ExperimentConfig& c = ctx.config;
  SampledSource stream(ctx.distribution, seed);
  LogOptions log;
  log.checkpoints = ctx.checkpoints;
  log.exact_norms = c.exact_norms;
  RunOutcome out;
  out.seed = seed;
  if (c.algorithm == Algorithm::Pointwise) {
    PointwiseRiskTracker tracker(ctx.eval, ctx.loss, ctx.reference_risk);
    out.trajectory = run_pointwise(stream, c.T, ctx.schedule, ctx.loss, ctx.kernel, c.dimension, log, &tracker,
                                   run_options(c, force))
                         .trajectory;
  } else {
    PairwiseRiskTracker tracker(ctx.eval, ctx.loss, ctx.reference_risk);
    out.trajectory = run_pairwise(stream, c.T, ctx.schedule, ctx.loss, PairKernel(ctx.kernel), c.dimension, log,
                                  &tracker, run_options(c, force))
                         .trajectory;
  }
  return out;
}

StudyResult run_replicated(const StudyContext& ctx, std::size_t n_seeds, std::size_t workers, bool force) {
  return run_replicated([&](std::uint64_t seed) { return run_single(ctx, seed, force); }, ctx.config.seed, n_seeds,
                        workers);
}

StudyResult run_replicated(const std::function<RunOutcome(std::uint64_t)>& runner, std::uint64_t seed0,
                           std::size_t n_seeds, std::size_t workers) {
  if (n_seeds < 2) throw ConfigError("a replicated study needs at least two seeds");
  StudyResult result;
  result.runs.resize(n_seeds);
  std::vector<std::exception_ptr> errors(n_seeds);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n_seeds; i = next.fetch_add(1)) {
      try {
        result.runs[i] = runner(seed0 + i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(workers, n_seeds));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < n_seeds; ++i) {
    if (!errors[i]) continue;
    std::ostringstream msg;
    msg << "run with seed " << seed0 + i << " failed: ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      msg << e.what();
    } catch (...) {
      msg << "unknown exception";
    }
    throw StudyError(msg.str());
  }
  for (const auto& row : result.runs.front().trajectory.rows) result.checkpoints.push_back(row.t);
  for (const auto& run : result.runs) {
    if (run.trajectory.rows.size() != result.checkpoints.size())
      throw StudyError("run with seed " + std::to_string(run.seed) + " reported a different checkpoint set");
  }
  aggregate(result);
  return result;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

void aggregate(StudyResult& result) {
  const std::size_t k = result.checkpoints.size();
  result.mean_risk.assign(k, 0.0);
  result.mean_excess.assign(k, 0.0);
  result.stderr_excess.assign(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> risk;
    std::vector<double> excess;
    for (const auto& run : result.runs) {
      const auto& row = run.trajectory.rows.at(j);
      risk.push_back(row.heldout_risk.value_or(0.0));
      excess.push_back(row.excess_risk.value_or(0.0));
    }
    result.mean_risk[j] = mean_of(risk);
    result.mean_excess[j] = mean_of(excess);
    result.stderr_excess[j] = standard_error(excess);
  }
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  RateFit fit;
  for (const auto& [t, r] : points) {
    if (!(t > 0.0)) throw FitError("abscissae must be positive");
    if (!(r > 0.0)) {
      std::ostringstream msg;
      msg << "excluded T = " << t << " with nonpositive ordinate " << r;
      fit.warnings.push_back(msg.str());
      fit.excluded.push_back(t);
      continue;
    }
    fit.abscissae.push_back(t);
    fit.ordinates.push_back(r);
  }
  const std::size_t n = fit.abscissae.size();
  if (n < 4) {
    std::ostringstream msg;
    msg << "rate fit needs at least 4 positive points, have " << n;
    throw FitError(msg.str());
  }
  std::vector<double> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(fit.abscissae[i]);
    y[i] = std::log(fit.ordinates[i]);
  }
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("rate fit needs distinct abscissae");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += e * e;
  }
  fit.residual_rms = std::sqrt(rss / static_cast<double>(n));
  return fit;
}

}  // namespace okl

#include "okl/commands.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "okl/config.hpp"
#include "okl/diagnostics.hpp"
#include "okl/errors.hpp"
#include "okl/io.hpp"
#include "okl/losses.hpp"
#include "okl/schedule.hpp"
#include "okl/study.hpp"

namespace okl {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Usage: return kExitUsage;
    case ErrorKind::Config:
    case ErrorKind::Domain: return kExitConfig;
    case ErrorKind::Io: return kExitIo;
    default: return kExitViolation;
  }
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitViolation;
  }
}

ExperimentConfig load_with_overrides(const CommandOptions& o) {
  if (o.config_path.empty()) throw UsageError("--config is required");
  ExperimentConfig c = load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.out_dir) c.output_directory = *o.out_dir;
  validate_config(c);
  return c;
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json admissibility_json(const AdmissibilityReport& r, double delta) {
  ordered_json j;
  j["alpha"] = r.alpha;
  j["theta"] = r.theta;
  j["c"] = r.c;
  j["square_summable_1plusalpha"] = r.square_summable_1plusalpha;
  j["summable_diverges"] = r.summable_diverges;
  j["theorem2_valid"] = r.theorem2_valid;
  j["pairwise_kernel_given"] = r.pairwise_kernel_given;
  j["theorem3_c_ok"] = r.theorem3_c_ok;
  j["theorem3_theta_ok"] = r.theorem3_theta_ok;
  j["kappa_tilde"] = optional_number(r.kappa_tilde);
  j["c_max"] = optional_number(r.c_max);
  j["exponent_thm2"] = r.exponent_thm2;
  j["delta"] = delta;
  j["exponent_thm3"] = r.exponent_thm3(delta);
  j["exponent_thm4"] = r.exponent_thm4(delta);
  if (r.pairwise_kernel_given) j["pairwise_proven_regime"] = r.pairwise_proven_regime();
  return j;
}

AdmissibilityReport admissibility_for(const ExperimentConfig& c) {
  const auto loss = build_loss(c);
  const auto kernel = build_kernel(c);
  const bool pairwise = c.algorithm == Algorithm::Pairwise;
  return validate_schedule(build_schedule(c), loss,
                           pairwise ? std::optional<PairKernel>(PairKernel(kernel)) : std::nullopt);
}

/// Rejection reason for schedules outside the proven regime, or empty.
std::string rejection(const ExperimentConfig& c, const AdmissibilityReport& r) {
  std::ostringstream msg;
  if (c.algorithm == Algorithm::Pointwise) {
    if (!r.theorem2_valid)
      msg << "theta = " << r.theta << " is outside (1/(1+alpha), 1) = (" << 1.0 / (1.0 + r.alpha) << ", 1)";
  } else if (!r.theorem3_theta_ok) {
    msg << "theta = " << r.theta << " is outside (1/2, 1)";
  } else if (!r.theorem3_c_ok) {
    msg << "c = " << r.c << " exceeds 1/(4 kappa_tilde^2 L) = " << *r.c_max;
  }
  return msg.str();
}

void print_admissibility(std::ostream& out, const AdmissibilityReport& r, const ExperimentConfig& c) {
  out << "admissibility: alpha=" << r.alpha << " theta=" << r.theta << " c=" << r.c
      << " sum_gamma^(1+alpha)<inf=" << (r.square_summable_1plusalpha ? "yes" : "no")
      << " sum_gamma=inf=" << (r.summable_diverges ? "yes" : "no")
      << " thm2_interval=" << (r.theorem2_valid ? "yes" : "no");
  if (r.pairwise_kernel_given)
    out << " c<=c_max=" << (r.theorem3_c_ok ? "yes" : "no") << " (c_max=" << *r.c_max << ")";
  out << "\n";
  if (c.algorithm == Algorithm::Pairwise && !r.one_activating)
    out << "note: pairwise algorithm with alpha < 1 is outside the proven regime\n";
}

std::string run_dir(const ExperimentConfig& c) { return c.output_directory + "/" + c.name; }

std::string trajectory_path(const ExperimentConfig& c, std::uint64_t seed) {
  return run_dir(c) + "/trajectory_seed" + std::to_string(seed) + ".csv";
}

ordered_json norm_bound_json(const std::vector<RunOutcome>& runs) {
  ordered_json j;
  if (runs.empty()) return j;
  const auto& first = runs.front().trajectory.norm_bound;
  j["applicable"] = first.applicable;
  j["precondition_holds"] = first.precondition_holds;
  j["note"] = first.note;
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst = -INFINITY;
  double ratio = 0.0;
  ordered_json first_violation = nullptr;
  for (const auto& r : runs) {
    const auto& nb = r.trajectory.norm_bound;
    checked += nb.iterations_checked;
    violations += nb.violations;
    worst = std::max(worst, nb.worst_gap);
    ratio = std::max(ratio, nb.max_ratio);
    if (nb.first_violation && first_violation.is_null())
      first_violation = {{"seed", r.seed}, {"t", *nb.first_violation}};
  }
  j["iterations_checked"] = checked;
  j["violations"] = violations;
  j["worst_gap"] = first.applicable ? ordered_json(worst) : ordered_json(nullptr);
  j["max_norm_to_envelope_ratio"] = ratio;
  j["first_violation"] = first_violation;
  return j;
}

ordered_json reference_json(const StudyContext& ctx) {
  ordered_json j;
  j["kind"] = ctx.reference_kind;
  j["risk"] = ctx.reference_risk;
  j["in_hypothesis_space"] = ctx.reference_in_space;
  j["note"] = ctx.reference_note;
  j["link"] = ctx.distribution.link().name();
  return j;
}

ordered_json constants_json(const StudyContext& ctx) {
  const double kappa = ctx.kernel.kappa();
  ordered_json j;
  j["kappa"] = kappa;
  j["A_alpha"] = a_alpha(ctx.loss, kappa);
  j["B_alpha"] = b_alpha(ctx.loss, kappa);
  j["informational_only"] = true;
  return j;
}

void write_trajectories(const ExperimentConfig& c, const std::vector<RunOutcome>& runs) {
  for (const auto& r : runs) write_text_file(trajectory_path(c, r.seed), trajectory_csv(r.trajectory));
}

std::vector<RunOutcome> run_all_seeds(const StudyContext& ctx, std::size_t workers, bool force) {
  if (ctx.config.n_seeds >= 2) return run_replicated(ctx, ctx.config.n_seeds, workers, force).runs;
  try {
    return {run_single(ctx, ctx.config.seed, force)};
  } catch (const Error& e) {
    throw StudyError("run with seed " + std::to_string(ctx.config.seed) + " failed: " + e.what());
  }
}

int self_test(bool quiet, std::ostream& out) {
  std::vector<std::pair<double, double>> pts;
  for (double t = 8; t <= 1024; t *= 2) pts.emplace_back(t, std::pow(t, -0.5));
  const auto fit = fit_rate(pts);
  const bool ok = std::abs(fit.slope + 0.5) < 1e-12 && fit.residual_rms < 1e-12;
  if (!quiet) {
    out << std::setprecision(17) << "self-test: injected R = T^-1/2 on T = 8..1024\n"
        << "fitted slope " << fit.slope << " intercept " << fit.intercept << " residual_rms " << fit.residual_rms
        << "\n";
  }
  out << (ok ? "PASS" : "FAIL") << " self-test slope -0.5\n";
  return ok ? kExitSuccess : kExitViolation;
}

}  // namespace

int cmd_verify_loss(const std::string& name, std::optional<double> q, bool quiet, std::ostream& out,
                    std::ostream& err) {
  return guarded(err, [&]() -> int {
    const ActivatingLoss loss = make_loss(name, q);
    const LossBattery battery = verify_loss(loss);
    for (const auto& check : battery.checks) {
      if (quiet && check.passed) continue;
      out << (check.passed ? "PASS " : "FAIL ") << check.name << " worst=" << std::setprecision(6)
          << check.worst;
      if (!check.detail.empty()) out << " (" << check.detail << ")";
      out << "\n";
    }
    out << (battery.passed() ? "PASS" : "FAIL") << " " << loss.name();
    if (loss.q()) out << " q=" << *loss.q();
    out << "\n";
    return battery.passed() ? kExitSuccess : kExitViolation;
  });
}

int cmd_train(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const ExperimentConfig c = load_with_overrides(o);
    const auto report = admissibility_for(c);
    if (!o.quiet) print_admissibility(out, report, c);
    const std::string why = rejection(c, report);
    if (!why.empty() && !o.force) {
      err << "config error: schedule rejected: " << why << " (use --force to run anyway)\n";
      return kExitConfig;
    }
    if (!why.empty() && !o.quiet) out << "note: forced run outside the proven regime: " << why << "\n";

    const StudyContext ctx = prepare_study(c, o.force);
    const auto runs = run_all_seeds(ctx, o.workers, o.force);
    write_trajectories(c, runs);

    ordered_json summary;
    summary["command"] = "train";
    summary["config"] = json::parse(serialize_config(c));
    summary["admissibility"] = admissibility_json(report, c.delta);
    summary["forced"] = !why.empty();
    summary["reference"] = reference_json(ctx);
    summary["constants"] = constants_json(ctx);
    summary["norm_bound"] = norm_bound_json(runs);
    ordered_json files = ordered_json::array();
    ordered_json finals = ordered_json::array();
    for (const auto& r : runs) {
      files.push_back("trajectory_seed" + std::to_string(r.seed) + ".csv");
      const auto& last = r.trajectory.rows.back();
      finals.push_back({{"seed", r.seed},
                        {"t", last.t},
                        {"rkhs_norm", last.rkhs_norm},
                        {"heldout_risk", optional_number(last.heldout_risk)},
                        {"excess_risk", optional_number(last.excess_risk)}});
    }
    summary["trajectories"] = files;
    summary["final"] = finals;
    write_text_file(run_dir(c) + "/train_summary.json", summary.dump(2) + "\n");
    if (!o.quiet) {
      out << "wrote " << runs.size() << " trajectories to " << run_dir(c) << "\n";
    }
    return kExitSuccess;
  });
}

int cmd_rate_study(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    if (o.self_test) return self_test(o.quiet, out);
    const ExperimentConfig c = load_with_overrides(o);
    const auto checkpoints = build_checkpoints(c);
    if (checkpoints.size() < 4) throw ConfigError("a rate study needs at least 4 checkpoints");
    if (c.n_seeds < 2) throw ConfigError("a rate study needs n_seeds >= 2");
    const auto report = admissibility_for(c);
    if (!o.quiet) print_admissibility(out, report, c);
    const std::string why = rejection(c, report);
    if (!why.empty() && !o.force) {
      err << "config error: schedule rejected: " << why << " (use --force to run anyway)\n";
      return kExitConfig;
    }

    const StudyContext ctx = prepare_study(c, o.force);
    const StudyResult study = run_replicated(ctx, c.n_seeds, o.workers, o.force);
    write_trajectories(c, study.runs);

    const RateTheorem theorem = build_theorem(c, ctx.loss);
    ordered_json theory;
    theory["theorem"] = to_string(theorem);
    try {
      theory["exponent"] = theoretical_exponent(theorem, ctx.loss.alpha(), c.theta, c.delta);
    } catch (const DomainError& e) {
      theory["exponent"] = nullptr;
      theory["note"] = e.what();
    }

    std::vector<std::pair<double, double>> pts;
    bool decreasing = true;
    ordered_json table = ordered_json::array();
    for (std::size_t k = 0; k < study.checkpoints.size(); ++k) {
      pts.emplace_back(static_cast<double>(study.checkpoints[k]), study.mean_excess[k]);
      if (k > 0 && !(study.mean_excess[k] < study.mean_excess[k - 1])) decreasing = false;
      table.push_back({{"T", study.checkpoints[k]},
                       {"mean_risk", study.mean_risk[k]},
                       {"mean_excess", study.mean_excess[k]},
                       {"stderr", study.stderr_excess[k]}});
    }
    ordered_json fit_json;
    int code = kExitSuccess;
    try {
      const RateFit fit = fit_rate(pts);
      fit_json["slope"] = fit.slope;
      fit_json["intercept"] = fit.intercept;
      fit_json["residual_rms"] = fit.residual_rms;
      fit_json["points_used"] = fit.abscissae.size();
      fit_json["excluded"] = fit.excluded;
      fit_json["warnings"] = fit.warnings;
      for (const auto& w : fit.warnings) err << "warning: " << w << "\n";
    } catch (const FitError& e) {
      fit_json["error"] = e.what();
      err << "fit error: " << e.what() << "\n";
      code = kExitViolation;
    }

    ordered_json summary;
    summary["command"] = "rate-study";
    summary["config"] = json::parse(serialize_config(c));
    summary["admissibility"] = admissibility_json(report, c.delta);
    summary["forced"] = !why.empty();
    summary["reference"] = reference_json(ctx);
    summary["constants"] = constants_json(ctx);
    summary["checkpoints"] = table;
    summary["strictly_decreasing"] = decreasing;
    summary["fit"] = fit_json;
    summary["theory"] = theory;
    summary["norm_bound"] = norm_bound_json(study.runs);
    write_text_file(run_dir(c) + "/study_summary.json", summary.dump(2) + "\n");

    if (!o.quiet) {
      out << "reference: " << ctx.reference_kind << " risk " << std::setprecision(10) << ctx.reference_risk
          << " (" << ctx.reference_note << ")\n";
      out << std::setw(8) << "T" << std::setw(18) << "mean_excess" << std::setw(16) << "stderr" << "\n";
      for (std::size_t k = 0; k < study.checkpoints.size(); ++k) {
        out << std::setw(8) << study.checkpoints[k] << std::setw(18) << std::setprecision(8)
            << study.mean_excess[k] << std::setw(16) << std::setprecision(4) << study.stderr_excess[k] << "\n";
      }
    }
    if (fit_json.contains("slope")) {
      out << std::setprecision(6) << "fitted slope " << fit_json["slope"].get<double>();
      if (!theory["exponent"].is_null())
        out << "  theoretical exponent " << theory["exponent"].get<double>() << " (" << theory["theorem"].get<std::string>()
            << ")";
      out << "\n";
    }
    out << "strictly decreasing: " << (decreasing ? "yes" : "no") << "\n";
    return code;
  });
}

int cmd_check_bounds(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const ExperimentConfig c = load_with_overrides(o);
    const auto report = admissibility_for(c);
    const ActivatingLoss loss = build_loss(c);
    const Kernel kernel = build_kernel(c);
    const StepSchedule schedule = build_schedule(c);
    const bool pairwise = c.algorithm == Algorithm::Pairwise;
    if (pairwise && !report.theorem3_c_ok && !o.force) {
      err << "config error: " << rejection(c, report) << " (use --force for an informational check)\n";
      return kExitConfig;
    }

    ordered_json doc;
    doc["command"] = "check-bounds";
    doc["config"] = json::parse(serialize_config(c));
    doc["admissibility"] = admissibility_json(report, c.delta);
    bool violated = false;
    std::ostringstream first_failure;

    // Norm envelope along the configured runs.
    ordered_json norm;
    if (!pairwise) {
      norm["status"] = "skipped";
      norm["note"] = "the norm envelope is stated for the pairwise algorithm";
      if (!o.quiet) out << "norm envelope: skipped (stated for the pairwise algorithm)\n";
    } else if (!loss.is_one_activating()) {
      norm["status"] = "skipped";
      norm["note"] = "the norm envelope needs a 1-activating loss";
      if (!o.quiet) out << "norm envelope: skipped (needs a 1-activating loss)\n";
    } else {
      DistributionParams p{c.dimension, c.distribution.centers, c.distribution.amplitude, c.distribution.seed,
                           build_link(c, loss)};
      const SyntheticDistribution dist(kernel, p);
      RunOptions ro;
      ro.allow_inadmissible = o.force;
      ro.max_pairwise_T = c.max_pairwise_T;
      ro.expansion.merge_duplicates = c.merge_duplicates;
      std::vector<RunOutcome> runs;
      for (std::size_t i = 0; i < c.n_seeds; ++i) {
        SampledSource stream(dist, c.seed + i);
        LogOptions log;
        log.checkpoints = {c.T};
        runs.push_back({c.seed + i, run_pairwise(stream, c.T, schedule, loss, PairKernel(kernel), c.dimension, log,
                                                 nullptr, ro)
                                        .trajectory});
      }
      norm = norm_bound_json(runs);
      const bool asserted = report.theorem3_c_ok;
      norm["status"] = asserted ? "asserted" : "outside precondition, informational only";
      const std::size_t v = norm["violations"].get<std::size_t>();
      if (asserted && v > 0) {
        violated = true;
        first_failure << "norm envelope violated at seed " << norm["first_violation"]["seed"].get<std::uint64_t>()
                      << ", t = " << norm["first_violation"]["t"].get<std::size_t>();
      }
      if (!o.quiet) {
        out << "norm envelope: " << norm["status"].get<std::string>() << ", " << v << " violations over "
            << norm["iterations_checked"].get<std::size_t>() << " iterations, worst gap "
            << std::setprecision(6) << norm["worst_gap"].get<double>() << ", max norm/envelope "
            << norm["max_norm_to_envelope_ratio"].get<double>() << "\n";
      }
    }
    doc["norm_envelope"] = norm;

    // Quadratic sup bound over admissible step products.
    ordered_json sup;
    if (loss.is_one_activating()) {
      const double limit = 1.0 / (4.0 * loss.holder_L());
      const double cp2 = c_phi(loss) * c_phi(loss);
      std::mt19937_64 rng(c.seed);
      std::uniform_real_distribution<double> unif(0.0, limit);
      double worst = -INFINITY;
      std::size_t bad = 0;
      for (int i = 0; i < 100; ++i) {
        const double k = i == 0 ? limit : unif(rng);
        const double gap = sup_quadratic_bound(loss, k) - cp2;
        worst = std::max(worst, gap);
        if (gap > 1e-6) ++bad;
      }
      sup["status"] = "asserted";
      sup["c_phi_squared"] = cp2;
      sup["trials"] = 100;
      sup["violations"] = bad;
      sup["worst_gap"] = worst;
      if (bad > 0 && !violated) {
        violated = true;
        first_failure << "quadratic sup bound exceeded C_phi^2";
      }
      if (!o.quiet)
        out << "quadratic sup bound: " << bad << " violations in 100 trials, worst gap " << worst << "\n";
    } else {
      sup["status"] = "skipped";
      sup["note"] = "needs a 1-activating loss";
    }
    doc["sup_quadratic_bound"] = sup;

    // Partial sums of gamma^{1+alpha}.
    ordered_json psum;
    if (report.square_summable_1plusalpha) {
      const double bound = power_sum_bound(schedule, loss.alpha());
      const double s = gamma_power_sum(schedule, 1.0 + loss.alpha(), 1, 1000000);
      psum["status"] = "asserted";
      psum["t"] = 1000000;
      psum["partial_sum"] = s;
      psum["bound"] = bound;
      const bool ok = s <= bound * (1.0 + 1e-6);
      psum["holds"] = ok;
      if (!ok && !violated) {
        violated = true;
        first_failure << "partial sum exceeds its bound";
      }
      if (!o.quiet) out << "power partial sum: " << s << " <= " << bound << (ok ? " ok" : " VIOLATED") << "\n";
    } else {
      psum["status"] = "skipped";
      psum["note"] = "theta (1 + alpha) <= 1: the series diverges";
    }
    doc["power_partial_sum"] = psum;

    // Exact envelope against its closed-form relaxation.
    ordered_json closed;
    if (loss.is_one_activating() && schedule.theta() < 1.0) {
      const std::size_t tmax = 10000;
      const auto env = lemma4_envelopes(schedule, loss, tmax);
      std::size_t bad = 0;
      std::optional<std::size_t> first;
      for (std::size_t t = 1; t <= tmax; ++t) {
        if (env[t - 1] > lemma4_closed_form(schedule, loss, t) * (1.0 + 1e-12)) {
          ++bad;
          if (!first) first = t;
        }
      }
      closed["status"] = "asserted";
      closed["t_max"] = tmax;
      closed["violations"] = bad;
      if (bad > 0 && !violated) {
        violated = true;
        first_failure << "closed-form envelope below the exact envelope at t = " << *first;
      }
      const double env_T = lemma4_envelope(schedule, loss, c.T);
      ordered_json info;
      info["envelope_at_T"] = env_T;
      info["gradient_sup_on_ball_at_T"] = gradient_sup_on_ball(loss, PairKernel(kernel).kappa_tilde(), env_T);
      closed["informational"] = info;
      if (!o.quiet) out << "closed-form envelope domination: " << bad << " violations for t <= " << tmax << "\n";
    } else {
      closed["status"] = "skipped";
    }
    doc["closed_form_envelope"] = closed;

    // Informational risk and distance constants.
    ordered_json info;
    const double kappa = kernel.kappa();
    info["A_alpha"] = a_alpha(loss, kappa);
    info["B_alpha"] = b_alpha(loss, kappa);
    info["initial_risk"] = loss.eval(0.0);
    info["expected_risk_bound_at_T"] = expected_risk_bound(loss, kappa, schedule, loss.eval(0.0), c.T);
    if (report.square_summable_1plusalpha) {
      info["expected_risk_limit"] = expected_risk_limit(loss, kappa, schedule, loss.eval(0.0));
    }
    info["informational_only"] = true;
    doc["constants"] = info;

    doc["violated"] = violated;
    if (violated) doc["first_failure"] = first_failure.str();
    write_text_file(run_dir(c) + "/bounds_report.json", doc.dump(2) + "\n");
    if (violated) {
      out << "FAIL " << first_failure.str() << "\n";
      return kExitViolation;
    }
    out << "PASS no bound violations\n";
    return kExitSuccess;
  });
}

}  // namespace okl

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "okl/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Online kernel learning: loss verification, training, rate studies and bound checks."};
  app.require_subcommand(1);

  okl::CommandOptions opts;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* cfg = sub->add_option("--config", opts.config_path, "experiment config file (JSON)");
    if (needs_config) cfg->required();
    sub->add_flag("--force", opts.force, "run schedules outside the proven regime");
    sub->add_option("--workers", opts.workers, "parallel seed runs")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "override the first training seed");
    sub->add_option("--out", out_dir, "override the output directory");
    sub->add_flag("--quiet", opts.quiet, "print only the verdict");
  };

  std::string loss_name;
  std::optional<double> q;
  auto* verify = app.add_subcommand("verify-loss", "run the loss property battery");
  verify->add_option("loss", loss_name, "least_squares, logistic or qnorm")->required();
  verify->add_option("--q", q, "qnorm exponent in (1, 2]");
  verify->add_flag("--quiet", opts.quiet, "print only failures and the verdict");

  auto* train = app.add_subcommand("train", "train every seed of a config and write trajectories");
  add_common(train, true);
  auto* study = app.add_subcommand("rate-study", "replicated runs and a log-log rate fit");
  add_common(study, false);
  study->add_flag("--self-test", opts.self_test, "fit an injected T^-1/2 power law and exit");
  auto* bounds = app.add_subcommand("check-bounds", "check the deterministic bounds along configured runs");
  add_common(bounds, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return okl::kExitUsage;
  }
  opts.seed = seed;
  opts.out_dir = out_dir;

  if (*verify) return okl::cmd_verify_loss(loss_name, q, opts.quiet, std::cout, std::cerr);
  if (*train) return okl::cmd_train(opts, std::cout, std::cerr);
  if (*study) {
    if (!opts.self_test && opts.config_path.empty()) {
      std::cerr << "usage error: rate-study needs --config unless --self-test is given\n";
      return okl::kExitUsage;
    }
    return okl::cmd_rate_study(opts, std::cout, std::cerr);
  }
  return okl::cmd_check_bounds(opts, std::cout, std::cerr);
}

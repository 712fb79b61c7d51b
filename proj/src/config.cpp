#include "okl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "okl/errors.hpp"

namespace okl {

using nlohmann::json;

const char* to_string(Algorithm algorithm) {
  return algorithm == Algorithm::Pointwise ? "alg1" : "alg2";
}

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& why) {
  throw ConfigError(where + ": " + why);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) bad(where, "unknown key '" + key + "'");
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_double(const json& obj, const char* key, const std::string& where, double fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) bad(where + "." + key, "expected a number");
  return v->get<double>();
}

std::optional<double> get_opt_double(const json& obj, const char* key, const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return std::nullopt;
  if (!v->is_number()) bad(where + "." + key, "expected a number");
  return v->get<double>();
}

std::uint64_t get_uint(const json& obj, const char* key, const std::string& where, std::uint64_t fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_unsigned()) bad(where + "." + key, "expected a nonnegative integer");
  return v->get<std::uint64_t>();
}

std::string get_string(const json& obj, const char* key, const std::string& where, const std::string& fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) bad(where + "." + key, "expected a string");
  return v->get<std::string>();
}

bool get_bool(const json& obj, const char* key, const std::string& where, bool fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) bad(where + "." + key, "expected true or false");
  return v->get<bool>();
}

const json& section(const json& root, const char* key, const json& empty) {
  const json* v = find(root, key);
  return v ? *v : empty;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(root, "config",
            {"name", "algorithm", "loss", "kernel", "schedule", "T", "n_seeds", "seed", "dimension", "eval",
             "distribution", "checkpoints", "delta", "theorem", "reference", "options", "output"});
  const json empty = json::object();
  ExperimentConfig c;
  c.name = get_string(root, "name", "config", c.name);

  const std::string alg = get_string(root, "algorithm", "config", "alg1");
  if (alg == "alg1") {
    c.algorithm = Algorithm::Pointwise;
  } else if (alg == "alg2") {
    c.algorithm = Algorithm::Pairwise;
  } else {
    bad("config.algorithm", "expected \"alg1\" or \"alg2\", got \"" + alg + "\"");
  }

  const json& loss = section(root, "loss", empty);
  only_keys(loss, "loss", {"name", "q"});
  c.loss.name = get_string(loss, "name", "loss", c.loss.name);
  c.loss.q = get_opt_double(loss, "q", "loss");

  const json& kernel = section(root, "kernel", empty);
  only_keys(kernel, "kernel", {"family", "bandwidth", "degree", "offset", "domain_radius"});
  c.kernel.family = get_string(kernel, "family", "kernel", c.kernel.family);
  c.kernel.bandwidth = get_opt_double(kernel, "bandwidth", "kernel");
  if (const json* d = find(kernel, "degree")) {
    if (!d->is_number_integer()) bad("kernel.degree", "expected an integer");
    c.kernel.degree = d->get<int>();
  }
  c.kernel.offset = get_opt_double(kernel, "offset", "kernel");
  c.kernel.domain_radius = get_double(kernel, "domain_radius", "kernel", c.kernel.domain_radius);

  const json& schedule = section(root, "schedule", empty);
  only_keys(schedule, "schedule", {"c", "theta"});
  c.c = get_double(schedule, "c", "schedule", c.c);
  c.theta = get_double(schedule, "theta", "schedule", c.theta);

  c.T = get_uint(root, "T", "config", c.T);
  c.n_seeds = get_uint(root, "n_seeds", "config", c.n_seeds);
  c.seed = get_uint(root, "seed", "config", c.seed);
  c.dimension = get_uint(root, "dimension", "config", c.dimension);

  const json& eval = section(root, "eval", empty);
  only_keys(eval, "eval", {"size", "seed"});
  c.eval_size = get_uint(eval, "size", "eval", c.eval_size);
  c.eval_seed = get_uint(eval, "seed", "eval", c.eval_seed);

  const json& dist = section(root, "distribution", empty);
  only_keys(dist, "distribution", {"centers", "amplitude", "seed", "link", "link_exponent"});
  c.distribution.centers = get_uint(dist, "centers", "distribution", c.distribution.centers);
  c.distribution.amplitude = get_double(dist, "amplitude", "distribution", c.distribution.amplitude);
  c.distribution.seed = get_uint(dist, "seed", "distribution", c.distribution.seed);
  c.distribution.link = get_string(dist, "link", "distribution", c.distribution.link);
  c.distribution.link_exponent = get_opt_double(dist, "link_exponent", "distribution");

  const json& cps = section(root, "checkpoints", empty);
  only_keys(cps, "checkpoints", {"policy", "start", "values"});
  c.checkpoints.policy = get_string(cps, "policy", "checkpoints", c.checkpoints.policy);
  c.checkpoints.start = get_uint(cps, "start", "checkpoints", c.checkpoints.start);
  if (const json* v = find(cps, "values")) {
    if (!v->is_array()) bad("checkpoints.values", "expected an array");
    for (const auto& e : *v) {
      if (!e.is_number_unsigned()) bad("checkpoints.values", "expected nonnegative integers");
      c.checkpoints.values.push_back(e.get<std::size_t>());
    }
  }

  c.delta = get_double(root, "delta", "config", c.delta);
  c.theorem = get_string(root, "theorem", "config", c.theorem);

  const json& ref = section(root, "reference", empty);
  only_keys(ref, "reference", {"mode", "T", "seed"});
  c.reference.mode = get_string(ref, "mode", "reference", c.reference.mode);
  c.reference.T = get_uint(ref, "T", "reference", c.reference.T);
  c.reference.seed = get_uint(ref, "seed", "reference", c.reference.seed);

  const json& opts = section(root, "options", empty);
  only_keys(opts, "options", {"merge_duplicates", "max_pairwise_T", "exact_norms"});
  c.merge_duplicates = get_bool(opts, "merge_duplicates", "options", c.merge_duplicates);
  c.max_pairwise_T = get_uint(opts, "max_pairwise_T", "options", c.max_pairwise_T);
  c.exact_norms = get_bool(opts, "exact_norms", "options", c.exact_norms);

  const json& out = section(root, "output", empty);
  only_keys(out, "output", {"directory"});
  c.output_directory = get_string(out, "directory", "output", c.output_directory);

  validate_config(c);
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  json root = json::object();
  root["name"] = c.name;
  root["algorithm"] = to_string(c.algorithm);
  json loss = {{"name", c.loss.name}};
  if (c.loss.q) loss["q"] = *c.loss.q;
  root["loss"] = loss;
  json kernel = {{"family", c.kernel.family}, {"domain_radius", c.kernel.domain_radius}};
  if (c.kernel.bandwidth) kernel["bandwidth"] = *c.kernel.bandwidth;
  if (c.kernel.degree) kernel["degree"] = *c.kernel.degree;
  if (c.kernel.offset) kernel["offset"] = *c.kernel.offset;
  root["kernel"] = kernel;
  root["schedule"] = {{"c", c.c}, {"theta", c.theta}};
  root["T"] = c.T;
  root["n_seeds"] = c.n_seeds;
  root["seed"] = c.seed;
  root["dimension"] = c.dimension;
  root["eval"] = {{"size", c.eval_size}, {"seed", c.eval_seed}};
  json dist = {{"centers", c.distribution.centers},
               {"amplitude", c.distribution.amplitude},
               {"seed", c.distribution.seed},
               {"link", c.distribution.link}};
  if (c.distribution.link_exponent) dist["link_exponent"] = *c.distribution.link_exponent;
  root["distribution"] = dist;
  json cps = {{"policy", c.checkpoints.policy}, {"start", c.checkpoints.start}};
  if (!c.checkpoints.values.empty()) cps["values"] = c.checkpoints.values;
  root["checkpoints"] = cps;
  root["delta"] = c.delta;
  root["theorem"] = c.theorem;
  root["reference"] = {{"mode", c.reference.mode}, {"T", c.reference.T}, {"seed", c.reference.seed}};
  root["options"] = {{"merge_duplicates", c.merge_duplicates},
                     {"max_pairwise_T", c.max_pairwise_T},
                     {"exact_norms", c.exact_norms}};
  root["output"] = {{"directory", c.output_directory}};
  return root.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading config file '" + path + "'");
  return parse_config(buf.str());
}

void validate_config(const ExperimentConfig& c) {
  if (c.name.empty()) bad("config.name", "must not be empty");
  if (c.name.find_first_of("/\\") != std::string::npos) bad("config.name", "must not contain path separators");
  build_loss(c);
  build_kernel(c);
  build_schedule(c);
  if (c.dimension == 0) bad("config.dimension", "must be at least 1");
  const std::size_t min_T = c.algorithm == Algorithm::Pairwise ? 2 : 1;
  if (c.T < min_T) bad("config.T", c.algorithm == Algorithm::Pairwise ? "alg2 needs T >= 2" : "must be >= 1");
  if (c.algorithm == Algorithm::Pairwise && c.T > c.max_pairwise_T) {
    std::ostringstream msg;
    msg << "T = " << c.T << " exceeds options.max_pairwise_T = " << c.max_pairwise_T;
    bad("config.T", msg.str());
  }
  if (c.n_seeds == 0) bad("config.n_seeds", "must be at least 1");
  if (c.seed > UINT64_MAX - c.n_seeds) bad("config.seed", "seed + n_seeds overflows");
  const std::size_t min_eval = c.algorithm == Algorithm::Pairwise ? 2 : 1;
  if (c.eval_size < min_eval) bad("eval.size", "too small for the selected algorithm");
  auto in_training_range = [&](std::uint64_t s) { return s >= c.seed && s - c.seed < c.n_seeds; };
  if (in_training_range(c.eval_seed)) bad("eval.seed", "must differ from every training seed");
  if (c.distribution.centers == 0) bad("distribution.centers", "must be at least 1");
  if (!(c.distribution.amplitude > 0.0)) bad("distribution.amplitude", "must be positive");
  if (c.distribution.link != "auto" && c.distribution.link != "logistic" && c.distribution.link != "affine" &&
      c.distribution.link != "power")
    bad("distribution.link", "expected auto, logistic, affine or power");
  if (c.distribution.link == "power" && !(c.distribution.link_exponent && *c.distribution.link_exponent > 0.0))
    bad("distribution.link_exponent", "power link needs a positive exponent");
  if (c.distribution.link != "power" && c.distribution.link_exponent)
    bad("distribution.link_exponent", "only used by the power link");
  build_checkpoints(c);
  if (!(c.delta > 0.0 && c.delta < 1.0)) bad("config.delta", "must lie in (0, 1)");
  if (c.theorem != "auto" && c.theorem != "thm2" && c.theorem != "thm3" && c.theorem != "thm4")
    bad("config.theorem", "expected auto, thm2, thm3 or thm4");
  if (c.reference.mode == "proxy") {
    if (c.reference.T < min_T) bad("reference.T", "proxy reference needs a run length");
    if (c.algorithm == Algorithm::Pairwise && c.reference.T > c.max_pairwise_T)
      bad("reference.T", "exceeds options.max_pairwise_T");
    if (in_training_range(c.reference.seed) || c.reference.seed == c.eval_seed)
      bad("reference.seed", "must differ from the training and eval seeds");
  } else if (c.reference.mode != "bayes") {
    bad("reference.mode", "expected bayes or proxy");
  }
  if (c.output_directory.empty()) bad("output.directory", "must not be empty");
}

ActivatingLoss build_loss(const ExperimentConfig& c) {
  try {
    if (c.loss.name != "qnorm" && c.loss.q) bad("loss.q", "only the qnorm loss takes q");
    return make_loss(c.loss.name, c.loss.q);
  } catch (const UsageError& e) {
    throw ConfigError(std::string("loss: ") + e.what());
  }
}

Kernel build_kernel(const ExperimentConfig& c) {
  const KernelSpec& k = c.kernel;
  try {
    if (k.family == "gaussian") {
      if (!k.bandwidth) bad("kernel.bandwidth", "required for the gaussian kernel");
      if (k.degree || k.offset) bad("kernel", "degree/offset do not apply to the gaussian kernel");
      return Kernel::gaussian(*k.bandwidth, k.domain_radius);
    }
    if (k.family == "linear") {
      if (k.bandwidth || k.degree || k.offset) bad("kernel", "the linear kernel takes no parameters");
      return Kernel::linear(k.domain_radius);
    }
    if (k.family == "polynomial") {
      if (!k.degree) bad("kernel.degree", "required for the polynomial kernel");
      if (k.bandwidth) bad("kernel.bandwidth", "does not apply to the polynomial kernel");
      return Kernel::polynomial(*k.degree, k.offset.value_or(0.0), k.domain_radius);
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }
  bad("kernel.family", "expected gaussian, linear or polynomial");
}

StepSchedule build_schedule(const ExperimentConfig& c) {
  try {
    return StepSchedule(c.c, c.theta);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
}

Link build_link(const ExperimentConfig& c, const ActivatingLoss& loss) {
  const std::string& l = c.distribution.link;
  if (l == "auto") return matching_link(loss);
  if (l == "logistic") return {Link::Kind::Logistic, 1.0};
  if (l == "affine") return {Link::Kind::Affine, 1.0};
  return {Link::Kind::Power, *c.distribution.link_exponent};
}

std::vector<std::size_t> build_checkpoints(const ExperimentConfig& c) {
  const CheckpointSpec& s = c.checkpoints;
  std::vector<std::size_t> out;
  if (s.policy == "geometric") {
    if (!s.values.empty()) bad("checkpoints.values", "only used by the list policy");
    if (s.start < 1 || s.start > c.T) bad("checkpoints.start", "must lie in [1, T]");
    for (std::size_t t = s.start; t <= c.T; t *= 2) out.push_back(t);
    if (out.back() != c.T) out.push_back(c.T);
  } else if (s.policy == "list") {
    if (s.values.empty()) bad("checkpoints.values", "the list policy needs values");
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (s.values[i] < 1 || s.values[i] > c.T) bad("checkpoints.values", "must lie in [1, T]");
      if (i > 0 && s.values[i] <= s.values[i - 1]) bad("checkpoints.values", "must be strictly increasing");
    }
    out = s.values;
  } else {
    bad("checkpoints.policy", "expected geometric or list");
  }
  return out;
}

RateTheorem build_theorem(const ExperimentConfig& c, const ActivatingLoss& loss) {
  if (c.theorem == "thm2") return RateTheorem::Pointwise;
  if (c.theorem == "thm3") return RateTheorem::Pairwise;
  if (c.theorem == "thm4") return RateTheorem::PairwiseBoundedGradient;
  if (c.algorithm == Algorithm::Pointwise) return RateTheorem::Pointwise;
  return loss.grad_bound() ? RateTheorem::PairwiseBoundedGradient : RateTheorem::Pairwise;
}

}  // namespace okl

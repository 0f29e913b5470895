#include "pmvr/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"
#include "pmvr/error.hpp"

namespace pmvr {

using nlohmann::json;

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kPmvr:
      return "pmvr";
    case Algorithm::kPmvrV2:
      return "pmvr-v2";
    case Algorithm::kStagewise:
      return "stagewise";
    case Algorithm::kStagewiseV2:
      return "stagewise-v2";
    case Algorithm::kBaseline:
      return "baseline";
  }
  return "?";
}

namespace {

bool is_stagewise(Algorithm a) { return a == Algorithm::kStagewise || a == Algorithm::kStagewiseV2; }

// Reads one JSON object, remembering which keys were consumed.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json* raw(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::optional<double> number(const std::string& key) {
    const json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ValidationError(at(key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ValidationError(at(key), "must be finite");
    return d;
  }

  std::optional<std::uint64_t> count(const std::string& key) {
    const json* v = raw(key);
    if (!v) return std::nullopt;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer()) throw ValidationError(at(key), "must be non-negative");
    throw ValidationError(at(key), "expected an integer");
  }

  std::optional<std::string> text(const std::string& key) {
    const json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ValidationError(at(key), "expected a string");
    return v->get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) throw ValidationError(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      if (!e.is_number() || !std::isfinite(e.get<double>()))
        throw ValidationError(at(key) + "[" + std::to_string(i) + "]", "expected a finite number");
      out.push_back(e.get<double>());
    }
    return out;
  }

  /// Unknown keys are errors.
  void finish(const std::set<std::string>& allowed = {}) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (used_.count(it.key()) == 0 || (!allowed.empty() && allowed.count(it.key()) == 0))
        throw ValidationError(at(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

double positive(Fields& f, const std::string& key, double fallback) {
  const auto v = f.number(key);
  if (!v) return fallback;
  if (!(*v > 0.0)) throw ValidationError(f.at(key), "must be positive");
  return *v;
}

double unit_interval(Fields& f, const std::string& key, double fallback) {
  const auto v = f.number(key);
  if (!v) return fallback;
  if (!(*v >= 0.0 && *v <= 1.0)) throw ValidationError(f.at(key), "must lie in [0, 1]");
  return *v;
}

std::size_t at_least_one(Fields& f, const std::string& key, std::size_t fallback) {
  const auto v = f.count(key);
  if (!v) return fallback;
  if (*v < 1) throw ValidationError(f.at(key), "must be at least 1");
  return static_cast<std::size_t>(*v);
}

const std::set<std::string> kPortfolioKeys{"lambda",   "data", "assets",
                                           "periods",  "data_seed", "sentinel"};
const std::set<std::string> kSingleIndexKeys{"rows", "cols", "radius", "sigma", "data_seed"};
const std::set<std::string> kToyKeys{"center", "value_noise", "outer_noise"};

ProblemSpec parse_problem(const std::string& kind, const json* params) {
  ProblemSpec p;
  p.kind = kind;
  const std::set<std::string>* allowed = nullptr;
  if (kind == "mean_variance" || kind == "mean_deviation")
    allowed = &kPortfolioKeys;
  else if (kind == "single_index")
    allowed = &kSingleIndexKeys;
  else if (kind == "quadratic_toy")
    allowed = &kToyKeys;
  else
    throw ValidationError("$.problem", "unknown problem '" + kind +
                                           "' (mean_variance, mean_deviation, single_index, "
                                           "quadratic_toy)");
  if (!params) return p;
  Fields f(*params, "$.problem_params");
  for (auto it = params->begin(); it != params->end(); ++it)
    if (allowed->count(it.key()) == 0)
      throw ValidationError(f.at(it.key()), "not a parameter of " + kind);
  if (const auto v = f.number("lambda")) {
    if (*v < 0.0) throw ValidationError(f.at("lambda"), "must be >= 0");
    p.lambda = *v;
  }
  if (const auto v = f.text("data")) {
    if (v->empty()) throw ValidationError(f.at("data"), "must be 'synthetic' or a file path");
    p.data = *v;
  }
  p.assets = at_least_one(f, "assets", p.assets);
  if (p.assets < 2) throw ValidationError(f.at("assets"), "must be at least 2");
  p.periods = at_least_one(f, "periods", p.periods);
  if (const auto v = f.count("data_seed")) p.data_seed = *v;
  if (const auto v = f.text("sentinel")) {
    if (*v == "error")
      p.sentinel = SentinelPolicy::kError;
    else if (*v == "drop")
      p.sentinel = SentinelPolicy::kDrop;
    else
      throw ValidationError(f.at("sentinel"), "must be 'error' or 'drop'");
  }
  p.rows = at_least_one(f, "rows", p.rows);
  p.cols = at_least_one(f, "cols", p.cols);
  if (p.rows < 2) throw ValidationError(f.at("rows"), "must be at least 2");
  if (p.cols < 2) throw ValidationError(f.at("cols"), "must be at least 2");
  p.radius = positive(f, "radius", p.radius);
  if (const auto v = f.number("sigma")) {
    if (*v < 0.0) throw ValidationError(f.at("sigma"), "must be >= 0");
    p.sigma = *v;
  }
  if (auto v = f.numbers("center")) {
    if (v->empty()) throw ValidationError(f.at("center"), "must not be empty");
    p.center = std::move(*v);
  }
  for (const char* key : {"value_noise", "outer_noise"}) {
    if (const auto v = f.number(key)) {
      if (*v < 0.0) throw ValidationError(f.at(key), "must be >= 0");
      (std::string(key) == "value_noise" ? p.value_noise : p.outer_noise) = *v;
    }
  }
  f.finish();
  return p;
}

ScheduleConstants parse_constants(const json& j) {
  Fields f(j, "$.constants");
  ScheduleConstants c;
  c.eta = positive(f, "eta", c.eta);
  c.alpha = positive(f, "alpha", c.alpha);
  c.b0 = positive(f, "B0", c.b0);
  c.b1 = positive(f, "B1", c.b1);
  c.iterations = positive(f, "T", c.iterations);
  c.inner = positive(f, "N", c.inner);
  c.eps1 = positive(f, "eps1", c.eps1);
  c.beta = positive(f, "beta", c.beta);
  f.finish();
  return c;
}

ExplicitParams parse_params(const json& j) {
  Fields f(j, "$.params");
  ExplicitParams p;
  if (!f.has("eta")) throw ValidationError(f.at("eta"), "required");
  if (!f.has("T")) throw ValidationError(f.at("T"), "required");
  p.eta = f.number("eta").value();
  if (!(p.eta >= 0.0)) throw ValidationError(f.at("eta"), "must be >= 0");
  p.alpha = unit_interval(f, "alpha", p.alpha);
  p.b0 = at_least_one(f, "B0", p.b0);
  p.b1 = at_least_one(f, "B1", p.b1);
  p.iterations = at_least_one(f, "T", p.iterations);
  p.inner_iterations = at_least_one(f, "N", p.inner_iterations);
  if (f.has("coeff")) p.coeff = positive(f, "coeff", 1.0);
  f.finish();
  return p;
}

StageSchedule parse_stages(const json& j) {
  Fields f(j, "$.stages");
  StageSchedule s;
  s.b0 = at_least_one(f, "B0", s.b0);
  s.eps1 = positive(f, "eps1", s.eps1);
  std::optional<QuadraticSubsolver> sub;
  if (f.has("coeff") || f.has("N")) {
    sub = QuadraticSubsolver{};
    sub->coeff = positive(f, "coeff", 1.0);
    sub->inner_iterations = at_least_one(f, "N", 10);
  }
  s.subsolver = sub;
  const json* list = f.raw("list");
  if (!list) throw ValidationError(f.at("list"), "required");
  if (!list->is_array() || list->empty())
    throw ValidationError(f.at("list"), "expected a non-empty array of stages");
  for (std::size_t i = 0; i < list->size(); ++i) {
    Fields g((*list)[i], f.at("list") + "[" + std::to_string(i) + "]");
    StageParams p;
    if (!g.has("eta")) throw ValidationError(g.at("eta"), "required");
    if (!g.has("T")) throw ValidationError(g.at("T"), "required");
    p.eta = unit_interval(g, "eta", p.eta);
    p.alpha = unit_interval(g, "alpha", p.alpha);
    p.b1 = at_least_one(g, "B1", p.b1);
    p.iterations = at_least_one(g, "T", p.iterations);
    if (g.has("N")) p.inner_iterations = at_least_one(g, "N", 1);
    g.finish();
    s.stages.push_back(p);
  }
  f.finish();
  return s;
}

}  // namespace

void validate_run_config(const RunConfig& c) {
  const bool staged = is_stagewise(c.algo);
  const std::string name = algorithm_name(c.algo);
  if (c.theorem) {
    if (!c.eps) throw ValidationError("$.eps", "required with 'theorem'");
    if (!(*c.eps > 0.0 && *c.eps <= 1.0)) throw ValidationError("$.eps", "must lie in (0, 1]");
    const bool staged_theorem = *c.theorem >= 5;
    if (staged != staged_theorem)
      throw ValidationError("$.theorem", "thm" + std::to_string(*c.theorem) +
                                             (staged_theorem ? " is stage-wise" : " is single-stage") +
                                             " and cannot drive algo=" + name);
    if (staged && !(c.constants.eps1 > *c.eps))
      throw ValidationError("$.constants.eps1", "must exceed eps");
  } else if (c.eps) {
    throw ValidationError("$.eps", "only meaningful with 'theorem'");
  }
  if (staged) {
    if (c.params) throw ValidationError("$.params", "algo=" + name + " takes 'stages', not 'params'");
    if (!c.stages && !c.theorem)
      throw ValidationError("$.stages", "algo=" + name + " requires either 'stages' or 'theorem'");
    if (c.stages && c.theorem)
      throw ValidationError("$.stages", "give either 'stages' or 'theorem', not both");
    if (c.iterations) throw ValidationError("$.iterations", "not used by stage-wise algorithms");
    if (c.algo == Algorithm::kStagewise && c.stages && c.stages->subsolver)
      throw ValidationError("$.stages", "coeff and N belong to stagewise-v2");
  } else {
    if (c.stages) throw ValidationError("$.stages", "algo=" + name + " takes 'params', not 'stages'");
    if (!c.params && !c.theorem)
      throw ValidationError("$.params", "algo=" + name + " requires either 'params' or 'theorem'");
    if (c.params && c.theorem)
      throw ValidationError("$.params", "give either 'params' or 'theorem', not both");
    if (c.iterations && !c.theorem)
      throw ValidationError("$.iterations", "only overrides a theorem schedule");
    if (c.params && c.algo != Algorithm::kBaseline && c.params->eta > 1.0)
      throw ValidationError("$.params.eta", "must lie in [0, 1] for Frank-Wolfe steps");
    if (c.params && c.algo == Algorithm::kBaseline && !(c.params->eta > 0.0))
      throw ValidationError("$.params.eta", "must be positive for the baseline");
    if (c.params && c.algo == Algorithm::kBaseline && !(c.params->alpha > 0.0))
      throw ValidationError("$.params.alpha", "must be positive for the baseline");
  }
  if (c.reps < 1) throw ValidationError("$.reps", "must be at least 1");
  if (c.threads < 1) throw ValidationError("$.threads", "must be at least 1");
  if (c.beta && !(*c.beta > 0.0)) throw ValidationError("$.beta", "must be positive");
  if (c.strong_convexity && !(*c.strong_convexity > 0.0))
    throw ValidationError("$.strong_convexity", "must be positive");
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError("$", std::string("malformed JSON: ") + e.what());
  }
  Fields f(j, "$");
  RunConfig c;
  const auto problem = f.text("problem");
  if (!problem) throw ValidationError("$.problem", "required");
  c.problem = parse_problem(*problem, f.raw("problem_params"));

  const auto algo = f.text("algo");
  if (!algo) throw ValidationError("$.algo", "required");
  bool known = false;
  for (Algorithm a : {Algorithm::kPmvr, Algorithm::kPmvrV2, Algorithm::kStagewise,
                      Algorithm::kStagewiseV2, Algorithm::kBaseline})
    if (*algo == algorithm_name(a)) {
      c.algo = a;
      known = true;
    }
  if (!known)
    throw ValidationError("$.algo", "unknown algorithm '" + *algo +
                                        "' (pmvr, pmvr-v2, stagewise, stagewise-v2, baseline)");

  if (const auto t = f.text("theorem")) {
    if (t->size() != 4 || t->rfind("thm", 0) != 0 || (*t)[3] < '1' || (*t)[3] > '8')
      throw ValidationError("$.theorem", "must be one of thm1..thm8");
    c.theorem = (*t)[3] - '0';
  }
  c.eps = f.number("eps");
  if (const json* v = f.raw("constants")) c.constants = parse_constants(*v);
  if (f.has("strong_convexity")) c.strong_convexity = positive(f, "strong_convexity", 1.0);
  if (f.has("iterations")) c.iterations = at_least_one(f, "iterations", 1);
  if (const json* v = f.raw("params")) c.params = parse_params(*v);
  if (const json* v = f.raw("stages")) c.stages = parse_stages(*v);
  if (const auto v = f.text("output")) {
    if (*v == "random")
      c.output = OutputSelection::kRandomIterate;
    else if (*v == "last")
      c.output = OutputSelection::kLastIterate;
    else
      throw ValidationError("$.output", "must be 'random' or 'last'");
  }
  const auto seed = f.count("seed");
  if (!seed) throw ValidationError("$.seed", "required");
  c.seed = *seed;
  c.reps = at_least_one(f, "reps", c.reps);
  if (const auto v = f.count("cadence")) c.cadence = *v;
  if (f.has("beta")) c.beta = positive(f, "beta", 1.0);
  if (const auto v = f.text("out")) c.out = *v;
  c.threads = at_least_one(f, "threads", c.threads);
  c.x0 = f.numbers("x0");
  f.finish();
  validate_run_config(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw ValidationError("$", e.what());
  }
  return parse_run_config(text);
}

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["problem"] = c.problem.kind;
  json pp = json::object();
  const auto& p = c.problem;
  if (p.kind == "mean_variance" || p.kind == "mean_deviation") {
    pp = {{"lambda", p.lambda},   {"data", p.data},           {"assets", p.assets},
          {"periods", p.periods}, {"data_seed", p.data_seed},
          {"sentinel", p.sentinel == SentinelPolicy::kDrop ? "drop" : "error"}};
  } else if (p.kind == "single_index") {
    pp = {{"rows", p.rows},   {"cols", p.cols},          {"radius", p.radius},
          {"sigma", p.sigma}, {"data_seed", p.data_seed}};
  } else {
    pp = {{"center", p.center}, {"value_noise", p.value_noise}, {"outer_noise", p.outer_noise}};
  }
  j["problem_params"] = pp;
  j["algo"] = algorithm_name(c.algo);
  if (c.theorem) j["theorem"] = "thm" + std::to_string(*c.theorem);
  if (c.eps) j["eps"] = *c.eps;
  const auto& k = c.constants;
  j["constants"] = {{"eta", k.eta}, {"alpha", k.alpha}, {"B0", k.b0},     {"B1", k.b1},
                    {"T", k.iterations}, {"N", k.inner}, {"eps1", k.eps1}, {"beta", k.beta}};
  if (c.strong_convexity) j["strong_convexity"] = *c.strong_convexity;
  if (c.iterations) j["iterations"] = *c.iterations;
  if (c.params) {
    const auto& e = *c.params;
    j["params"] = {{"eta", e.eta}, {"alpha", e.alpha}, {"B0", e.b0}, {"B1", e.b1},
                   {"T", e.iterations}, {"N", e.inner_iterations}};
    if (e.coeff) j["params"]["coeff"] = *e.coeff;
  }
  if (c.stages) {
    json list = json::array();
    for (const auto& s : c.stages->stages) {
      json e = {{"eta", s.eta}, {"alpha", s.alpha}, {"B1", s.b1}, {"T", s.iterations}};
      if (s.inner_iterations) e["N"] = *s.inner_iterations;
      list.push_back(e);
    }
    j["stages"] = {{"B0", c.stages->b0}, {"eps1", c.stages->eps1}, {"list", list}};
    if (c.stages->subsolver) {
      j["stages"]["coeff"] = c.stages->subsolver->coeff;
      j["stages"]["N"] = c.stages->subsolver->inner_iterations;
    }
  }
  j["output"] = c.output == OutputSelection::kLastIterate ? "last" : "random";
  j["seed"] = c.seed;
  j["reps"] = c.reps;
  j["cadence"] = c.cadence;
  if (c.beta) j["beta"] = *c.beta;
  if (!c.out.empty()) j["out"] = c.out;
  j["threads"] = c.threads;
  if (c.x0) j["x0"] = *c.x0;
  return j.dump(2);
}

}  // namespace pmvr

#include "pmvr/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <tuple>
#include <utility>

#include "json.hpp"
#include "pmvr/data_io.hpp"
#include "pmvr/error.hpp"

namespace pmvr {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::optional<double> strong_convexity_of(const RunConfig& c, const Benchmark& b) {
  if (c.strong_convexity) return c.strong_convexity;
  return b.problem->metadata().strong_convexity;
}

QuadraticSubsolver default_subsolver(double coeff, double inner, double eps) {
  return QuadraticSubsolver{coeff, ceil_count(inner / eps), GammaRule::kClassic};
}

Plan plan_for(const RunConfig& c, const Benchmark& bench) {
  const double beta = c.constants.beta;
  if (c.algo == Algorithm::kStagewise || c.algo == Algorithm::kStagewiseV2) {
    StageSchedule s;
    if (c.stages) {
      s = *c.stages;
      if (c.algo == Algorithm::kStagewiseV2 && !s.subsolver)
        s.subsolver = QuadraticSubsolver{beta, 10, GammaRule::kClassic};
    } else {
      const auto lambda = strong_convexity_of(c, bench);
      if (*c.theorem >= 7 && !lambda)
        throw ValidationError("$.strong_convexity",
                              "thm" + std::to_string(*c.theorem) + " needs a strong-convexity modulus");
      s = std::get<StageSchedule>(theorem_schedule(*c.theorem, *c.eps, c.constants, lambda));
      if (c.algo == Algorithm::kStagewiseV2 && !s.subsolver)
        s.subsolver = default_subsolver(lambda ? *lambda / 2.0 : beta, c.constants.inner, *c.eps);
    }
    if (c.algo == Algorithm::kStagewise) s.subsolver.reset();
    return s;
  }
  SolverParams p;
  if (c.params) {
    const auto& e = *c.params;
    p.eta = e.eta;
    p.alpha = e.alpha;
    p.b0 = e.b0;
    p.b1 = e.b1;
    p.iterations = e.iterations;
    if (c.algo == Algorithm::kPmvrV2)
      p.subsolver = QuadraticSubsolver{e.coeff.value_or(beta), e.inner_iterations, GammaRule::kClassic};
  } else {
    p = std::get<SolverParams>(theorem_schedule(*c.theorem, *c.eps, c.constants));
    if (c.iterations) p.iterations = *c.iterations;
    if (c.algo == Algorithm::kPmvr) p.subsolver.reset();
    if (c.algo == Algorithm::kPmvrV2 && !p.subsolver)
      p.subsolver = default_subsolver(beta, c.constants.inner, *c.eps);
  }
  if (c.algo == Algorithm::kBaseline) return BaselineParams{p.eta, p.alpha, p.b1, p.iterations};
  return p;
}

json plan_to_json(const Plan& plan) {
  return std::visit(
      Overloaded{
          [](const SolverParams& p) {
            json j = {{"eta", p.eta}, {"alpha", p.alpha}, {"B0", p.b0}, {"B1", p.b1},
                      {"T", p.iterations}};
            if (p.subsolver)
              j["subsolver"] = {{"coeff", p.subsolver->coeff},
                                {"N", p.subsolver->inner_iterations},
                                {"gamma", "2/(n+2)"}};
            return j;
          },
          [](const StageSchedule& s) {
            json list = json::array();
            for (const auto& st : s.stages) {
              json e = {{"eta", st.eta}, {"alpha", st.alpha}, {"B1", st.b1}, {"T", st.iterations}};
              if (st.inner_iterations) e["N"] = *st.inner_iterations;
              list.push_back(e);
            }
            json j = {{"B0", s.b0}, {"eps1", s.eps1}, {"stages", list}};
            if (s.subsolver)
              j["subsolver"] = {{"coeff", s.subsolver->coeff},
                                {"N", s.subsolver->inner_iterations},
                                {"gamma", "2/(n+2)"}};
            return j;
          },
          [](const BaselineParams& b) {
            return json{{"eta", b.eta}, {"alpha", b.alpha}, {"B", b.batch}, {"T", b.iterations}};
          },
      },
      plan);
}

std::size_t plan_iterations(const Plan& plan) {
  return std::visit(Overloaded{
                        [](const SolverParams& p) { return p.iterations; },
                        [](const StageSchedule& s) {
                          std::size_t t = 0;
                          for (const auto& st : s.stages) t += st.iterations;
                          return t;
                        },
                        [](const BaselineParams& b) { return b.iterations; },
                    },
                    plan);
}

// Mean and sample standard deviation (n - 1), two-pass.
std::pair<double, double> mean_std(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace

Benchmark build_benchmark(const ProblemSpec& spec, std::uint64_t) {
  if (spec.kind == "mean_variance" || spec.kind == "mean_deviation") {
    std::shared_ptr<const PortfolioData> data;
    if (spec.data == "synthetic") {
      SyntheticReturnsConfig sc;
      sc.assets = spec.assets;
      sc.periods = spec.periods;
      sc.seed = spec.data_seed;
      data = std::make_shared<PortfolioData>(synthetic_returns(sc));
    } else {
      FrenchLoadOptions opts;
      opts.sentinel = spec.sentinel;
      data = std::make_shared<PortfolioData>(load_french_csv(spec.data, opts).data);
    }
    return spec.kind == "mean_variance" ? mean_variance_problem(data, spec.lambda)
                                        : mean_deviation_problem(data, spec.lambda);
  }
  if (spec.kind == "single_index") {
    SingleIndexConfig sc;
    sc.rows = spec.rows;
    sc.cols = spec.cols;
    sc.radius = spec.radius;
    sc.sigma = spec.sigma;
    sc.seed = spec.data_seed;
    return single_index_problem(sc);
  }
  if (spec.kind == "quadratic_toy") {
    QuadraticToyConfig tc;
    tc.center = Point::vector(spec.center);
    tc.value_noise = spec.value_noise;
    tc.outer_noise = spec.outer_noise;
    return quadratic_toy(tc);
  }
  throw ValidationError("$.problem", "unknown problem '" + spec.kind + "'");
}

ResolvedRun resolve_run(const RunConfig& config) {
  validate_run_config(config);
  ResolvedRun run{build_benchmark(config.problem), SolverParams{}, RunOptions{}};
  if (config.x0) {
    const Shape shape = run.bench.problem->input_shape();
    if (config.x0->size() != shape.size())
      throw ValidationError("$.x0", "expected " + std::to_string(shape.size()) + " values");
    run.bench.x0 = Point(shape, *config.x0);
    if (!contains(run.bench.set, run.bench.x0, 1e-6))
      throw ValidationError("$.x0", "start point is not in " + describe(run.bench.set));
  }
  run.plan = plan_for(config, run.bench);
  run.options.output = config.output;
  run.options.trace.cadence = config.cadence;
  run.options.trace.beta =
      config.beta.value_or(run.bench.problem->metadata().smoothness_beta.value_or(1.0));
  return run;
}

RunResult execute(const ResolvedRun& run, std::uint64_t seed) {
  const auto& b = run.bench;
  return std::visit(
      Overloaded{
          [&](const SolverParams& p) {
            return pmvr_run(*b.problem, b.set, p, b.x0, seed, run.options);
          },
          [&](const StageSchedule& s) {
            return stagewise_run(*b.problem, b.set, s, b.x0, seed, run.options);
          },
          [&](const BaselineParams& p) {
            return projected_scgd_baseline(*b.problem, b.set, p, b.x0, seed, run.options);
          },
      },
      run.plan);
}

OracleCounters expected_counters(const ResolvedRun& run) {
  const std::size_t k = run.bench.problem->depth();
  return std::visit(Overloaded{
                        [&](const SolverParams& p) { return expected_counters(k, p); },
                        [&](const StageSchedule& s) {
                          return expected_counters(k, s, run.options.output);
                        },
                        [&](const BaselineParams& p) { return expected_counters(k, p); },
                    },
                    run.plan);
}

std::vector<AggregateRow> aggregate(const std::vector<std::vector<TraceRow>>& traces) {
  if (traces.empty()) throw InvalidArgument("aggregate: no traces");
  const std::size_t rows = traces.front().size();
  for (const auto& t : traces)
    if (t.size() != rows) throw InvalidArgument("aggregate: traces have different lengths");
  std::vector<AggregateRow> out(rows);
  const std::size_t n = traces.size();
  for (std::size_t r = 0; r < rows; ++r) {
    AggregateRow& a = out[r];
    const TraceRow& first = traces.front()[r];
    a.iter = first.iter;
    a.stage = first.stage;
    a.sfo = first.sfo;
    a.lmo = first.lmo;
    a.runs = n;
    std::vector<double> v[4];
    bool all_gap = true;
    for (const auto& t : traces) {
      const TraceRow& row = t[r];
      if (row.iter != a.iter || row.stage != a.stage)
        throw InvalidArgument("aggregate: traces are on different iteration grids");
      v[0].push_back(row.objective);
      v[1].push_back(row.fw_gap);
      v[2].push_back(row.grad_map);
      if (row.opt_gap) v[3].push_back(*row.opt_gap);
      all_gap = all_gap && row.opt_gap.has_value();
    }
    std::tie(a.objective_mean, a.objective_std) = mean_std(v[0]);
    std::tie(a.fw_gap_mean, a.fw_gap_std) = mean_std(v[1]);
    std::tie(a.grad_map_mean, a.grad_map_std) = mean_std(v[2]);
    if (all_gap) {
      const auto [m, sd] = mean_std(v[3]);
      a.opt_gap_mean = m;
      a.opt_gap_std = sd;
    }
  }
  return out;
}

std::string aggregate_to_csv(const std::vector<AggregateRow>& rows) {
  std::string out =
      "iter,stage,sfo,lmo,runs,objective_mean,objective_std,fw_gap_mean,fw_gap_std,"
      "grad_map_mean,grad_map_std,opt_gap_mean,opt_gap_std\n";
  for (const auto& a : rows) {
    out += std::to_string(a.iter) + ',' + std::to_string(a.stage) + ',' + std::to_string(a.sfo) +
           ',' + std::to_string(a.lmo) + ',' + std::to_string(a.runs) + ',' +
           format_double(a.objective_mean) + ',' + format_double(a.objective_std) + ',' +
           format_double(a.fw_gap_mean) + ',' + format_double(a.fw_gap_std) + ',' +
           format_double(a.grad_map_mean) + ',' + format_double(a.grad_map_std) + ',';
    if (a.opt_gap_mean) out += format_double(*a.opt_gap_mean) + ',' + format_double(*a.opt_gap_std);
    else out += ',';
    out += '\n';
  }
  return out;
}

std::filesystem::path resolve_out_dir(const std::string& explicit_dir, const RunConfig* config) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (config && !config->out.empty()) return config->out;
  if (const char* env = std::getenv("PMVR_OUT_DIR"); env && *env) return env;
  return "runs";
}

RunSummary run_experiment(const RunConfig& config, const std::filesystem::path& out_dir,
                          const LogFn& log) {
  const ResolvedRun run = resolve_run(config);
  const std::size_t reps = config.reps;
  std::vector<RunResult> results(reps);
  std::vector<std::exception_ptr> errors(reps);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < reps; k = next++) {
      try {
        results[k] = execute(run, config.seed + k);
        if (log) {
          const TraceRow& last = results[k].trace.rows.back();
          std::lock_guard<std::mutex> lock(log_mutex);
          log("rep " + std::to_string(k) + " seed " + std::to_string(config.seed + k) +
              ": objective " + format_double(last.objective) + ", fw_gap " +
              format_double(last.fw_gap) + ", grad_map " + format_double(last.grad_map));
        }
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(config.threads, reps);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  RunSummary summary;
  summary.out_dir = out_dir;
  for (auto& r : results) summary.traces.push_back(r.trace.rows);
  summary.aggregate = aggregate(summary.traces);

  for (std::size_t k = 0; k < reps; ++k)
    write_trace_csv(summary.traces[k], out_dir / ("trace_rep" + std::to_string(k) + ".csv"));
  write_text_file(out_dir / "aggregate.csv", aggregate_to_csv(summary.aggregate));

  json meta;
  meta["config"] = json::parse(run_config_to_json(config));
  meta["problem"] = run.bench.problem->name();
  meta["set"] = describe(run.bench.set);
  meta["plan"] = plan_to_json(run.plan);
  meta["beta"] = run.options.trace.beta;
  const std::size_t total = plan_iterations(run.plan);
  meta["cadence"] = config.cadence ? config.cadence : std::max<std::size_t>(1, total / 200);
  if (config.problem.kind == "mean_deviation") meta["delta"] = kDeviationDelta;
  if (config.problem.kind == "mean_variance" || config.problem.kind == "mean_deviation")
    meta["returns_units"] = config.problem.data == "synthetic" ? "fraction" : "fraction (percent / 100)";
  json seeds = json::array(), taus = json::array(), warnings = json::array();
  for (std::size_t k = 0; k < reps; ++k) {
    seeds.push_back(config.seed + k);
    taus.push_back(results[k].tau);
    for (const auto& w : results[k].warnings) warnings.push_back(w);
  }
  meta["seeds"] = seeds;
  meta["tau"] = taus;
  if (!warnings.empty()) meta["warnings"] = warnings;
  const OracleCounters expected = expected_counters(run);
  meta["expected_counters"] = {{"sfo", expected.sfo}, {"lmo", expected.lmo}};
  meta["optimal_value"] = run.bench.problem->metadata().optimal_value
                              ? json(*run.bench.problem->metadata().optimal_value)
                              : json(nullptr);
  write_text_file(out_dir / "run_meta.json", meta.dump(2) + "\n");
  if (log) log("wrote " + std::to_string(reps) + " trace(s) to " + out_dir.string());
  return summary;
}

std::vector<RunConfig> reproduce_configs(const ReproduceRequest& req) {
  if (req.scale != "desk" && req.scale != "paper")
    throw ValidationError("--scale", "must be 'desk' or 'paper'");
  const bool paper = req.scale == "paper";
  RunConfig base;
  base.seed = 1;
  base.threads = req.threads;
  std::size_t iterations = 0;
  double baseline_eta = 0.1;
  ScheduleConstants pmvr_constants, v2_constants;
  if (req.experiment == "matrix") {
    // Unit constants diverge on this heavy-tailed problem at B1 = 1.
    pmvr_constants.eta = 0.3;
    pmvr_constants.alpha = 0.3;
    pmvr_constants.b0 = 6.4;
    v2_constants.eta = 0.01;
    v2_constants.alpha = 0.03;
    v2_constants.b0 = 20.0;
    base.problem.kind = "single_index";
    base.problem.rows = 20;
    base.problem.cols = 20;
    base.problem.radius = 1.0;
    base.problem.sigma = 0.1;
    base.reps = paper ? 50 : 10;
    iterations = paper ? 5000 : 2000;
    baseline_eta = 0.01;
  } else if (req.experiment == "mv-portfolio" || req.experiment == "md-portfolio") {
    base.problem.kind = req.experiment == "mv-portfolio" ? "mean_variance" : "mean_deviation";
    base.problem.lambda = 1.0;
    if (paper) {
      if (req.data_path.empty())
        throw ValidationError(
            "--data",
            "paper scale needs a Kenneth French industry file: download the Industry-10 or "
            "Industry-12 daily CSV from "
            "https://mba.tuck.dartmouth.edu/pages/faculty/ken.french/data_library.html, unzip it "
            "and pass --data PATH (the README lists the checksum step)");
      base.problem.data = req.data_path;
      base.problem.sentinel = SentinelPolicy::kDrop;
    }
    base.reps = paper ? (req.experiment == "mv-portfolio" ? 50 : 10) : 10;
    pmvr_constants.eta = 0.5;
    pmvr_constants.alpha = 0.5;
    pmvr_constants.b0 = 10.0;
    pmvr_constants.b1 = 10.0;
    // Portfolio curvature is far below 1; a unit subsolver coefficient stalls.
    v2_constants.eta = 0.3;
    v2_constants.alpha = 0.1;
    v2_constants.b0 = 25.0;
    v2_constants.b1 = 10.0;
    v2_constants.beta = 0.03;
    iterations = paper ? 5000 : 1000;
  } else {
    throw ValidationError("--experiment", "unknown experiment '" + req.experiment +
                                              "' (matrix, mv-portfolio, md-portfolio)");
  }
  if (req.reps) base.reps = *req.reps;

  std::vector<RunConfig> out;
  RunConfig pmvr = base;
  pmvr.algo = Algorithm::kPmvr;
  pmvr.theorem = 1;
  pmvr.eps = 0.1;
  pmvr.iterations = iterations;
  pmvr.constants = pmvr_constants;
  out.push_back(pmvr);

  RunConfig v2 = base;
  v2.algo = Algorithm::kPmvrV2;
  v2.theorem = 3;
  v2.eps = 0.1;
  v2.iterations = iterations;
  v2.constants = v2_constants;
  out.push_back(v2);

  RunConfig scgd = base;
  scgd.algo = Algorithm::kBaseline;
  ExplicitParams bp;
  bp.eta = baseline_eta;
  bp.alpha = 0.1;
  bp.b1 = 1;
  bp.iterations = iterations;
  scgd.params = bp;
  out.push_back(scgd);
  for (auto& c : out) validate_run_config(c);
  return out;
}

std::vector<RunSummary> reproduce(const ReproduceRequest& req, const LogFn& log) {
  const auto configs = reproduce_configs(req);
  const std::filesystem::path root =
      resolve_out_dir(req.out_dir, nullptr) / (req.experiment + "-" + req.scale);
  std::vector<RunSummary> out;
  for (const auto& c : configs) {
    if (log) log(std::string("== ") + req.experiment + " / " + algorithm_name(c.algo));
    out.push_back(run_experiment(c, root / algorithm_name(c.algo), log));
    const auto& agg = out.back().aggregate;
    if (log)
      log(std::string("   mean fw_gap ") + format_double(agg.front().fw_gap_mean) + " -> " +
          format_double(agg.back().fw_gap_mean) + ", mean grad_map " +
          format_double(agg.front().grad_map_mean) + " -> " +
          format_double(agg.back().grad_map_mean));
  }
  return out;
}

}  // namespace pmvr

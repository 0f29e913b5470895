#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "json.hpp"
#include "pmvr/config.hpp"
#include "pmvr/data_io.hpp"
#include "pmvr/error.hpp"
#include "pmvr/harness.hpp"

namespace pmvr {
namespace {

namespace fs = std::filesystem;

const std::string kMinimal =
    R"({"problem": "mean_variance", "algo": "pmvr", "theorem": "thm1", "eps": 0.1, "seed": 1})";

std::string field_of(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<no error>";
}

std::string with(const std::string& extra) {
  return kMinimal.substr(0, kMinimal.size() - 1) + ", " + extra + "}";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "pmvr_unit" / name;
  fs::remove_all(p);
  return p;
}

// Trace text with the seconds column blanked.
std::string timeless(const fs::path& path) {
  auto rows = read_trace_csv(path);
  for (auto& r : rows) r.seconds = 0.0;
  return trace_to_csv(rows);
}

TEST(Config, MinimalFillsDefaults) {
  const RunConfig c = parse_run_config(kMinimal);
  EXPECT_EQ(c.problem.kind, "mean_variance");
  EXPECT_EQ(c.problem.data, "synthetic");
  EXPECT_EQ(c.problem.assets, 10u);
  EXPECT_EQ(c.problem.periods, 500u);
  EXPECT_DOUBLE_EQ(c.problem.lambda, 1.0);
  EXPECT_EQ(c.algo, Algorithm::kPmvr);
  EXPECT_EQ(c.theorem, 1);
  EXPECT_EQ(c.reps, 1u);
  EXPECT_EQ(c.threads, 1u);
  EXPECT_EQ(c.output, OutputSelection::kRandomIterate);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(field_of(R"({"problem": "mean_variance", "algo": "pmvr", "theorem": "thm1", "eps": 0, "seed": 1})"),
            "$.eps");
  EXPECT_EQ(field_of(with(R"("bogus": 1)")), "$.bogus");
  EXPECT_EQ(field_of(with(R"("problem_params": {"lambda": -1})")), "$.problem_params.lambda");
  EXPECT_EQ(field_of(with(R"("problem_params": {"rows": 3})")), "$.problem_params.rows");
  EXPECT_EQ(field_of(with(R"("reps": 0)")), "$.reps");
  EXPECT_EQ(field_of(with(R"("output": "middle")")), "$.output");
  EXPECT_EQ(field_of(R"({"problem": "mean_variance", "algo": "pmvr", "theorem": "thm1", "eps": 0.1})"),
            "$.seed");
  EXPECT_EQ(field_of(R"({"problem": "nope", "algo": "pmvr", "seed": 1})"), "$.problem");
  EXPECT_EQ(field_of(R"({"problem": "mean_variance", "algo": "pmvr", "theorem": "thm5", "eps": 0.1, "seed": 1})"),
            "$.theorem");
  EXPECT_EQ(field_of("{not json"), "$");
  EXPECT_EQ(field_of(with(R"("params": {"eta": 0.1, "T": 10})")), "$.params");
}

TEST(Config, StagewiseNeedsStagesOrTheorem) {
  try {
    parse_run_config(R"({"problem": "quadratic_toy", "algo": "stagewise", "seed": 1})");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "$.stages");
    EXPECT_NE(std::string(e.what()).find("either 'stages' or 'theorem'"), std::string::npos);
  }
}

TEST(Config, ExplicitParamsAndStages) {
  const RunConfig p = parse_run_config(
      R"({"problem": "quadratic_toy", "algo": "pmvr-v2", "seed": 3,
          "params": {"eta": 0.2, "alpha": 0.5, "B0": 4, "B1": 2, "T": 30, "N": 7, "coeff": 2.0}})");
  ASSERT_TRUE(p.params);
  EXPECT_EQ(p.params->inner_iterations, 7u);
  EXPECT_EQ(*p.params->coeff, 2.0);
  const RunConfig s = parse_run_config(
      R"({"problem": "quadratic_toy", "algo": "stagewise", "seed": 3,
          "stages": {"B0": 2, "eps1": 1.0, "list": [{"eta": 0.5, "alpha": 0.5, "B1": 1, "T": 4}]}})");
  ASSERT_TRUE(s.stages);
  EXPECT_EQ(s.stages->stages.size(), 1u);
}

TEST(Config, JsonRoundTrip) {
  const RunConfig a = parse_run_config(
      R"({"problem": "single_index", "problem_params": {"rows": 5, "cols": 4, "sigma": 0.2},
          "algo": "pmvr-v2", "theorem": "thm3", "eps": 0.2, "iterations": 50, "seed": 9,
          "reps": 2, "cadence": 5, "beta": 2.0, "output": "last"})");
  const std::string text = run_config_to_json(a);
  EXPECT_EQ(run_config_to_json(parse_run_config(text)), text);
}

TEST(Config, LoadMissingFileIsValidationError) {
  EXPECT_THROW(load_run_config("/nonexistent/pmvr.json"), ValidationError);
}

RunConfig small_run(std::uint64_t seed, std::size_t reps, std::size_t threads = 1) {
  RunConfig c = parse_run_config(kMinimal);
  c.iterations = 60;
  c.seed = seed;
  c.reps = reps;
  c.threads = threads;
  return c;
}

TEST(Harness, SameSeedSameTraceBytes) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  run_experiment(small_run(7, 1), a);
  run_experiment(small_run(7, 1), b);
  EXPECT_EQ(timeless(a / "trace_rep0.csv"), timeless(b / "trace_rep0.csv"));
}

TEST(Harness, ThreadCountDoesNotChangeTraces) {
  const fs::path a = scratch("thr_1"), b = scratch("thr_3");
  run_experiment(small_run(4, 3, 1), a);
  run_experiment(small_run(4, 3, 3), b);
  for (int k = 0; k < 3; ++k) {
    const std::string name = "trace_rep" + std::to_string(k) + ".csv";
    EXPECT_EQ(timeless(a / name), timeless(b / name));
  }
}

TEST(Harness, FileInventoryAndAggregate) {
  const fs::path dir = scratch("inventory");
  const RunSummary s = run_experiment(small_run(11, 3), dir);
  for (int k = 0; k < 3; ++k) EXPECT_TRUE(fs::exists(dir / ("trace_rep" + std::to_string(k) + ".csv")));
  EXPECT_TRUE(fs::exists(dir / "aggregate.csv"));
  EXPECT_TRUE(fs::exists(dir / "run_meta.json"));
  EXPECT_FALSE(fs::exists(dir / "trace_rep3.csv"));
  const auto meta = nlohmann::json::parse(read_text_file(dir / "run_meta.json"));
  EXPECT_EQ(meta["seeds"], nlohmann::json::array({11, 12, 13}));
  EXPECT_EQ(meta["cadence"], 1);
  // Hand mean at the last row; row 0 is x1 for every seed.
  const std::size_t last = s.traces[0].size() - 1;
  const double hand = (s.traces[0][last].fw_gap + s.traces[1][last].fw_gap + s.traces[2][last].fw_gap) / 3.0;
  EXPECT_NEAR(s.aggregate[last].fw_gap_mean, hand, 1e-15);
  EXPECT_DOUBLE_EQ(s.aggregate[0].objective_mean,
                   (s.traces[0][0].objective + s.traces[1][0].objective + s.traces[2][0].objective) / 3.0);
  EXPECT_EQ(s.aggregate[0].objective_std, 0.0);
  EXPECT_GT(s.aggregate[last].fw_gap_std, 0.0);
}

TEST(Harness, AggregateMatchesIndependentSummation) {
  std::vector<std::vector<TraceRow>> traces(4, std::vector<TraceRow>(1));
  const double vals[4] = {1.0, 2.0, 4.0, 8.0};
  for (int k = 0; k < 4; ++k) {
    traces[k][0].grad_map = vals[k];
    traces[k][0].opt_gap = vals[k];
  }
  const auto agg = aggregate(traces);
  EXPECT_DOUBLE_EQ(agg[0].grad_map_mean, 3.75);
  // sum of squared deviations = 7.5625 + 3.0625 + 0.0625 + 18.0625 = 28.75
  EXPECT_DOUBLE_EQ(agg[0].grad_map_std, std::sqrt(28.75 / 3.0));
  EXPECT_DOUBLE_EQ(*agg[0].opt_gap_mean, 3.75);
  traces[1][0].opt_gap.reset();
  EXPECT_FALSE(aggregate(traces)[0].opt_gap_mean);
  traces[2][0].iter = 9;
  EXPECT_THROW(aggregate(traces), InvalidArgument);
}

TEST(Harness, FinalCountersMatchClosedForms) {
  for (const char* text : {
           R"({"problem": "quadratic_toy", "algo": "pmvr", "theorem": "thm2", "eps": 0.2, "seed": 1})",
           R"({"problem": "quadratic_toy", "algo": "pmvr-v2", "theorem": "thm3", "eps": 0.3, "seed": 1})",
           R"({"problem": "quadratic_toy", "algo": "stagewise-v2", "theorem": "thm7", "eps": 0.125, "seed": 1})",
           R"({"problem": "quadratic_toy", "algo": "stagewise", "theorem": "thm6", "eps": 0.25, "seed": 1, "output": "last"})",
           R"({"problem": "quadratic_toy", "algo": "baseline", "seed": 1, "params": {"eta": 0.1, "alpha": 0.5, "B1": 3, "T": 20}})"}) {
    const ResolvedRun run = resolve_run(parse_run_config(text));
    const RunResult r = execute(run, 5);
    const OracleCounters last{r.trace.rows.back().sfo, r.trace.rows.back().lmo};
    EXPECT_EQ(last, expected_counters(run)) << text;
  }
}

TEST(Harness, StartPointOverride) {
  RunConfig c = parse_run_config(
      R"({"problem": "quadratic_toy", "algo": "pmvr", "theorem": "thm1", "eps": 0.5, "seed": 1, "x0": [0.5, 0.5]})");
  EXPECT_EQ(resolve_run(c).bench.x0, Point::vector({0.5, 0.5}));
  c.x0 = std::vector<double>{0.9, 0.9};
  EXPECT_THROW(resolve_run(c), ValidationError);
}

TEST(Harness, OutDirPrecedence) {
  RunConfig c = parse_run_config(kMinimal);
  ::unsetenv("PMVR_OUT_DIR");
  EXPECT_EQ(resolve_out_dir("", &c), fs::path("runs"));
  ::setenv("PMVR_OUT_DIR", "/tmp/env_out", 1);
  EXPECT_EQ(resolve_out_dir("", &c), fs::path("/tmp/env_out"));
  c.out = "cfg_out";
  EXPECT_EQ(resolve_out_dir("", &c), fs::path("cfg_out"));
  EXPECT_EQ(resolve_out_dir("flag_out", &c), fs::path("flag_out"));
  ::unsetenv("PMVR_OUT_DIR");
}

TEST(Reproduce, PaperScaleWithoutDataNamesDownload) {
  ReproduceRequest req;
  req.experiment = "mv-portfolio";
  req.scale = "paper";
  try {
    reproduce_configs(req);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "--data");
    EXPECT_NE(std::string(e.what()).find("download"), std::string::npos);
  }
  req.experiment = "matrix";
  EXPECT_EQ(reproduce_configs(req).size(), 3u);
  req.experiment = "nope";
  EXPECT_THROW(reproduce_configs(req), ValidationError);
}

TEST(Reproduce, DeskConfigs) {
  ReproduceRequest req;
  req.experiment = "matrix";
  const auto cs = reproduce_configs(req);
  EXPECT_EQ(cs[0].reps, 10u);
  EXPECT_EQ(*cs[0].iterations, 2000u);
  EXPECT_EQ(cs[1].algo, Algorithm::kPmvrV2);
  EXPECT_EQ(cs[2].algo, Algorithm::kBaseline);
  req.reps = 2;
  EXPECT_EQ(reproduce_configs(req)[2].reps, 2u);
}

}  // namespace
}  // namespace pmvr

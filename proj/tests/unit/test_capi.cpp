#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "pmvr/pmvr.h"

namespace {

namespace fs = std::filesystem;

void collect(const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(line); }

TEST(CApi, VersionAndEmptyError) {
  EXPECT_STREQ(pmvr_version(), "0.1.0");
  pmvr_problem* p = nullptr;
  ASSERT_EQ(pmvr_problem_mean_variance_synthetic(10, 100, 1, 1.0, &p), PMVR_OK);
  EXPECT_STREQ(pmvr_last_error(), "");
  pmvr_problem_free(p);
}

TEST(CApi, ProblemQueries) {
  pmvr_problem* p = nullptr;
  const double center[2] = {0.2, 0.4};
  ASSERT_EQ(pmvr_problem_quadratic_toy(center, 2, 0.1, 0.1, &p), PMVR_OK);
  size_t rows = 0, cols = 0, depth = 0;
  ASSERT_EQ(pmvr_problem_shape(p, &rows, &cols), PMVR_OK);
  ASSERT_EQ(pmvr_problem_depth(p, &depth), PMVR_OK);
  EXPECT_EQ(rows, 2u);
  EXPECT_EQ(cols, 1u);
  EXPECT_EQ(depth, 2u);
  double x[2];
  ASSERT_EQ(pmvr_problem_start(p, x, 2), PMVR_OK);
  EXPECT_EQ(x[0], 1.0);
  double f = 0.0, gap = 0.0, gm = 0.0, g[2];
  ASSERT_EQ(pmvr_problem_objective(p, x, 2, &f), PMVR_OK);
  EXPECT_DOUBLE_EQ(f, 0.8);
  ASSERT_EQ(pmvr_problem_gradient(p, x, 2, g), PMVR_OK);
  EXPECT_DOUBLE_EQ(g[0], 1.6);
  EXPECT_DOUBLE_EQ(g[1], -0.8);
  ASSERT_EQ(pmvr_fw_gap(p, x, 2, &gap), PMVR_OK);
  EXPECT_DOUBLE_EQ(gap, 2.4);
  ASSERT_EQ(pmvr_gradient_mapping(p, x, 2, 1.0, &gm), PMVR_OK);
  EXPECT_GT(gm, 0.0);
  EXPECT_EQ(pmvr_problem_objective(p, x, 3, &f), PMVR_ERR_SHAPE);
  EXPECT_NE(std::string(pmvr_last_error()).find("expected 2"), std::string::npos);
  EXPECT_EQ(pmvr_gradient_mapping(p, x, 2, 0.0, &gm), PMVR_ERR_VALIDATION);
  pmvr_problem_free(p);
}

TEST(CApi, SolveAndTraceAccess) {
  pmvr_problem* p = nullptr;
  ASSERT_EQ(pmvr_problem_mean_variance_synthetic(10, 500, 0, 1.0, &p), PMVR_OK);
  pmvr_solver_params params;
  ASSERT_EQ(pmvr_theorem_params(1, 0.2, &params), PMVR_OK);
  EXPECT_EQ(params.iterations, 125u);
  pmvr_trace* t = nullptr;
  ASSERT_EQ(pmvr_solve(p, &params, 3, &t), PMVR_OK);
  const size_t n = pmvr_trace_rows(t);
  ASSERT_GT(n, 1u);
  pmvr_trace_row first, last;
  ASSERT_EQ(pmvr_trace_row_at(t, 0, &first), PMVR_OK);
  ASSERT_EQ(pmvr_trace_row_at(t, n - 1, &last), PMVR_OK);
  EXPECT_EQ(first.iter, 0u);
  EXPECT_EQ(last.iter, 125u);
  EXPECT_EQ(last.lmo, 125u);
  EXPECT_EQ(last.sfo, 2u * params.b0 + 2u * 124u * 2u * params.b1);
  EXPECT_EQ(pmvr_trace_row_at(t, n, &last), PMVR_ERR_VALIDATION);
  double x[10];
  ASSERT_EQ(pmvr_trace_solution(t, x, 10), PMVR_OK);
  double s = 0.0;
  for (double e : x) s += e;
  EXPECT_NEAR(s, 1.0, 1e-12);
  const fs::path out = fs::temp_directory_path() / "pmvr_unit" / "capi_trace.csv";
  ASSERT_EQ(pmvr_trace_write_csv(t, out.c_str()), PMVR_OK);
  EXPECT_TRUE(fs::exists(out));
  pmvr_trace_free(t);
  pmvr_problem_free(p);
}

TEST(CApi, InvalidParamsReported) {
  pmvr_problem* p = nullptr;
  ASSERT_EQ(pmvr_problem_mean_variance_synthetic(4, 50, 0, 1.0, &p), PMVR_OK);
  pmvr_solver_params params{};
  params.eta = 2.0;
  params.alpha = 0.5;
  params.b0 = params.b1 = params.iterations = 1;
  pmvr_trace* t = nullptr;
  EXPECT_EQ(pmvr_solve(p, &params, 1, &t), PMVR_ERR_VALIDATION);
  EXPECT_EQ(t, nullptr);
  EXPECT_NE(std::string(pmvr_last_error()).find("eta"), std::string::npos);
  EXPECT_EQ(pmvr_solve(nullptr, &params, 1, &t), PMVR_ERR_VALIDATION);
  EXPECT_EQ(pmvr_theorem_params(5, 0.1, &params), PMVR_ERR_VALIDATION);
  pmvr_problem_free(p);
}

TEST(CApi, ConfigErrorsCarryField) {
  pmvr_config* c = nullptr;
  EXPECT_EQ(pmvr_config_parse(R"({"problem": "mean_variance", "algo": "pmvr", "theorem": "thm1", "eps": 0, "seed": 1})", &c),
            PMVR_ERR_VALIDATION);
  EXPECT_STREQ(pmvr_last_error_field(), "$.eps");
  EXPECT_EQ(pmvr_config_load("/nonexistent.json", &c), PMVR_ERR_VALIDATION);
}

TEST(CApi, ConfigRunWritesFiles) {
  pmvr_config* c = nullptr;
  ASSERT_EQ(pmvr_config_parse(R"({"problem": "quadratic_toy", "algo": "pmvr", "theorem": "thm1", "eps": 0.3, "seed": 2})", &c),
            PMVR_OK);
  ASSERT_EQ(pmvr_config_set_reps(c, 2), PMVR_OK);
  EXPECT_EQ(pmvr_config_set_reps(c, 0), PMVR_ERR_VALIDATION);
  size_t needed = 0;
  ASSERT_EQ(pmvr_config_to_json(c, nullptr, 0, &needed), PMVR_OK);
  std::string json(needed, '\0');
  ASSERT_EQ(pmvr_config_to_json(c, json.data(), json.size(), &needed), PMVR_OK);
  EXPECT_NE(json.find("\"reps\": 2"), std::string::npos);
  const fs::path out = fs::temp_directory_path() / "pmvr_unit" / "capi_run";
  fs::remove_all(out);
  std::vector<std::string> lines;
  ASSERT_EQ(pmvr_run_config(c, out.c_str(), collect, &lines), PMVR_OK);
  EXPECT_TRUE(fs::exists(out / "trace_rep1.csv"));
  EXPECT_TRUE(fs::exists(out / "aggregate.csv"));
  EXPECT_EQ(lines.size(), 3u);
  pmvr_config_free(c);
}

TEST(CApi, CheckSuiteReports) {
  std::vector<std::string> lines;
  EXPECT_EQ(pmvr_check("subsolver", collect, &lines), PMVR_OK);
  ASSERT_FALSE(lines.empty());
  EXPECT_EQ(lines.front().rfind("PASS subsolver/", 0), 0u);
  EXPECT_EQ(pmvr_check("nope", collect, &lines), PMVR_ERR_VALIDATION);
}

TEST(CApi, PortfolioFileAndReproduceGuard) {
  pmvr_problem* p = nullptr;
  const std::string fixture = std::string(PMVR_FIXTURE_DIR) + "/industry10_monthly.csv";
  EXPECT_EQ(pmvr_problem_portfolio_file(fixture.c_str(), 0, 1.0, 0, &p), PMVR_ERR_IO);
  ASSERT_EQ(pmvr_problem_portfolio_file(fixture.c_str(), 1, 1.0, 1, &p), PMVR_OK);
  size_t rows = 0;
  pmvr_problem_shape(p, &rows, nullptr);
  EXPECT_EQ(rows, 10u);
  pmvr_problem_free(p);
  EXPECT_EQ(pmvr_reproduce("mv-portfolio", "paper", nullptr, nullptr, 1, 0, nullptr, nullptr),
            PMVR_ERR_VALIDATION);
  EXPECT_NE(std::string(pmvr_last_error()).find("download"), std::string::npos);
}

}  // namespace

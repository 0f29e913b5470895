#include "pmvr/pmvr.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include "pmvr/config.hpp"
#include "pmvr/data_io.hpp"
#include "pmvr/error.hpp"
#include "pmvr/harness.hpp"
#include "pmvr/selfcheck.hpp"

struct pmvr_config {
  pmvr::RunConfig config;
};

struct pmvr_problem {
  pmvr::Benchmark bench;
};

struct pmvr_trace {
  pmvr::RunResult result;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_field;

template <class F>
pmvr_status guarded(F&& body) {
  g_last_error.clear();
  g_last_field.clear();
  try {
    return body();
  } catch (const pmvr::ValidationError& e) {
    g_last_error = e.what();
    g_last_field = e.field();
    return PMVR_ERR_VALIDATION;
  } catch (const pmvr::InvalidArgument& e) {
    g_last_error = e.what();
    return PMVR_ERR_VALIDATION;
  } catch (const pmvr::ShapeError& e) {
    g_last_error = e.what();
    return PMVR_ERR_SHAPE;
  } catch (const pmvr::ConvergenceError& e) {
    g_last_error = e.what();
    return PMVR_ERR_CONVERGENCE;
  } catch (const pmvr::NumericError& e) {
    g_last_error = e.what();
    return PMVR_ERR_NUMERIC;
  } catch (const pmvr::IoError& e) {
    g_last_error = e.what();
    return PMVR_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PMVR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PMVR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PMVR_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw pmvr::InvalidArgument(std::string(what) + " must not be NULL");
}

pmvr::LogFn sink(pmvr_line_fn fn, void* user) {
  if (!fn) return {};
  return [fn, user](const std::string& line) { fn(line.c_str(), user); };
}

pmvr::Point input_point(const pmvr_problem* p, const double* x, size_t len) {
  require(p, "problem");
  require(x, "x");
  const pmvr::Shape shape = p->bench.problem->input_shape();
  if (len != shape.size())
    throw pmvr::ShapeError("expected " + std::to_string(shape.size()) + " values, got " +
                           std::to_string(len));
  return pmvr::Point(shape, std::vector<double>(x, x + len));
}

void copy_out(const pmvr::Point& p, double* out, size_t len) {
  require(out, "output buffer");
  if (len != p.size())
    throw pmvr::ShapeError("output buffer holds " + std::to_string(len) + " values, need " +
                           std::to_string(p.size()));
  std::memcpy(out, p.data().data(), len * sizeof(double));
}

pmvr_status make_problem(pmvr::Benchmark bench, pmvr_problem** out) {
  *out = new pmvr_problem{std::move(bench)};
  return PMVR_OK;
}

}  // namespace

extern "C" {

const char* pmvr_version(void) { return "0.1.0"; }
const char* pmvr_last_error(void) { return g_last_error.c_str(); }
const char* pmvr_last_error_field(void) { return g_last_field.c_str(); }

pmvr_status pmvr_config_load(const char* path, pmvr_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new pmvr_config{pmvr::load_run_config(path)};
    return PMVR_OK;
  });
}

pmvr_status pmvr_config_parse(const char* json_text, pmvr_config** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = new pmvr_config{pmvr::parse_run_config(json_text)};
    return PMVR_OK;
  });
}

void pmvr_config_free(pmvr_config* config) { delete config; }

pmvr_status pmvr_config_set_seed(pmvr_config* config, uint64_t seed) {
  return guarded([&] {
    require(config, "config");
    config->config.seed = seed;
    return PMVR_OK;
  });
}

pmvr_status pmvr_config_set_reps(pmvr_config* config, uint64_t reps) {
  return guarded([&] {
    require(config, "config");
    if (reps < 1) throw pmvr::ValidationError("--reps", "must be at least 1");
    config->config.reps = reps;
    return PMVR_OK;
  });
}

pmvr_status pmvr_config_set_threads(pmvr_config* config, uint64_t threads) {
  return guarded([&] {
    require(config, "config");
    if (threads < 1) throw pmvr::ValidationError("--threads", "must be at least 1");
    config->config.threads = threads;
    return PMVR_OK;
  });
}

pmvr_status pmvr_config_to_json(const pmvr_config* config, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(config, "config");
    const std::string text = pmvr::run_config_to_json(config->config);
    if (needed) *needed = text.size() + 1;
    if (buf && cap > 0) {
      const size_t n = std::min(cap - 1, text.size());
      std::memcpy(buf, text.data(), n);
      buf[n] = '\0';
    }
    return PMVR_OK;
  });
}

pmvr_status pmvr_run_config(const pmvr_config* config, const char* out_dir, pmvr_line_fn log,
                            void* user) {
  return guarded([&] {
    require(config, "config");
    const auto dir = pmvr::resolve_out_dir(out_dir ? out_dir : "", &config->config);
    pmvr::run_experiment(config->config, dir, sink(log, user));
    return PMVR_OK;
  });
}

pmvr_status pmvr_check(const char* suite, pmvr_line_fn report, void* user) {
  return guarded([&] {
    require(suite, "suite");
    const auto results = pmvr::run_check_suite(suite);
    std::size_t failed = 0;
    for (const auto& r : results) {
      if (!r.passed) ++failed;
      if (report) report(pmvr::format_check(r).c_str(), user);
    }
    const std::string summary = std::to_string(results.size() - failed) + "/" +
                                std::to_string(results.size()) + " checks passed";
    if (report) report(summary.c_str(), user);
    if (failed) {
      g_last_error = summary;
      return PMVR_ERR_CHECK_FAILED;
    }
    return PMVR_OK;
  });
}

pmvr_status pmvr_reproduce(const char* experiment, const char* scale, const char* data_path,
                           const char* out_dir, uint64_t threads, uint64_t reps, pmvr_line_fn log,
                           void* user) {
  return guarded([&] {
    require(experiment, "experiment");
    require(scale, "scale");
    pmvr::ReproduceRequest req;
    req.experiment = experiment;
    req.scale = scale;
    req.data_path = data_path ? data_path : "";
    req.out_dir = out_dir ? out_dir : "";
    req.threads = threads ? threads : 1;
    if (reps) req.reps = reps;
    pmvr::reproduce(req, sink(log, user));
    return PMVR_OK;
  });
}

pmvr_status pmvr_problem_mean_variance_synthetic(uint64_t assets, uint64_t periods,
                                                 uint64_t data_seed, double lambda,
                                                 pmvr_problem** out) {
  return guarded([&] {
    require(out, "out");
    auto data = std::make_shared<pmvr::PortfolioData>(
        pmvr::synthetic_returns({assets, periods, data_seed}));
    return make_problem(pmvr::mean_variance_problem(data, lambda), out);
  });
}

pmvr_status pmvr_problem_mean_deviation_synthetic(uint64_t assets, uint64_t periods,
                                                  uint64_t data_seed, double lambda,
                                                  pmvr_problem** out) {
  return guarded([&] {
    require(out, "out");
    auto data = std::make_shared<pmvr::PortfolioData>(
        pmvr::synthetic_returns({assets, periods, data_seed}));
    return make_problem(pmvr::mean_deviation_problem(data, lambda), out);
  });
}

pmvr_status pmvr_problem_portfolio_file(const char* path, int kind, double lambda,
                                        int drop_sentinels, pmvr_problem** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    if (kind != 0 && kind != 1) throw pmvr::InvalidArgument("kind must be 0 or 1");
    pmvr::FrenchLoadOptions opts;
    opts.sentinel = drop_sentinels ? pmvr::SentinelPolicy::kDrop : pmvr::SentinelPolicy::kError;
    auto data = std::make_shared<pmvr::PortfolioData>(pmvr::load_french_csv(path, opts).data);
    return make_problem(kind == 0 ? pmvr::mean_variance_problem(data, lambda)
                                  : pmvr::mean_deviation_problem(data, lambda),
                        out);
  });
}

pmvr_status pmvr_problem_single_index(uint64_t rows, uint64_t cols, double radius, double sigma,
                                      uint64_t data_seed, pmvr_problem** out) {
  return guarded([&] {
    require(out, "out");
    pmvr::SingleIndexConfig c;
    c.rows = rows;
    c.cols = cols;
    c.radius = radius;
    c.sigma = sigma;
    c.seed = data_seed;
    return make_problem(pmvr::single_index_problem(c), out);
  });
}

pmvr_status pmvr_problem_quadratic_toy(const double* center, size_t dim, double value_noise,
                                       double outer_noise, pmvr_problem** out) {
  return guarded([&] {
    require(center, "center");
    require(out, "out");
    pmvr::QuadraticToyConfig c;
    c.center = pmvr::Point::vector(std::vector<double>(center, center + dim));
    c.value_noise = value_noise;
    c.outer_noise = outer_noise;
    return make_problem(pmvr::quadratic_toy(c), out);
  });
}

void pmvr_problem_free(pmvr_problem* problem) { delete problem; }

pmvr_status pmvr_problem_shape(const pmvr_problem* problem, size_t* rows, size_t* cols) {
  return guarded([&] {
    require(problem, "problem");
    const pmvr::Shape s = problem->bench.problem->input_shape();
    if (rows) *rows = s.rows;
    if (cols) *cols = s.cols;
    return PMVR_OK;
  });
}

pmvr_status pmvr_problem_depth(const pmvr_problem* problem, size_t* depth) {
  return guarded([&] {
    require(problem, "problem");
    require(depth, "depth");
    *depth = problem->bench.problem->depth();
    return PMVR_OK;
  });
}

pmvr_status pmvr_problem_start(const pmvr_problem* problem, double* x, size_t len) {
  return guarded([&] {
    require(problem, "problem");
    copy_out(problem->bench.x0, x, len);
    return PMVR_OK;
  });
}

pmvr_status pmvr_problem_objective(const pmvr_problem* problem, const double* x, size_t len,
                                   double* value) {
  return guarded([&] {
    require(value, "value");
    *value = pmvr::exact_objective(*problem->bench.problem, input_point(problem, x, len));
    return PMVR_OK;
  });
}

pmvr_status pmvr_problem_gradient(const pmvr_problem* problem, const double* x, size_t len,
                                  double* gradient) {
  return guarded([&] {
    const pmvr::Point g = pmvr::exact_gradient(*problem->bench.problem, input_point(problem, x, len));
    copy_out(g, gradient, len);
    return PMVR_OK;
  });
}

pmvr_status pmvr_fw_gap(const pmvr_problem* problem, const double* x, size_t len, double* value) {
  return guarded([&] {
    require(value, "value");
    const pmvr::Point p = input_point(problem, x, len);
    *value = pmvr::fw_gap(*problem->bench.problem, problem->bench.set, p);
    return PMVR_OK;
  });
}

pmvr_status pmvr_gradient_mapping(const pmvr_problem* problem, const double* x, size_t len,
                                  double beta, double* value) {
  return guarded([&] {
    require(value, "value");
    const pmvr::Point p = input_point(problem, x, len);
    *value = pmvr::gradient_mapping(*problem->bench.problem, problem->bench.set, p, beta);
    return PMVR_OK;
  });
}

pmvr_status pmvr_theorem_params(int theorem, double eps, pmvr_solver_params* out) {
  return guarded([&] {
    require(out, "out");
    if (theorem < 1 || theorem > 4)
      throw pmvr::InvalidArgument("pmvr_theorem_params covers the single-stage theorems 1..4");
    const auto p = std::get<pmvr::SolverParams>(pmvr::theorem_schedule(theorem, eps));
    *out = pmvr_solver_params{};
    out->eta = p.eta;
    out->alpha = p.alpha;
    out->b0 = p.b0;
    out->b1 = p.b1;
    out->iterations = p.iterations;
    out->inner_iterations = p.subsolver ? p.subsolver->inner_iterations : 0;
    out->coeff = p.subsolver ? p.subsolver->coeff : 1.0;
    out->beta = 1.0;
    return PMVR_OK;
  });
}

pmvr_status pmvr_solve(const pmvr_problem* problem, const pmvr_solver_params* params, uint64_t seed,
                       pmvr_trace** out) {
  return guarded([&] {
    require(problem, "problem");
    require(params, "params");
    require(out, "out");
    pmvr::SolverParams p;
    p.eta = params->eta;
    p.alpha = params->alpha;
    p.b0 = params->b0;
    p.b1 = params->b1;
    p.iterations = params->iterations;
    if (params->inner_iterations)
      p.subsolver = pmvr::QuadraticSubsolver{params->coeff, params->inner_iterations,
                                             pmvr::GammaRule::kClassic};
    pmvr::RunOptions opts;
    opts.trace.cadence = params->cadence;
    opts.trace.beta = params->beta > 0.0 ? params->beta : 1.0;
    opts.output = params->last_iterate ? pmvr::OutputSelection::kLastIterate
                                       : pmvr::OutputSelection::kRandomIterate;
    const auto& b = problem->bench;
    *out = new pmvr_trace{pmvr::pmvr_run(*b.problem, b.set, p, b.x0, seed, opts)};
    return PMVR_OK;
  });
}

void pmvr_trace_free(pmvr_trace* trace) { delete trace; }

size_t pmvr_trace_rows(const pmvr_trace* trace) {
  return trace ? trace->result.trace.rows.size() : 0;
}

pmvr_status pmvr_trace_row_at(const pmvr_trace* trace, size_t index, pmvr_trace_row* row) {
  return guarded([&] {
    require(trace, "trace");
    require(row, "row");
    const auto& rows = trace->result.trace.rows;
    if (index >= rows.size()) throw pmvr::InvalidArgument("row index out of range");
    const auto& r = rows[index];
    *row = pmvr_trace_row{r.iter,     r.stage,  r.seconds, r.sfo,
                          r.lmo,      r.objective, r.fw_gap, r.grad_map,
                          r.beta,     r.opt_gap ? 1 : 0, r.opt_gap.value_or(0.0)};
    return PMVR_OK;
  });
}

pmvr_status pmvr_trace_solution(const pmvr_trace* trace, double* x, size_t len) {
  return guarded([&] {
    require(trace, "trace");
    copy_out(trace->result.x_out, x, len);
    return PMVR_OK;
  });
}

pmvr_status pmvr_trace_write_csv(const pmvr_trace* trace, const char* path) {
  return guarded([&] {
    require(trace, "trace");
    require(path, "path");
    pmvr::write_trace_csv(trace->result.trace.rows, path);
    return PMVR_OK;
  });
}

}  // extern "C"

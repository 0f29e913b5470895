/* Builds against the public header as C and solves a small problem. */
#include <stdio.h>

#include "pmvr/pmvr.h"

int main(void) {
  pmvr_problem* problem = NULL;
  pmvr_solver_params params;
  pmvr_trace* trace = NULL;
  pmvr_trace_row row;
  const double center[3] = {0.2, 0.4, 0.1};

  if (pmvr_problem_quadratic_toy(center, 3, 0.05, 0.05, &problem) != PMVR_OK) goto fail;
  if (pmvr_theorem_params(1, 0.25, &params) != PMVR_OK) goto fail;
  if (pmvr_solve(problem, &params, 1, &trace) != PMVR_OK) goto fail;
  if (pmvr_trace_row_at(trace, pmvr_trace_rows(trace) - 1, &row) != PMVR_OK) goto fail;
  printf("iter %llu objective %.6f fw_gap %.6f\n", (unsigned long long)row.iter, row.objective,
         row.fw_gap);
  pmvr_trace_free(trace);
  pmvr_problem_free(problem);
  return row.iter == params.iterations ? 0 : 1;

fail:
  fprintf(stderr, "error: %s\n", pmvr_last_error());
  pmvr_trace_free(trace);
  pmvr_problem_free(problem);
  return 1;
}

/* Exercises the C interface from a C translation unit. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "gbq/gbq.h"

static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: CHECK(%s) failed\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static const char* kZeroRun =
    "[model]\nalpha = 3\nbeta = -1\n"
    "[grid]\ndim = 1\npoints = 64\nbox = 20\n"
    "[stepper]\ndt = 0.01\nt_end = 0.05\nsample_every = 1\n"
    "[initial]\nprofile = gaussian\namplitude = 0\n";

static void test_errors(void) {
  gbq_config* cfg = NULL;
  CHECK(gbq_config_parse("[model]\nalpha = x\n", &cfg) == GBQ_ERR_PARSE);
  CHECK(cfg == NULL);
  CHECK(strstr(gbq_last_error(), "line 2") != NULL);
  CHECK(gbq_config_parse(NULL, &cfg) == GBQ_ERR_INVALID_ARGUMENT);
  CHECK(gbq_config_load("/nonexistent/dir/run.cfg", &cfg) == GBQ_ERR_IO);
  CHECK(strcmp(gbq_status_name(GBQ_ERR_NOT_CONVERGED), "not converged") == 0);
  CHECK(gbq_csv_header("nothing", 1) == NULL);
  CHECK(strncmp(gbq_csv_header("diagnostics", 2), "t,energy,momentum_x,momentum_y,", 31) == 0);
  gbq_config_free(NULL);
  gbq_report_free(NULL);
}

static void test_config(void) {
  gbq_config* cfg = NULL;
  char* text = NULL;
  char* again = NULL;
  gbq_config* back = NULL;
  CHECK(gbq_config_parse(kZeroRun, &cfg) == GBQ_OK);
  CHECK(gbq_config_set(cfg, "model.alpha", "0.5") == GBQ_ERR_INVALID_ARGUMENT);
  CHECK(gbq_config_set(cfg, "stepper.t_end", "0.03") == GBQ_OK);
  CHECK(gbq_config_serialize(cfg, &text) == GBQ_OK);
  CHECK(strstr(text, "t_end = 0.029999999999999999") != NULL || strstr(text, "t_end = 0.03") != NULL);
  CHECK(strstr(text, "alpha = 3") != NULL);
  CHECK(gbq_config_parse(text, &back) == GBQ_OK);
  CHECK(gbq_config_serialize(back, &again) == GBQ_OK);
  CHECK(strcmp(text, again) == 0);
  gbq_string_free(text);
  gbq_string_free(again);
  gbq_config_free(back);
  gbq_config_free(cfg);
}

static void test_evolve(void) {
  gbq_config* cfg = NULL;
  gbq_report* rep = NULL;
  CHECK(gbq_config_parse(kZeroRun, &cfg) == GBQ_OK);
  CHECK(gbq_run_evolve(cfg, &rep) == GBQ_OK);
  CHECK(strncmp(gbq_report_summary(rep), "OUTCOME=Completed t=", 20) == 0);
  CHECK(strncmp(gbq_report_csv(rep), gbq_csv_header("diagnostics", 1), strlen(gbq_csv_header("diagnostics", 1))) == 0);
  CHECK(strcmp(gbq_report_csv_path(rep), "") == 0);
  CHECK(gbq_report_contradiction(rep) == 0);
  gbq_report_free(rep);
  gbq_config_free(cfg);
}

static void test_ground_state(void) {
  gbq_ground_state_options opts;
  gbq_ground_state* gs = NULL;
  gbq_ground_state_info info;
  gbq_ground_state_options_default(&opts);
  opts.points = 1024;
  CHECK(gbq_ground_state_compute(&opts, &gs) == GBQ_OK);
  CHECK(gbq_ground_state_get_info(gs, &info) == GBQ_OK);
  CHECK(fabs(info.h1_norm_sq - 16.0 / 3.0) < 1e-8);
  CHECK(fabs(info.c_star - 0.658037) < 1e-6);
  gbq_ground_state_free(gs);

  opts.alpha = 0.5;
  gs = NULL;
  CHECK(gbq_ground_state_compute(&opts, &gs) == GBQ_ERR_INVALID_ARGUMENT);
  CHECK(gs == NULL);
}

static void test_sweep(void) {
  gbq_sweep* sweep = NULL;
  gbq_report* rep = NULL;
  CHECK(gbq_sweep_parse("[sweep]\namplitude =\n", &sweep) == GBQ_OK);
  gbq_sweep_set_seed(sweep, 5);
  CHECK(gbq_run_sweep(sweep, 2, 0, NULL, &rep) == GBQ_OK);
  CHECK(strcmp(gbq_report_csv(rep), "alpha,beta,amplitude,profile,verdict,energy0,h1_0,thr_energy,thr_norm,"
                                    "y1,y2,outcome,max_h1,t_end,wallclock_s\n") == 0);
  gbq_report_free(rep);
  gbq_sweep_free(sweep);
}

int main(void) {
  CHECK(gbq_version() != NULL);
  test_errors();
  test_config();
  test_evolve();
  test_ground_state();
  test_sweep();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return EXIT_FAILURE;
  }
  printf("all C interface checks passed\n");
  return EXIT_SUCCESS;
}

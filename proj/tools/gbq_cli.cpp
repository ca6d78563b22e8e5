#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gbq/gbq.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kContradiction = 3 };

int exit_code(gbq_status s) {
  switch (s) {
    case GBQ_OK: return kOk;
    case GBQ_ERR_INVALID_ARGUMENT:
    case GBQ_ERR_GRID_MISMATCH:
    case GBQ_ERR_IO:
    case GBQ_ERR_PARSE: return kUsage;
    default: return kNumerical;
  }
}

int report_error(gbq_status s) {
  std::cerr << "error (" << gbq_status_name(s) << "): " << gbq_last_error() << "\n";
  return exit_code(s);
}

// rep is read after the command call that fills it has run.
// CSV goes to stdout when it was not written to a file; the summary then moves to stderr.
int finish(gbq_status s, gbq_report*& rep) {
  if (s != GBQ_OK) return report_error(s);
  const bool to_file = *gbq_report_csv_path(rep) != '\0';
  const std::string csv = gbq_report_csv(rep);
  if (to_file || csv.empty()) {
    std::cout << gbq_report_summary(rep);
  } else {
    std::cerr << gbq_report_summary(rep);
    std::cout << csv;
  }
  const int code = gbq_report_contradiction(rep) ? kContradiction : kOk;
  gbq_report_free(rep);
  return code;
}

struct ConfigHandle {
  gbq_config* p = nullptr;
  ~ConfigHandle() { gbq_config_free(p); }
};

gbq_status load_config(const std::string& path, std::optional<unsigned long long> seed, ConfigHandle& h) {
  gbq_status s = gbq_config_load(path.c_str(), &h.p);
  if (s == GBQ_OK && seed) s = gbq_config_set(h.p, "run.seed", std::to_string(*seed).c_str());
  return s;
}

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

std::string columns(const char* kind, int dim = 1) {
  return std::string("CSV columns: ") + gbq_csv_header(kind, dim);
}

std::string diagnostics_columns() {
  std::string s = "CSV columns by dimension:";
  for (int d = 1; d <= 3; ++d) s += "\n  d=" + std::to_string(d) + ": " + gbq_csv_header("diagnostics", d);
  return s;
}

int jobs_from_env(int jobs) {
  if (const char* env = std::getenv("GBQ_NUM_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring GBQ_NUM_THREADS=" << env << "\n";
  }
  return jobs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Boussinesq equation solver and experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gbq_version());
  app.footer(
      "Exit codes: 0 ok, 1 usage or input error, 2 numerical failure, 3 contradiction report.\n"
      "GBQ_NUM_THREADS overrides --jobs of the sweep command.");

  // ground-state
  gbq_ground_state_options gs_opts;
  gbq_ground_state_options_default(&gs_opts);
  std::string gs_out;
  auto* gs = app.add_subcommand("ground-state", "Compute the ground state by Petviashvili iteration");
  gs->add_option("--alpha", gs_opts.alpha, "Nonlinearity exponent (> 1)")->capture_default_str();
  gs->add_option("--dim", gs_opts.dim, "Dimension 1, 2 or 3")->capture_default_str();
  gs->add_option("--box", gs_opts.box, "Box side (default 80, 40, 30 by dimension)");
  gs->add_option("--points", gs_opts.points, "Points per axis (default 2048, 256, 128 by dimension)");
  gs->add_option("--tol", gs_opts.tol, "Sup-norm change tolerance")->capture_default_str();
  gs->add_option("--max-iter", gs_opts.max_iter, "Iteration cap")->capture_default_str();
  gs->add_option("--out", gs_out, "Checkpoint path; constants go to <out>.txt");
  gs->footer("Prints the constants sidecar: alpha, dim, h1_norm_sq, c_star, eta, residuals.");

  // evolve
  std::string ev_config;
  std::optional<unsigned long long> ev_seed;
  auto* ev = app.add_subcommand("evolve", "Run a configured evolution");
  ev->add_option("--config", ev_config, "Run configuration file")->required();
  ev->add_option("--seed", ev_seed, "Seed for the initial-data noise");
  ev->footer(diagnostics_columns() + "\nFirst summary line: OUTCOME=<Completed|BlowupDetected> t=<time>");

  // classify
  std::string cl_config, cl_gs, cl_csv;
  bool cl_confirm = false;
  std::optional<unsigned long long> cl_seed;
  auto* cl = app.add_subcommand("classify", "Classify initial data against the ground-state threshold");
  cl->add_option("--config", cl_config, "Run configuration file")->required();
  cl->add_option("--ground-state", cl_gs, "Ground-state checkpoint (default: computed on the run grid)");
  cl->add_flag("--confirm", cl_confirm, "Evolve the data and check the prediction");
  cl->add_option("--csv", cl_csv, "Diagnostics CSV of the confirmation run");
  cl->add_option("--seed", cl_seed, "Seed for the initial-data noise");
  cl->footer(diagnostics_columns() + "\nExit code 3 when the confirmation run contradicts the verdict.");

  // sweep
  std::string sw_grid, sw_csv;
  int sw_jobs = 1;
  bool sw_no_timing = false;
  std::optional<unsigned long long> sw_seed;
  auto* sw = app.add_subcommand("sweep", "Classify (and optionally evolve) a grid of parameters");
  sw->add_option("--grid", sw_grid, "Sweep description file")->required();
  sw->add_option("--jobs", sw_jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sw->add_flag("--no-timing", sw_no_timing, "Write 0 in the wallclock_s column");
  sw->add_option("--csv", sw_csv, "Output CSV (overrides output.csv)");
  sw->add_option("--seed", sw_seed, "Seed for the initial-data noise");
  sw->footer(columns("sweep"));

  // decay-test
  int dc_dim = 1;
  std::vector<double> dc_shells{1.0}, dc_times;
  double dc_width = 1.0, dc_box = 0.0;
  int dc_points = 0;
  std::string dc_csv;
  auto* dc = app.add_subcommand("decay-test", "Fit the linear L-infinity decay rate of a frequency-localized packet");
  dc->add_option("--dim", dc_dim, "Dimension 1, 2 or 3")->capture_default_str();
  dc->add_option("--shells", dc_shells, "Dyadic shell centres")->delimiter(',');
  dc->add_option("--width", dc_width, "Packet width in octaves")->capture_default_str();
  dc->add_option("--times", dc_times, "Sample times (default: five below the wrap-around time)")->delimiter(',');
  dc->add_option("--points", dc_points, "Points per axis (default 4096, 512, 128)");
  dc->add_option("--box", dc_box, "Box side (default 1024, 512, 128)");
  dc->add_option("--csv", dc_csv, "Output CSV");
  dc->footer(columns("decay"));

  // morawetz
  std::string mo_config, mo_csv;
  std::vector<double> mo_radii;
  std::optional<unsigned long long> mo_seed;
  auto* mo = app.add_subcommand("morawetz", "Record the Morawetz functional and check its lower bound (d >= 3)");
  mo->add_option("--config", mo_config, "Run configuration file")->required();
  mo->add_option("--R", mo_radii, "Radii (default: diagnostics.morawetz_R)")->delimiter(',');
  mo->add_option("--csv", mo_csv, "Output CSV");
  mo->add_option("--seed", mo_seed, "Seed for the initial-data noise");
  mo->footer(columns("morawetz"));

  // scattering
  std::string sc_config, sc_csv;
  double sc_horizon = 0.0;
  std::optional<unsigned long long> sc_seed;
  auto* sc = app.add_subcommand("scattering", "Probe scattering: residual windows, Strichartz and spacetime norms");
  sc->add_option("--config", sc_config, "Run configuration file")->required();
  sc->add_option("--horizon", sc_horizon, "Final time (truncated to the wrap-around time)")->required();
  sc->add_option("--csv", sc_csv, "Output CSV");
  sc->add_option("--seed", sc_seed, "Seed for the initial-data noise");
  sc->footer(columns("scattering") + "\n  quantity is residual, strichartz or spacetime");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  gbq_report* rep = nullptr;

  if (*gs) return finish(gbq_run_ground_state(&gs_opts, or_null(gs_out), &rep), rep);

  if (*ev) {
    ConfigHandle h;
    if (gbq_status s = load_config(ev_config, ev_seed, h); s != GBQ_OK) return report_error(s);
    return finish(gbq_run_evolve(h.p, &rep), rep);
  }

  if (*cl) {
    ConfigHandle h;
    if (gbq_status s = load_config(cl_config, cl_seed, h); s != GBQ_OK) return report_error(s);
    const gbq_status s = gbq_run_classify(h.p, or_null(cl_gs), cl_confirm ? 1 : 0, or_null(cl_csv), &rep);
    // The confirmation diagnostics are only printed when asked for.
    if (s == GBQ_OK && !cl_confirm) {
      std::cout << gbq_report_summary(rep);
      gbq_report_free(rep);
      return kOk;
    }
    return finish(s, rep);
  }

  if (*sw) {
    gbq_sweep* spec = nullptr;
    if (gbq_status s = gbq_sweep_load(sw_grid.c_str(), &spec); s != GBQ_OK) return report_error(s);
    if (sw_seed) gbq_sweep_set_seed(spec, *sw_seed);
    const gbq_status s = gbq_run_sweep(spec, jobs_from_env(sw_jobs), sw_no_timing ? 0 : 1, or_null(sw_csv), &rep);
    gbq_sweep_free(spec);
    return finish(s, rep);
  }

  if (*dc) {
    gbq_decay_options o{dc_dim, dc_shells.data(), dc_shells.size(), dc_width, dc_points, dc_box,
                        dc_times.empty() ? nullptr : dc_times.data(), dc_times.size()};
    return finish(gbq_run_decay_test(&o, or_null(dc_csv), &rep), rep);
  }

  if (*mo) {
    ConfigHandle h;
    if (gbq_status s = load_config(mo_config, mo_seed, h); s != GBQ_OK) return report_error(s);
    return finish(gbq_run_morawetz(h.p, mo_radii.data(), mo_radii.size(), or_null(mo_csv), &rep), rep);
  }

  if (*sc) {
    ConfigHandle h;
    if (gbq_status s = load_config(sc_config, sc_seed, h); s != GBQ_OK) return report_error(s);
    return finish(gbq_run_scattering(h.p, sc_horizon, or_null(sc_csv), &rep), rep);
  }

  return kUsage;
}

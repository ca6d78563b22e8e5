#include "commands.hpp"

#include <cmath>
#include <sstream>

namespace gbq {

namespace {

const int kGroundStatePoints[] = {2048, 256, 128};
const int kDecayPoints[] = {4096, 512, 128};
const double kDecayBox[] = {1024.0, 512.0, 128.0};

GroundState resolve_ground_state(const RunConfig& cfg, GridPtr grid, const std::string& path_override) {
  const std::string path = path_override.empty() ? cfg.ground_state_path : path_override;
  if (!path.empty()) return read_ground_state(path);
  return petviashvili(grid, cfg.model.alpha);
}

std::string records_csv(int dim, const std::vector<DiagnosticsRecord>& records) {
  std::string out = csv_header(dim) + "\n";
  for (const auto& r : records) out += csv_row(r) + "\n";
  return out;
}

std::string maybe_write(const std::string& path, const std::string& text) {
  if (!path.empty()) write_text_file(path, text);
  return path;
}

std::string kv(const std::string& key, double v) { return key + "=" + format_double(v) + "\n"; }

}  // namespace

CommandResult ground_state_command(const GroundStateArgs& args) {
  require(args.dim >= 1 && args.dim <= 3, "dim must be 1, 2 or 3");
  require(args.alpha > 1.0 && args.alpha < alpha_upper_bound(args.dim), "alpha must lie in (1, (d+2)/(d-2))");
  const int n = args.points > 0 ? args.points : kGroundStatePoints[args.dim - 1];
  const double L = args.box > 0.0 ? args.box : default_ground_state_box(args.dim);
  PetviashviliOptions opts;
  opts.tol = args.tol;
  opts.max_iter = args.max_iter;
  const GroundState gs = petviashvili(make_cubic_grid(args.dim, n, L), args.alpha, opts);
  if (!args.out.empty()) write_ground_state(gs, args.out, args.out + ".txt");
  CommandResult r;
  r.summary = sidecar_text(gs);
  return r;
}

CommandResult evolve_command(const RunConfig& cfg) {
  const GridPtr grid = cfg.make_grid();
  std::optional<GroundState> gs;
  if (cfg.init.profile == Profile::ground_state) gs = resolve_ground_state(cfg, grid, "");
  const PreparedData data = prepare_initial_data(grid, cfg.init, gs ? &*gs : nullptr);
  const State s0 = to_v(data.u0, data.u1, cfg.model);

  TracedRunConfig tc;
  tc.stepper = cfg.stepper;
  tc.morawetz_R = cfg.morawetz_R;
  tc.profile = cfg.morawetz_profile;
  const TracedRun run = traced_run(s0, tc);
  if (!cfg.checkpoint_path.empty()) write_checkpoint(cfg.checkpoint_path, run.outcome.final_state);

  CommandResult r;
  r.csv = records_csv(grid->dim(), run.records);
  r.csv_path = maybe_write(cfg.csv_path, r.csv);
  std::ostringstream os;
  os << "OUTCOME=" << to_string(run.outcome.status) << " t=" << format_double(run.outcome.final_state.t) << '\n';
  if (!run.outcome.reason.empty()) os << "reason=" << run.outcome.reason << '\n';
  os << "steps=" << run.outcome.steps << '\n'
     << kv("h1_initial", run.outcome.h1_initial) << kv("h1_final", run.outcome.h1_final)
     << kv("wrap_time", run.outcome.wrap_time);
  if (cfg.init.mean_subtract) os << kv("mean_removed", data.mean_removed);
  r.summary = os.str();
  return r;
}

CommandResult classify_command(const RunConfig& cfg, const ClassifyArgs& args) {
  require(cfg.model.nonlinearity == Nonlinearity::power, "classify needs the power nonlinearity");
  const GridPtr grid = cfg.make_grid();
  const GroundState gs = resolve_ground_state(cfg, grid, args.ground_state_path);
  const PreparedData data = prepare_initial_data(grid, cfg.init, &gs);
  const Classification c = classify(data.u0, data.u1, cfg.model, gs);

  std::ostringstream os;
  os << "verdict=" << to_string(c.verdict) << '\n'
     << kv("energy0", c.energy0) << kv("h1_0", c.h1_0) << kv("threshold_energy", c.threshold_energy)
     << kv("threshold_norm", c.threshold_norm) << kv("energy_margin", c.energy_margin)
     << kv("norm_margin", c.norm_margin);
  if (cfg.init.mean_subtract) os << kv("mean_removed", data.mean_removed);
  if (cfg.model.beta == -1) {
    const EnergyNormRoots roots = energy_norm_roots(c.energy0, gs, cfg.model.alpha);
    os << kv("y0", roots.y0) << kv("y1", roots.y1) << kv("y2", roots.y2);
    if (!roots.note.empty()) os << "roots_note=" << roots.note << '\n';
  }
  CommandResult r;
  if (args.confirm) {
    if (c.verdict == Verdict::indeterminate) {
      os << "outcome=NotRun (Indeterminate data is not confirmed)\n";
    } else {
      DichotomyConfig dc;
      dc.stepper = cfg.stepper;
      dc.probe_time = std::min(dc.probe_time, cfg.stepper.t_end);
      const DichotomyReport rep = confirm_dichotomy(to_v(data.u0, data.u1, cfg.model), c, gs, dc);
      os << "outcome=" << to_string(rep.outcome) << '\n'
         << "run_status=" << to_string(rep.status) << '\n'
         << kv("t_final", rep.t_final) << kv("max_h1_sq", rep.max_h1_sq) << kv("min_h1_sq", rep.min_h1_sq);
      if (!std::isnan(rep.blowup_bound)) os << kv("blowup_bound_T0", rep.blowup_bound) << kv("run_horizon", rep.run_horizon);
      os << "detail=" << rep.message << '\n';
      r.csv = records_csv(grid->dim(), rep.records);
      r.csv_path = maybe_write(args.csv, r.csv);
      r.contradiction = rep.outcome == DichotomyOutcome::contradiction;
    }
  }
  r.summary = os.str();
  return r;
}

CommandResult sweep_command(const SweepConfig& cfg, const SweepArgs& args) {
  const auto rows = run_sweep(cfg.spec, args.jobs);
  CommandResult r;
  r.csv = sweep_csv(rows, args.timing);
  r.csv_path = maybe_write(args.csv.empty() ? cfg.csv_path : args.csv, r.csv);
  int errors = 0;
  for (const auto& row : rows) errors += row.outcome.rfind("Error", 0) == 0;
  std::ostringstream os;
  os << "cells=" << rows.size() << '\n' << "failed_cells=" << errors << '\n';
  r.summary = os.str();
  return r;
}

CommandResult decay_command(const DecayArgs& args) {
  require(args.dim >= 1 && args.dim <= 3, "dim must be 1, 2 or 3");
  require(!args.shells.empty(), "need at least one shell");
  const int n = args.points > 0 ? args.points : kDecayPoints[args.dim - 1];
  const double L = args.box > 0.0 ? args.box : kDecayBox[args.dim - 1];
  const GridPtr grid = make_cubic_grid(args.dim, n, L);
  std::ostringstream csv, os;
  csv << kDecayHeader << '\n';
  for (double shell : args.shells) {
    const PacketSpec packet{shell, args.width};
    std::vector<double> times = args.times;
    if (times.empty()) {
      const double wrap = packet_wrap_time(*grid, packet);
      const double lo = wrap / 8.0, hi = wrap / 2.0;
      for (int i = 0; i < 5; ++i) times.push_back(lo * std::pow(hi / lo, i / 4.0));
    }
    const DecayFit fit = decay_rate_fit(grid, packet, times);
    for (std::size_t i = 0; i < fit.times.size(); ++i)
      csv << args.dim << ',' << format_double(shell) << ',' << format_double(fit.times[i]) << ','
          << format_double(fit.linf[i]) << '\n';
    os << "shell=" << format_double(shell) << " slope=" << format_double(fit.slope)
       << " prefactor=" << format_double(fit.prefactor) << " wrap_time=" << format_double(fit.wrap_time)
       << " expected_slope=" << format_double(-0.5 * args.dim) << '\n';
  }
  CommandResult r;
  r.csv = csv.str();
  r.summary = os.str();
  r.csv_path = maybe_write(args.csv, r.csv);
  return r;
}

CommandResult morawetz_command(const RunConfig& cfg, const std::vector<double>& radii, const std::string& csv_path) {
  RunConfig c = cfg;
  if (!radii.empty()) c.morawetz_R = radii;
  require(!c.morawetz_R.empty(), "no Morawetz radii given");
  c.init.mean_subtract = true;
  const GridPtr grid = c.make_grid();
  std::optional<GroundState> gs;
  if (c.init.profile == Profile::ground_state) gs = resolve_ground_state(c, grid, "");
  const PreparedData data = prepare_initial_data(grid, c.init, gs ? &*gs : nullptr);
  const State s0 = to_v(data.u0, data.u1, c.model);
  const double e0 = energy(s0);

  TracedRunConfig tc;
  tc.stepper = c.stepper;
  tc.morawetz_R = c.morawetz_R;
  tc.profile = c.morawetz_profile;
  const TracedRun run = traced_run(s0, tc);

  std::vector<double> times, pot;
  for (const auto& rec : run.records) {
    times.push_back(rec.t);
    pot.push_back(std::pow(rec.lp, c.model.alpha + 1.0));
  }
  std::ostringstream csv, os;
  csv << kMorawetzHeader << '\n';
  os << "OUTCOME=" << to_string(run.outcome.status) << " t=" << format_double(run.outcome.final_state.t) << '\n'
     << kv("energy0", e0) << kv("mean_removed", data.mean_removed);
  for (std::size_t j = 0; j < c.morawetz_R.size(); ++j) {
    const double R = c.morawetz_R[j];
    const auto& m = run.morawetz[j];
    std::vector<double> deriv(m.size(), kNaN);
    for (std::size_t i = 1; i + 1 < m.size(); ++i) deriv[i] = (m[i + 1] - m[i - 1]) / (times[i + 1] - times[i - 1]);
    for (std::size_t i = 0; i < m.size(); ++i)
      csv << format_double(R) << ',' << format_double(times[i]) << ',' << format_double(m[i]) << ','
          << format_double(deriv[i]) << ',' << format_double(pot[i]) << '\n';
    os << "R=" << format_double(R) << " bilaplacian_nonpositive=" << (run.weights[j].bilaplacian_nonpositive ? 1 : 0);
    if (grid->dim() >= 3 && m.size() >= 3) {
      const MorawetzAnalysis a = analyze_morawetz(times, m, pot, R, c.model.alpha, grid->dim(), e0);
      os << " bound_constant=" << format_double(a.bound_constant) << " fitted_C=" << format_double(a.fitted_C)
         << " theta=" << format_double(a.theta) << " c=" << format_double(a.c)
         << " fraction_satisfied=" << format_double(a.fraction_satisfied);
    } else {
      os << " (inequality check needs d >= 3 and three samples)";
    }
    os << '\n';
  }
  CommandResult r;
  r.csv = csv.str();
  r.summary = os.str();
  r.csv_path = maybe_write(csv_path, r.csv);
  return r;
}

CommandResult scattering_command(const RunConfig& cfg, double horizon, const std::string& csv_path) {
  const GridPtr grid = cfg.make_grid();
  std::optional<GroundState> gs;
  if (cfg.init.profile == Profile::ground_state) gs = resolve_ground_state(cfg, grid, "");
  const PreparedData data = prepare_initial_data(grid, cfg.init, gs ? &*gs : nullptr);
  ScatteringConfig sc;
  sc.stepper = cfg.stepper;
  sc.morawetz_R = cfg.morawetz_R;
  sc.profile = cfg.morawetz_profile;
  const ScatteringReport rep = scattering_probe(to_v(data.u0, data.u1, cfg.model), horizon, sc);

  std::ostringstream csv, os;
  csv << kScatteringHeader << '\n';
  for (int i = 0; i < 3; ++i)
    csv << "residual," << format_double(rep.window_start[i]) << ',' << format_double(rep.window_end[i]) << ','
        << format_double(rep.residuals[i]) << '\n';
  for (std::size_t i = 0; i < rep.strichartz_times.size(); ++i)
    csv << "strichartz,0," << format_double(rep.strichartz_times[i]) << ',' << format_double(rep.strichartz_values[i])
        << '\n';
  csv << "spacetime,0," << format_double(rep.used_horizon / 2) << ',' << format_double(rep.spacetime_half) << '\n'
      << "spacetime,0," << format_double(rep.used_horizon) << ',' << format_double(rep.spacetime_full) << '\n';

  os << "OUTCOME=" << to_string(rep.status) << " t=" << format_double(rep.run.outcome.final_state.t) << '\n'
     << kv("horizon", rep.horizon) << kv("used_horizon", rep.used_horizon) << kv("wrap_time", rep.wrap_time);
  for (int i = 0; i < 3; ++i)
    os << "residual(" << format_double(rep.window_start[i]) << "," << format_double(rep.window_end[i])
       << ")=" << format_double(rep.residuals[i]) << '\n';
  os << "residuals_decreasing=" << (rep.decreasing ? "yes" : "no") << '\n'
     << kv("strichartz_s", rep.strichartz_s)
     << kv("spacetime_ratio", rep.spacetime_half > 0.0 ? rep.spacetime_full / rep.spacetime_half : kNaN);
  if (!rep.warning.empty()) os << "warning=" << rep.warning << '\n';
  CommandResult r;
  r.csv = csv.str();
  r.summary = os.str();
  r.csv_path = maybe_write(csv_path, r.csv);
  return r;
}

}  // namespace gbq

#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace gbq {

namespace {

// Bisection for a sign change of f on [lo, hi]; runs until the bracket cannot shrink.
template <class Fn>
double bisect(Fn f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 2000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool near_threshold(double x, double thr) { return std::abs(x - thr) <= kThresholdBand * std::abs(thr); }

std::string sanitize_cell(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(Profile p) {
  switch (p) {
    case Profile::gaussian: return "gaussian";
    case Profile::cosine: return "cosine";
    case Profile::ground_state: return "ground_state";
  }
  return "?";
}

Profile parse_profile(const std::string& s) {
  if (s == "gaussian") return Profile::gaussian;
  if (s == "cosine") return Profile::cosine;
  if (s == "ground_state") return Profile::ground_state;
  fail(ErrorCode::invalid_argument, "unknown profile '" + s + "' (expected gaussian, cosine or ground_state)");
}

void InitialData::validate() const {
  require(std::isfinite(amplitude), "amplitude must be finite");
  require(std::isfinite(width) && width > 0.0, "width must be positive");
  require(!modes.empty() && modes.size() == weights.size(), "modes and weights must be nonempty and of equal length");
  require(std::isfinite(noise) && noise >= 0.0, "noise must be nonnegative");
  require(noise_band > 0.0 && noise_band <= 1.0, "noise_band must lie in (0, 1]");
}

PreparedData prepare_initial_data(GridPtr grid, const InitialData& init, const GroundState* gs) {
  init.validate();
  const Grid& g = *grid;
  PreparedData out;
  switch (init.profile) {
    case Profile::gaussian: {
      const double w2 = 2.0 * init.width * init.width;
      out.u0 = Field::from_function(grid, [&](std::span<const double> x) {
        double r2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) r2 += x[a] * x[a];
        return cplx(init.amplitude * std::exp(-r2 / w2), 0.0);
      });
      break;
    }
    case Profile::cosine: {
      const double k0 = 2.0 * std::numbers::pi / g.side(0);
      out.u0 = Field::from_function(grid, [&](std::span<const double> x) {
        double v = 0.0;
        for (std::size_t j = 0; j < init.modes.size(); ++j) v += init.weights[j] * std::cos(init.modes[j] * k0 * x[0]);
        return cplx(init.amplitude * v, 0.0);
      });
      break;
    }
    case Profile::ground_state: {
      require(gs != nullptr, "ground_state profile needs a ground state");
      const Grid& h = gs->phi.grid();
      bool same = h.same_shape(g);
      for (int a = 0; same && a < g.dim(); ++a) same = std::abs(h.side(a) - g.side(a)) <= 1e-12 * g.side(a);
      require(same, "ground state grid does not match the run grid", ErrorCode::grid_mismatch);
      CVec vals = to_physical(gs->phi).storage();
      for (auto& z : vals) z = cplx(init.amplitude * z.real(), 0.0);
      out.u0 = Field(grid, Representation::physical, std::move(vals));
      break;
    }
  }
  if (init.noise > 0.0) {
    std::mt19937_64 rng(init.seed);
    std::normal_distribution<double> nd;
    const double kcut = init.noise_band * g.max_wavenumber() / 3.0;
    Field n(grid, Representation::spectral);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double re = nd(rng), im = nd(rng);
      if (g.k_abs()[i] <= kcut && g.k_abs()[i] > 0.0) n[i] = cplx(re, im);
    }
    Field p = real_field(to_physical(n));
    const double top = p.max_abs();
    if (top > 0.0) out.u0 += (init.noise / top) * p;
  }
  if (init.mean_subtract) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) sum += out.u0[i].real();
    out.mean_removed = sum / static_cast<double>(g.size());
    out.u0 = subtract_mean(out.u0);
  }
  out.u1 = Field(grid, Representation::physical);
  return out;
}

// ---------------------------------------------------------------------------

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::global_subthreshold: return "GlobalByThm2i";
    case Verdict::blowup_superthreshold: return "BlowupByThm2ii";
    case Verdict::defocusing_global: return "DefocusingGlobal";
    case Verdict::indeterminate: return "Indeterminate";
  }
  return "?";
}

Verdict verdict_table(int beta, double energy0, double h1_0, double thr_energy, double thr_norm) {
  if (beta == 1) return Verdict::defocusing_global;
  if (beta != -1) return Verdict::indeterminate;
  if (!(energy0 < thr_energy) || near_threshold(energy0, thr_energy)) return Verdict::indeterminate;
  if (near_threshold(h1_0, thr_norm)) return Verdict::indeterminate;
  if (h1_0 < thr_norm) return Verdict::global_subthreshold;
  if (h1_0 > thr_norm) return Verdict::blowup_superthreshold;
  return Verdict::indeterminate;
}

Classification classify(const Field& u0, const Field& u1, const ModelParams& params, const GroundState& gs) {
  params.validate();
  require(params.nonlinearity == Nonlinearity::power, "classification needs the power-law nonlinearity");
  require(std::abs(params.alpha - gs.alpha) <= 1e-12 * params.alpha,
          "ground state alpha does not match the model alpha", ErrorCode::grid_mismatch);
  require(u0.grid().dim() == gs.dim, "ground state dimension does not match the data", ErrorCode::grid_mismatch);
  const State s = to_v(u0, u1, params);
  Classification c;
  c.beta = params.beta;
  c.alpha = params.alpha;
  c.energy0 = energy(s);
  c.h1_0 = norm(real_field(u0), Norm::h1());
  c.threshold_energy = gs.threshold_energy();
  c.threshold_norm = gs.threshold_norm();
  c.energy_margin = c.threshold_energy - c.energy0;
  c.norm_margin = c.threshold_norm - c.h1_0;
  c.verdict = verdict_table(c.beta, c.energy0, c.h1_0, c.threshold_energy, c.threshold_norm);
  return c;
}

EnergyNormRoots energy_norm_roots(double energy0, const GroundState& gs, double alpha) {
  require(alpha > 1.0 && std::isfinite(energy0), "need alpha > 1 and a finite energy");
  require(gs.c_star > 0.0, "ground state has no sharp constant");
  EnergyNormRoots r;
  r.c1 = 2.0 * energy0;
  r.c2 = 2.0 / (alpha + 1.0) * std::pow(gs.c_star, alpha + 1.0);
  r.s = 0.5 * (alpha + 1.0);
  r.y0_closed = std::pow(1.0 / (r.c2 * r.s), 1.0 / (r.s - 1.0));

  auto Fp = [&](double y) { return r.c2 * r.s * std::pow(y, r.s - 1.0) - 1.0; };
  double hi = 1.0;
  while (Fp(hi) <= 0.0) hi *= 2.0;
  r.y0 = bisect(Fp, 0.0, hi);

  auto F = [&](double y) { return r.c1 + r.c2 * std::pow(y, r.s) - y; };
  if (!(F(r.y0) < 0.0)) {
    r.note = "2E(0) is not below (s-1)/s y0; y = c1 + c2 y^s has no fixed points";
    return r;
  }
  double top = 2.0 * r.y0;
  int doublings = 0;
  while (F(top) <= 0.0 && doublings < 1000) {
    top *= 2.0;
    ++doublings;
  }
  if (F(top) <= 0.0) {
    r.note = "no bracket found for the upper fixed point";
    return r;
  }
  r.y2 = bisect(F, r.y0, top);
  if (r.c1 < 0.0) {
    r.note = "E(0) < 0; only the upper fixed point exists";
    return r;
  }
  r.y1 = r.c1 == 0.0 ? 0.0 : bisect(F, 0.0, r.y0);
  r.roots_exist = true;
  return r;
}

// ---------------------------------------------------------------------------

const char* to_string(DichotomyOutcome o) {
  switch (o) {
    case DichotomyOutcome::confirmed_global: return "Confirmed-Global";
    case DichotomyOutcome::confirmed_blowup: return "Confirmed-Blowup";
    case DichotomyOutcome::confirmed_defocusing: return "Confirmed-Defocusing";
    case DichotomyOutcome::contradiction: return "Contradiction";
  }
  return "?";
}

double blowup_time_bound(const std::vector<DiagnosticsRecord>& records, double alpha) {
  double best = kNaN;
  for (const auto& r : records) {
    if (!(r.virial_rate > 0.0 && r.virial > 0.0)) continue;
    const double T = r.t + r.virial / (0.25 * (alpha - 1.0) * r.virial_rate);
    if (std::isnan(best) || T < best) best = T;
  }
  return best;
}

DichotomyReport confirm_dichotomy(const State& s0, const Classification& c, const GroundState& gs,
                                  const DichotomyConfig& cfg) {
  require(c.verdict != Verdict::indeterminate, "cannot confirm an Indeterminate classification");
  const double a = s0.params.alpha;
  DichotomyReport rep;
  rep.classification = c;
  if (s0.params.beta == -1) rep.roots = energy_norm_roots(c.energy0, gs, a);

  const double kappa = (a - 1.0) / (2.0 * (a + 1.0));
  auto absorb = [&](const State& s) {
    DiagnosticsRecord rec = compute_record(s);
    if (rep.records.empty()) {
      rep.max_h1_sq = rep.min_h1_sq = rec.h1_sq;
    } else {
      rep.max_h1_sq = std::max(rep.max_h1_sq, rec.h1_sq);
      rep.min_h1_sq = std::min(rep.min_h1_sq, rec.h1_sq);
    }
    if (c.verdict == Verdict::global_subthreshold) {
      const double lhs = kappa * rec.h1_sq + 0.5 * rec.hm1_ut - c.energy0;
      rep.energy_bound_worst = std::max(rep.energy_bound_worst, lhs);
    }
    rep.records.push_back(std::move(rec));
  };

  const double tol = cfg.norm_tolerance;
  std::ostringstream msg;
  if (c.verdict == Verdict::global_subthreshold || c.verdict == Verdict::defocusing_global) {
    const RunOutcome run = evolve(s0, cfg.stepper, absorb);
    rep.status = run.status;
    rep.t_final = run.final_state.t;
    rep.run_horizon = s0.t + cfg.stepper.t_end;
    if (run.status == RunStatus::blowup_detected) {
      msg << "run reported BlowupDetected at t=" << rep.t_final << " (" << run.reason << ")";
      rep.outcome = DichotomyOutcome::contradiction;
    } else if (c.verdict == Verdict::defocusing_global) {
      const double cap = 2.0 * c.energy0 * (1.0 + tol);
      rep.outcome = rep.max_h1_sq <= cap ? DichotomyOutcome::confirmed_defocusing : DichotomyOutcome::contradiction;
      msg << "max ||u||_H1^2 = " << rep.max_h1_sq << ", bound 2E(0) = " << 2.0 * c.energy0;
    } else {
      const double slack = cfg.energy_tolerance * std::abs(c.energy0) + 1e-14;
      rep.energy_bound_ok = rep.energy_bound_worst <= slack;
      const bool norm_ok = rep.max_h1_sq <= rep.roots.y1 * (1.0 + tol);
      rep.outcome = norm_ok && rep.energy_bound_ok ? DichotomyOutcome::confirmed_global : DichotomyOutcome::contradiction;
      msg << "sup ||u||_H1^2 = " << rep.max_h1_sq << " vs y1 = " << rep.roots.y1
          << "; worst energy-bound excess = " << rep.energy_bound_worst;
    }
  } else {
    StepperConfig probe = cfg.stepper;
    probe.t_end = cfg.probe_time;
    const RunOutcome first = evolve(s0, probe, absorb);
    rep.blowup_bound = blowup_time_bound(rep.records, a);
    rep.run_horizon = cfg.horizon_factor * rep.blowup_bound;
    RunOutcome last = first;
    if (first.status == RunStatus::completed) {
      if (std::isnan(rep.blowup_bound)) {
        rep.status = first.status;
        rep.t_final = first.final_state.t;
        rep.outcome = DichotomyOutcome::contradiction;
        rep.message = "virial rate never became positive during the probe";
        if (!cfg.keep_records) rep.records.clear();
        return rep;
      }
      if (rep.run_horizon > first.final_state.t) {
        StepperConfig cont = cfg.stepper;
        cont.t_end = rep.run_horizon - first.final_state.t;
        cont.h1_reference = first.h1_initial;
        bool skip = true;
        last = evolve(first.final_state, cont, [&](const State& s) {
          if (skip) {
            skip = false;
            return;
          }
          absorb(s);
        });
      }
    }
    rep.status = last.status;
    rep.t_final = last.final_state.t;
    if (last.status != RunStatus::blowup_detected) {
      msg << "no blowup before " << cfg.horizon_factor << " x T0 = " << rep.run_horizon;
      rep.outcome = DichotomyOutcome::contradiction;
    } else {
      const bool lower_ok = std::isfinite(rep.roots.y2) && rep.min_h1_sq >= rep.roots.y2 * (1.0 - tol);
      rep.outcome = lower_ok ? DichotomyOutcome::confirmed_blowup : DichotomyOutcome::contradiction;
      msg << "BlowupDetected at t=" << rep.t_final << " (T0 = " << rep.blowup_bound << "); min ||u||_H1^2 = "
          << rep.min_h1_sq << " vs y2 = " << rep.roots.y2;
    }
  }
  rep.message = msg.str();
  if (!cfg.keep_records) rep.records.clear();
  return rep;
}

// ---------------------------------------------------------------------------

TracedRun traced_run(const State& s0, const TracedRunConfig& cfg) {
  TracedRun tr;
  const GridPtr grid = s0.v.grid_ptr();
  for (double R : cfg.morawetz_R) tr.weights.push_back(morawetz_weight(grid, R, cfg.profile));
  tr.morawetz.resize(tr.weights.size());
  tr.strichartz.s = cfg.strichartz_s;
  if (cfg.strichartz) tr.strichartz.pairs = admissible_pairs(grid->dim());

  const double t0 = s0.t, t1 = s0.t + cfg.stepper.t_end;
  std::vector<double> bounds{t0};
  std::vector<double> marks = cfg.checkpoints;
  std::sort(marks.begin(), marks.end());
  for (double m : marks)
    if (m > bounds.back() && m < t1) bounds.push_back(m);
  bounds.push_back(t1);
  if (bounds.size() == 2 && t1 == t0) bounds.pop_back();

  auto absorb = [&](const State& s) {
    DiagnosticsRecord rec = compute_record(s);
    for (std::size_t j = 0; j < tr.weights.size(); ++j) tr.morawetz[j].push_back(morawetz_quantity(s, tr.weights[j]));
    if (!tr.morawetz.empty()) rec.morawetz = tr.morawetz[0].back();
    if (cfg.strichartz) tr.strichartz.add(s.v, s.t);
    tr.records.push_back(std::move(rec));
  };

  tr.profiles[t0] = s0.v;
  State cur = s0;
  tr.outcome.final_state = s0;
  tr.outcome.wrap_time = wrap_around_time(s0.v);
  if (bounds.size() < 2) {
    absorb(s0);
    tr.outcome.h1_initial = tr.outcome.h1_final = norm(real_field(s0.v), Norm::h1());
    return tr;
  }
  double h1_ref = 0.0;
  for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
    StepperConfig sc = cfg.stepper;
    sc.t_end = bounds[seg + 1] - bounds[seg];
    sc.h1_reference = h1_ref;
    bool skip = seg > 0;
    RunOutcome o = evolve(cur, sc, [&](const State& s) {
      if (skip) {
        skip = false;
        return;
      }
      absorb(s);
    });
    if (seg == 0) {
      h1_ref = o.h1_initial;
      tr.outcome.h1_initial = o.h1_initial;
    }
    tr.outcome.steps += o.steps;
    tr.outcome.status = o.status;
    tr.outcome.reason = o.reason;
    tr.outcome.h1_final = o.h1_final;
    tr.outcome.final_state = o.final_state;
    if (o.status == RunStatus::blowup_detected) break;
    cur = o.final_state;
    cur.t = bounds[seg + 1];
    tr.profiles[bounds[seg + 1]] = cur.v;
  }
  return tr;
}

ScatteringReport scattering_probe(const State& s0, double horizon, const ScatteringConfig& cfg) {
  const int d = s0.grid().dim();
  const double a = s0.params.alpha;
  require(s0.params.nonlinearity == Nonlinearity::power, "scattering probe needs the power-law nonlinearity");
  require(a >= 1.0 + 4.0 / d - 1e-12, "scattering probe needs alpha >= 1 + 4/d");
  require(std::isfinite(horizon) && horizon > 0.0, "horizon must be positive");

  ScatteringReport rep;
  rep.horizon = horizon;
  rep.wrap_time = wrap_around_time(s0.v);
  double T = horizon;
  if (T > rep.wrap_time) {
    T = rep.wrap_time;
    rep.truncated = true;
    std::ostringstream os;
    os << "horizon " << horizon << " exceeds the wrap-around time " << rep.wrap_time << "; truncated";
    rep.warning = os.str();
  }
  rep.used_horizon = T;
  rep.strichartz_s = std::max(0.0, 0.5 * d - 2.0 / (a - 1.0));

  const double t0 = s0.t;
  const std::array<double, 4> marks{t0 + T / 8.0, t0 + T / 4.0, t0 + T / 2.0, t0 + T};
  TracedRunConfig tc;
  tc.stepper = cfg.stepper;
  tc.stepper.t_end = T;
  tc.checkpoints = {marks[0], marks[1], marks[2]};
  tc.morawetz_R = cfg.morawetz_R;
  tc.profile = cfg.profile;
  tc.strichartz = true;
  tc.strichartz_s = rep.strichartz_s;
  rep.run = traced_run(s0, tc);
  rep.status = rep.run.outcome.status;
  if (rep.status == RunStatus::blowup_detected) {
    rep.residuals = {kNaN, kNaN, kNaN};
    if (!rep.warning.empty()) rep.warning += "; ";
    rep.warning += "run reported BlowupDetected at t=" + format_double(rep.run.outcome.final_state.t);
    return rep;
  }
  rep.run.profiles[marks[3]] = rep.run.outcome.final_state.v;
  for (int i = 0; i < 3; ++i) {
    rep.window_start[i] = marks[i];
    rep.window_end[i] = marks[i + 1];
    rep.residuals[i] = scattering_residual(rep.run.profiles, marks[i], marks[i + 1]);
  }
  rep.decreasing = rep.residuals[0] > rep.residuals[1] && rep.residuals[1] > rep.residuals[2];
  for (double m : marks) {
    rep.strichartz_times.push_back(m);
    rep.strichartz_values.push_back(strichartz_norm(rep.run.strichartz, t0, m));
  }
  rep.spacetime_half = spacetime_integral(rep.run.records, t0, marks[2], a);
  rep.spacetime_full = spacetime_integral(rep.run.records, t0, marks[3], a);
  return rep;
}

MorawetzAnalysis analyze_morawetz(const std::vector<double>& times, const std::vector<double>& values,
                                  const std::vector<double>& potential, double R, double alpha, int dim,
                                  double energy0, double early_fraction) {
  require(times.size() == values.size() && times.size() == potential.size(), "trace lengths differ");
  require(times.size() >= 3, "need at least three samples for centered differences");
  require(dim >= 3, "the Morawetz estimate is stated for d >= 3");
  require(R > 0.0 && early_fraction > 0.0 && early_fraction <= 1.0, "bad Morawetz analysis parameters");
  MorawetzAnalysis m;
  m.R = R;
  m.theta = theta_exponent(alpha, dim);
  m.c = 0.5 * (dim + 2.0 * alpha * dim / (alpha + 1.0) - 2.0);
  m.energy0 = energy0;
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  m.bound_constant = energy0 > 0.0 ? peak / (R * energy0) : kNaN;

  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    m.times.push_back(times[i]);
    m.values.push_back(values[i]);
    m.derivative.push_back((values[i + 1] - values[i - 1]) / (times[i + 1] - times[i - 1]));
    m.potential.push_back(potential[i]);
  }
  const std::size_t n = m.times.size();
  const std::size_t early = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(early_fraction * n)));
  const double rt = std::pow(R, m.theta);
  double C = 0.0;
  for (std::size_t i = 0; i < early; ++i) C = std::max(C, (m.c * m.potential[i] - m.derivative[i]) * rt);
  m.fitted_C = C;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rhs = m.c * m.potential[i] - C / rt;
    const double slack = 1e-12 * (std::abs(m.derivative[i]) + m.c * m.potential[i]);
    if (m.derivative[i] >= rhs - slack) ++ok;
  }
  m.fraction_satisfied = static_cast<double>(ok) / static_cast<double>(n);
  return m;
}

// ---------------------------------------------------------------------------

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs) {
  struct Cell {
    double alpha;
    int beta;
    double amplitude;
    Profile profile;
  };
  std::vector<Cell> cells;
  for (double a : spec.alphas)
    for (int b : spec.betas)
      for (double amp : spec.amplitudes)
        for (Profile p : spec.profiles) cells.push_back({a, b, amp, p});
  std::vector<SweepRow> rows(cells.size());
  if (cells.empty()) return rows;

  const GridPtr grid = make_cubic_grid(spec.dim, spec.points, spec.box);
  std::map<double, GroundState> states;
  std::map<double, std::string> failures;
  for (const Cell& c : cells) {
    if (states.count(c.alpha) || failures.count(c.alpha)) continue;
    try {
      states.emplace(c.alpha, petviashvili(grid, c.alpha));
    } catch (const std::exception& e) {
      failures.emplace(c.alpha, e.what());
    }
  }

  auto run_cell = [&](std::size_t idx) {
    const Cell& c = cells[idx];
    SweepRow& row = rows[idx];
    row.alpha = c.alpha;
    row.beta = c.beta;
    row.amplitude = c.amplitude;
    row.profile = c.profile;
    const auto t_start = std::chrono::steady_clock::now();
    try {
      if (auto f = failures.find(c.alpha); f != failures.end()) fail(ErrorCode::not_converged, "ground state: " + f->second);
      const GroundState& gs = states.at(c.alpha);
      InitialData init = spec.init;
      init.profile = c.profile;
      init.amplitude = c.amplitude;
      const PreparedData data = prepare_initial_data(grid, init, &gs);
      ModelParams params{c.alpha, c.beta, Nonlinearity::power};
      const Classification cls = classify(data.u0, data.u1, params, gs);
      row.verdict = to_string(cls.verdict);
      row.energy0 = cls.energy0;
      row.h1_0 = cls.h1_0;
      row.thr_energy = cls.threshold_energy;
      row.thr_norm = cls.threshold_norm;
      if (c.beta == -1) {
        const EnergyNormRoots r = energy_norm_roots(cls.energy0, gs, c.alpha);
        row.y1 = r.y1;
        row.y2 = r.y2;
      }
      row.max_h1 = cls.h1_0;
      row.t_end = 0.0;
      row.outcome = "NotRun";
      if (spec.confirm) {
        const State s0 = to_v(data.u0, data.u1, params);
        if (cls.verdict == Verdict::indeterminate) {
          double peak = 0.0;
          const RunOutcome o = evolve(s0, spec.run.stepper, [&](const State& s) {
            peak = std::max(peak, norm(real_field(s.v), Norm::h1()));
          });
          row.outcome = to_string(o.status);
          row.max_h1 = peak;
          row.t_end = o.final_state.t;
        } else {
          DichotomyConfig dc = spec.run;
          dc.keep_records = false;
          const DichotomyReport rep = confirm_dichotomy(s0, cls, gs, dc);
          row.outcome = to_string(rep.outcome);
          row.max_h1 = std::sqrt(rep.max_h1_sq);
          row.t_end = rep.t_final;
        }
      }
    } catch (const std::exception& e) {
      row.outcome = "Error: " + sanitize_cell(e.what());
    }
    row.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  const std::size_t workers = std::clamp<std::size_t>(jobs < 1 ? 1 : static_cast<std::size_t>(jobs), 1, cells.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
    });
  for (auto& t : pool) t.join();
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool timing) {
  std::ostringstream os;
  os << kSweepHeader << '\n';
  for (const SweepRow& r : rows) {
    os << format_double(r.alpha) << ',' << r.beta << ',' << format_double(r.amplitude) << ',' << to_string(r.profile)
       << ',' << r.verdict << ',' << format_double(r.energy0) << ',' << format_double(r.h1_0) << ','
       << format_double(r.thr_energy) << ',' << format_double(r.thr_norm) << ',' << format_double(r.y1) << ','
       << format_double(r.y2) << ',' << r.outcome << ',' << format_double(r.max_h1) << ','
       << format_double(r.t_end) << ',' << format_double(timing ? r.wallclock_s : 0.0) << '\n';
  }
  return os.str();
}

}  // namespace gbq

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "ground_state.hpp"
#include "propagator.hpp"

namespace gbq {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// Initial data.

enum class Profile { gaussian, cosine, ground_state };
const char* to_string(Profile p);
Profile parse_profile(const std::string& s);

/// u0 on the grid; u1 is always zero.
///   gaussian      amplitude * exp(-|x|^2 / (2 width^2))
///   cosine        amplitude * sum_i weights[i] cos(modes[i] * 2 pi x_0 / L_0)
///   ground_state  amplitude * phi (phi supplied by the caller)
/// `noise` adds a seeded random perturbation supported on |k| <= noise_band * k_max / 3.
struct InitialData {
  Profile profile = Profile::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  std::vector<int> modes{1};
  std::vector<double> weights{1.0};
  bool mean_subtract = false;
  double noise = 0.0;
  double noise_band = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PreparedData {
  Field u0;
  Field u1;
  double mean_removed = 0.0;
};
PreparedData prepare_initial_data(GridPtr grid, const InitialData& init, const GroundState* gs = nullptr);

// ---------------------------------------------------------------------------
// Global/blowup classification below the ground-state energy.

enum class Verdict { global_subthreshold, blowup_superthreshold, defocusing_global, indeterminate };
/// Output names: GlobalByThm2i, BlowupByThm2ii, DefocusingGlobal, Indeterminate.
const char* to_string(Verdict v);

inline constexpr double kThresholdBand = 1e-8;

/// Total decision table. Within kThresholdBand (relative) of either threshold
/// the focusing verdict is Indeterminate.
Verdict verdict_table(int beta, double energy0, double h1_0, double thr_energy, double thr_norm);

struct Classification {
  Verdict verdict = Verdict::indeterminate;
  int beta = 1;
  double alpha = 3.0;
  double energy0 = 0.0;
  double h1_0 = 0.0;
  double threshold_energy = 0.0;  // (a-1)/(2(a+1)) C*^{-2(a+1)/(a-1)}
  double threshold_norm = 0.0;    // C*^{-(a+1)/(a-1)}
  double energy_margin = 0.0;     // threshold_energy - energy0
  double norm_margin = 0.0;       // threshold_norm - h1_0
};

Classification classify(const Field& u0, const Field& u1, const ModelParams& params, const GroundState& gs);

/// Fixed points of y = c1 + c2 y^s with c1 = 2E(0), c2 = 2 C*^{a+1}/(a+1), s = (a+1)/2.
struct EnergyNormRoots {
  double c1 = 0.0;
  double c2 = 0.0;
  double s = 0.0;
  double y0 = 0.0;         // zero of F'(y) = c2 s y^{s-1} - 1 by bisection
  double y0_closed = 0.0;  // (1/(c2 s))^{1/(s-1)}
  bool roots_exist = false;
  double y1 = kNaN;
  double y2 = kNaN;
  std::string note;
};

EnergyNormRoots energy_norm_roots(double energy0, const GroundState& gs, double alpha);

// ---------------------------------------------------------------------------
// Dichotomy confirmation runs.

struct DichotomyConfig {
  StepperConfig stepper{0.01, 50.0, 10, 50.0, 0.0, true};
  double probe_time = 5.0;      // first phase of a blowup run
  double horizon_factor = 2.0;  // blowup must occur before factor * T0
  double norm_tolerance = 0.01;
  double energy_tolerance = 1e-6;
  bool keep_records = true;
};

enum class DichotomyOutcome { confirmed_global, confirmed_blowup, confirmed_defocusing, contradiction };
/// Confirmed-Global, Confirmed-Blowup, Confirmed-Defocusing, Contradiction.
const char* to_string(DichotomyOutcome o);

struct DichotomyReport {
  DichotomyOutcome outcome = DichotomyOutcome::contradiction;
  Classification classification;
  EnergyNormRoots roots;
  RunStatus status = RunStatus::completed;
  double t_final = 0.0;
  double max_h1_sq = 0.0;
  double min_h1_sq = 0.0;
  bool energy_bound_ok = true;
  double energy_bound_worst = -std::numeric_limits<double>::infinity();  // max of lhs - E(0)
  double blowup_bound = kNaN;   // min over samples of t0 + phi/((a-1)/4 phi')
  double run_horizon = kNaN;
  std::vector<DiagnosticsRecord> records;
  std::string message;
};

DichotomyReport confirm_dichotomy(const State& s0, const Classification& c, const GroundState& gs,
                                  const DichotomyConfig& cfg);

/// t0 + phi(t0) / ((alpha-1)/4 phi'(t0)) minimized over records with phi' > 0; NaN if none.
double blowup_time_bound(const std::vector<DiagnosticsRecord>& records, double alpha);

// ---------------------------------------------------------------------------
// Instrumented runs, scattering and Morawetz.

struct TracedRunConfig {
  StepperConfig stepper;
  std::vector<double> checkpoints;  // times at which v is kept (run is segmented there)
  std::vector<double> morawetz_R;
  MorawetzProfile profile = MorawetzProfile::d3;
  bool strichartz = false;
  double strichartz_s = 0.0;
};

struct TracedRun {
  RunOutcome outcome;
  std::vector<DiagnosticsRecord> records;
  std::vector<std::vector<double>> morawetz;  // [radius][sample]
  std::vector<MorawetzWeight> weights;
  ProfileTrace profiles;
  StrichartzTrace strichartz;
};

TracedRun traced_run(const State& s0, const TracedRunConfig& cfg);

struct ScatteringConfig {
  StepperConfig stepper{0.01, 0.0, 10, 50.0, 0.0, true};
  std::vector<double> morawetz_R;
  MorawetzProfile profile = MorawetzProfile::d3;
};

struct ScatteringReport {
  double horizon = 0.0;  // requested
  double used_horizon = 0.0;
  double wrap_time = 0.0;
  bool truncated = false;
  std::string warning;
  std::array<double, 3> window_start{}, window_end{}, residuals{};
  bool decreasing = false;
  double strichartz_s = 0.0;
  std::vector<double> strichartz_times, strichartz_values;
  double spacetime_half = 0.0;
  double spacetime_full = 0.0;
  RunStatus status = RunStatus::completed;
  TracedRun run;
};

/// Requires alpha >= 1 + 4/d. Residuals over (T/8, T/4), (T/4, T/2), (T/2, T).
ScatteringReport scattering_probe(const State& s0, double horizon, const ScatteringConfig& cfg);

struct MorawetzAnalysis {
  double R = 0.0;
  double theta = 0.0;
  double c = 0.0;  // (d + 2 a d/(a+1) - 2) / 2
  double energy0 = 0.0;
  double bound_constant = 0.0;  // max |M| / (R E(0))
  double fitted_C = 0.0;
  double fraction_satisfied = 0.0;
  std::vector<double> times, values, derivative, potential;  // interior samples for derivative/potential
};

/// Centered differences of M(t), then fits C on the first `early_fraction` of the
/// interior samples from M' >= c int|u|^{a+1} - C R^{-theta} and reports the
/// fraction of all interior samples where the inequality holds.
MorawetzAnalysis analyze_morawetz(const std::vector<double>& times, const std::vector<double>& values,
                                  const std::vector<double>& potential, double R, double alpha, int dim,
                                  double energy0, double early_fraction = 0.25);

// ---------------------------------------------------------------------------
// Parameter sweeps.

struct SweepSpec {
  int dim = 1;
  int points = 1024;
  double box = 80.0;
  std::vector<double> alphas;
  std::vector<int> betas;
  std::vector<double> amplitudes;
  std::vector<Profile> profiles;
  InitialData init;  // amplitude and profile are overridden per cell
  bool confirm = false;
  DichotomyConfig run;
};

struct SweepRow {
  double alpha = 0.0;
  int beta = 0;
  double amplitude = 0.0;
  Profile profile = Profile::gaussian;
  std::string verdict;
  double energy0 = kNaN, h1_0 = kNaN, thr_energy = kNaN, thr_norm = kNaN, y1 = kNaN, y2 = kNaN;
  std::string outcome;
  double max_h1 = kNaN;
  double t_end = 0.0;
  double wallclock_s = 0.0;
};

inline constexpr const char* kSweepHeader =
    "alpha,beta,amplitude,profile,verdict,energy0,h1_0,thr_energy,thr_norm,y1,y2,outcome,max_h1,t_end,wallclock_s";

/// Cells in row-major order over (alpha, beta, amplitude, profile). Cell failures are
/// recorded in the outcome column. At most `jobs` cells run at once.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs);
/// Header plus one line per row; wallclock is written as 0 when timing is off.
std::string sweep_csv(const std::vector<SweepRow>& rows, bool timing);

}  // namespace gbq

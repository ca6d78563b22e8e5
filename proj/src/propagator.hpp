#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "spectral.hpp"

namespace gbq {

enum class Nonlinearity : std::uint8_t { power = 0, quadratic = 1, none = 2 };

const char* to_string(Nonlinearity n);
Nonlinearity parse_nonlinearity(const std::string& s);

/// alpha > 1, beta in {+1 defocusing, -1 focusing}. Quadratic mode is the
/// "good" Boussinesq equation u_tt - u_xx + u_xxxx + (u^2)_xx = 0 and pins
/// alpha = 2, beta = +1. `none` drops the nonlinear term (linear flow).
struct ModelParams {
  double alpha = 3.0;
  int beta = 1;
  Nonlinearity nonlinearity = Nonlinearity::power;

  void validate() const;
  /// Right-hand side f(u) of u_tt + B^2 u = Delta f(u), pointwise.
  double force(double u) const;
  /// Potential V with V' = f, so that the energy density carries +V(u).
  double potential(double u) const;
};

/// v = u + i B^{-1} u_t at time t; v is kept in the physical representation.
struct State {
  double t = 0.0;
  Field v;
  ModelParams params;

  const Grid& grid() const { return v.grid(); }
};

struct StepperConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  int sample_every = 1;
  double blowup_h1_factor = 50.0;
  // When positive, replaces the initial H1 norm as the base of the blowup test
  // (used when a run is continued from an intermediate state).
  double h1_reference = 0.0;
  bool dealias = true;

  void validate() const;
};

struct Components {
  Field u;
  Field ut;
};

/// Build v0 = u0 + i Binv u1. u1 must have zero mean (relative 1e-10).
State to_v(const Field& u0, const Field& u1, const ModelParams& params);
/// u = Re v, u_t = B Im v.
Components from_v(const State& s);
/// Exact free evolution: cos(tB) u0 + sin(tB) Binv u1 and its time derivative.
Components linear_flow(const Field& u0, const Field& u1, double t);
/// Applies exp(-itB) to v (any representation, returns physical).
Field free_propagate(const Field& v, double t);

/// beta M f(Re v), physical representation.
Field nonlinear_term(const State& s, bool dealias = false);

/// Raised when a stage produces non-finite values; carries the last finite state.
class BlowupSuspected : public Error {
 public:
  BlowupSuspected(State last, const std::string& what)
      : Error(ErrorCode::blowup_suspected, what), last_(std::move(last)) {}
  const State& last_state() const { return last_; }

 private:
  State last_;
};

/// Integrating-factor RK4 on w = exp(itB) v in the spectral representation:
/// the linear phase is advanced exactly, the nonlinear forcing by classical RK4.
class IfRk4Stepper {
 public:
  IfRk4Stepper(GridPtr grid, ModelParams params, double dt, bool dealias);

  /// Advance a spectral v by one step in place. Returns false if any stage
  /// went non-finite (the input is then left untouched).
  bool advance(CVec& vhat);
  double dt() const { return dt_; }

 private:
  void forcing(const CVec& what, const CVec* to_phys, const CVec* from_phys, CVec& out);

  GridPtr grid_;
  ModelParams params_;
  double dt_;
  bool linear_;
  CVec half_fwd_, half_bwd_, full_fwd_, full_bwd_;
  std::vector<double> msym_;
  CVec stage_, acc_, k_, scratch_;
};

State step(const State& s, double dt, bool dealias = true);

enum class RunStatus { completed, blowup_detected };
const char* to_string(RunStatus r);

struct RunOutcome {
  RunStatus status = RunStatus::completed;
  State final_state;
  long steps = 0;
  double h1_initial = 0.0;
  double h1_final = 0.0;
  double wrap_time = std::numeric_limits<double>::infinity();
  std::string reason;
};

using StateSink = std::function<void(const State&)>;

/// Fixed-step driver to t_end. Stops early with blowup_detected when ||u||_H1
/// exceeds blowup_h1_factor times its initial value or a stage is non-finite.
/// The sink sees the initial state, every sample_every-th step and the last state.
RunOutcome evolve(const State& s, const StepperConfig& cfg, const StateSink& sink = {});

/// ||Re v||_{H^1} from a spectral v.
double h1_norm_of_real_part(const Grid& g, const CVec& vhat);

/// Group velocity d/dk of k sqrt(1+k^2).
double group_velocity(double k);
/// Box half-width over the fastest group velocity among modes carrying all but
/// a 1e-10 fraction of the H^1 spectral mass of v.
double wrap_around_time(const Field& v);

// Checkpoint: "GBQ1", u32 dim, u32 points[dim], f64 side[dim], f64 t, f64 alpha,
// i8 beta, u8 nonlinearity, then (Re, Im) f64 pairs of v in row-major order.
// Little-endian throughout.
std::vector<std::uint8_t> encode_checkpoint(const State& s);
State decode_checkpoint(std::span<const std::uint8_t> bytes);
void write_checkpoint(const std::string& path, const State& s);
State read_checkpoint(const std::string& path);

}  // namespace gbq

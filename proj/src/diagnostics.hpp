#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "propagator.hpp"
#include "spectral.hpp"

namespace gbq {

/// One sampled row of a run. Quantities follow the conserved energy
///   E(t) = 1/2 int |(-Delta)^{-1/2} u_t|^2 + u^2 + |grad u|^2 + 2 V(u)
/// and the momentum  int ((-Delta)^{-1/2} u_t) grad((-Delta)^{-1/2} u).
struct DiagnosticsRecord {
  double t = 0.0;
  double energy = 0.0;
  std::vector<double> momentum;
  double static_E = 0.0;
  double static_R = 0.0;
  double h1_sq = 0.0;
  double lp = 0.0;  // ||u||_{L^{alpha+1}}
  double virial = 0.0;
  double virial_rate = 0.0;
  double morawetz = std::numeric_limits<double>::quiet_NaN();
  double hm1_ut = 0.0;  // ||(-Delta)^{-1/2} u_t||^2
};

double energy(const State& s);
std::vector<double> momentum(const State& s);

struct StaticFunctionals {
  double E = 0.0;
  double R = 0.0;
};
/// E(u) = 1/2 ||u||_H1^2 - ||u||^{a+1}_{a+1}/(a+1),  R(u) = ||u||_H1^2 - ||u||^{a+1}_{a+1}.
StaticFunctionals static_functionals(const Field& u, double alpha);

struct Virial {
  double phi = 0.0;
  double rate = 0.0;
};
/// phi = ||(-Delta)^{-1/2} u||^2 and phi' = 2((-Delta)^{-1/2}u, (-Delta)^{-1/2}u_t), nonzero modes only.
Virial virial(const State& s);
/// (alpha-1)||u||_H1^2 - 2(alpha+1) E(0) + (alpha+3)||(-Delta)^{-1/2}u_t||^2; focusing power law only.
double virial_second(const State& s, double energy0);

// ---------------------------------------------------------------------------
// Morawetz weight a_R(x) = R^2 a0(|x|/R).

enum class MorawetzProfile { d3, dge4 };

/// Radial profile: r^2 on [0, 1/2], gamma1 r + gamma2 on [1, inf), joined on
/// [1/2, 1] by prescribing a0'' = 2(1 - S) + c * 30 s^2 (1-s)^2 with S the
/// quintic smoothstep in s = 2r - 1. c is fixed by the requested tail slope.
class RadialProfile {
 public:
  RadialProfile(double tail_slope);
  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;
  double d3(double r) const;
  double d4(double r) const;
  double gamma1() const { return gamma1_; }
  double gamma2() const { return gamma2_; }
  /// (d_r^2 + (d-1)/r d_r)^2 a0 at r > 0.
  double bilaplacian(double r, int dim) const;

 private:
  // Polynomials in s on the blend, coefficient i multiplies s^i.
  std::vector<double> p0_, p1_, p2_;
  double gamma1_, gamma2_;
  double blend(const std::vector<double>& p, double r, int deriv_of) const;
};

struct MorawetzWeight {
  double R = 1.0;
  int dim = 1;
  MorawetzProfile profile = MorawetzProfile::d3;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  // Radial table of a0, a0', a0'' on [0, 4] (10^4 samples).
  std::vector<double> table_r, table_a, table_da, table_dda;
  bool bilaplacian_nonpositive = false;
  double max_bilaplacian = 0.0;
  // Sampled on the grid.
  GridPtr grid;
  std::vector<double> a;
  std::array<std::vector<double>, 3> grad;
  std::vector<double> lap;
};

MorawetzWeight morawetz_weight(GridPtr grid, double R, MorawetzProfile profile);

/// M_a(t) = -int P (grad a . grad W + 1/2 Delta a W), P = (-Delta)^{-1/2} u_t, W = (-Delta)^{-1/2} u.
double morawetz_quantity(const State& s, const MorawetzWeight& w);

/// Computes full rows; Morawetz column only when a weight is supplied.
DiagnosticsRecord compute_record(const State& s, const MorawetzWeight* weight = nullptr);

std::string csv_header(int dim);
std::string csv_row(const DiagnosticsRecord& r);
std::string format_double(double x);

// ---------------------------------------------------------------------------

/// min{1, (d-1)(alpha-1)/2, (d+2)(d-1)/(d(d+4))}, d >= 3.
double theta_exponent(double alpha, int d);

/// Trapezoid in time of ||u||_{L^{alpha+1}}^{alpha+1} over [t1, t2].
double spacetime_integral(const std::vector<DiagnosticsRecord>& records, double t1, double t2, double alpha);

struct Rational {
  long num = 0;
  long den = 1;
};
Rational make_rational(long num, long den);

/// Exponent pair stored through reciprocals 1/p, 1/q (1/p = 0 is p = infinity).
struct ExponentPair {
  Rational inv_p;
  Rational inv_q;
  double p() const;
  double q() const;
  /// 2/p - d(1/2 - 1/q) computed exactly; zero for admissible pairs.
  Rational scaling_defect(int d) const;
};

std::vector<ExponentPair> admissible_pairs(int d);

/// Per-sample spatial norms ||<grad>^s v(t)||_{L^q} for each pair.
struct StrichartzTrace {
  double s = 0.0;
  std::vector<ExponentPair> pairs;
  std::vector<double> times;
  std::vector<std::vector<double>> xnorms;  // [sample][pair]

  void add(const Field& v, double t);
};

/// max over pairs of the L^p_t(t1, t2) norm of the sampled spatial norms.
double strichartz_norm(const StrichartzTrace& trace, double t1, double t2);
double strichartz_norm(const StrichartzTrace& trace);
double strichartz_norm(const std::vector<State>& states, double s, const std::vector<ExponentPair>& pairs);

/// v states kept at selected times.
using ProfileTrace = std::map<double, Field>;
/// || exp(i t1 B) v(t1) - exp(i t2 B) v(t2) ||_{H^1}
double scattering_residual(const ProfileTrace& trace, double t1, double t2);

/// sup |x|^{(d-1)/2} |u| / (||u||_2^{1/2} ||grad u||_2^{1/2}), d >= 2, u radial about the center.
struct RadialSobolev {
  double lhs = 0.0;
  double ratio = 0.0;
};
RadialSobolev radial_sobolev_check(const Field& u);

/// Frequency-localized packet  u0^(k) = psi(log2(|k|/N)/width), psi a smooth bump on (-1, 1),
/// normalized so that u0(x) approximates int psi e^{ikx} dk.
struct PacketSpec {
  double shell = 1.0;
  double width = 1.0;
};
Field make_packet(GridPtr grid, const PacketSpec& packet);

struct DecayFit {
  double slope = 0.0;
  double prefactor = 0.0;
  double wrap_time = 0.0;
  std::vector<double> times;
  std::vector<double> linf;
};
/// Half the smallest box side over the group velocity at the top of the packet's support.
double packet_wrap_time(const Grid& g, const PacketSpec& packet);
/// Evolves the packet exactly and fits log ||u(t)||_inf against log t.
DecayFit decay_rate_fit(GridPtr grid, const PacketSpec& packet, const std::vector<double>& times);

/// ||[(-Delta)^{1/2}, phi] f||_2 / (||grad phi||_inf ||f||_2) for `samples` random real pairs
/// built from modes 1 <= |n| <= max_mode of a one-dimensional grid. The random coefficients
/// depend on the seed only, so two grids see the same functions.
std::vector<double> commutator_ratios(GridPtr grid, int samples, std::uint64_t seed, int max_mode);

}  // namespace gbq

#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace gbq {

namespace {

// Spectra of Re v and Im v from the spectrum of v:
//   (Re v)^_k = (v_k + conj v_{-k}) / 2,   (Im v)^_k = (v_k - conj v_{-k}) / 2i.
struct Parts {
  CVec u;
  CVec im;
};

Parts split_parts(const Field& vhat) {
  const Grid& g = vhat.grid();
  Parts p;
  p.u.resize(g.size());
  p.im.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx a = vhat[i];
    const cplx b = std::conj(vhat[g.reflect(i)]);
    p.u[i] = 0.5 * (a + b);
    const cplx d = 0.5 * (a - b);
    p.im[i] = cplx(d.imag(), -d.real());
  }
  return p;
}

double powabs(double x, double p) {
  const double a = std::abs(x);
  if (p == 4.0) {
    const double a2 = a * a;
    return a2 * a2;
  }
  if (p == 6.0) {
    const double a2 = a * a;
    return a2 * a2 * a2;
  }
  if (p == 3.0) return a * a * a;
  return std::pow(a, p);
}

double lebesgue_power(std::span<const double> u, double p, double cell) {
  double acc = 0.0;
  for (double x : u) acc += powabs(x, p);
  return acc * cell;
}

}  // namespace

DiagnosticsRecord compute_record(const State& s, const MorawetzWeight* weight) {
  const Grid& g = s.grid();
  const double cell = g.cell_volume();
  const auto& kabs = g.k_abs();
  const Field vp = to_physical(s.v);
  const Field vhat = to_spectral(vp);
  const Parts parts = split_parts(vhat);

  DiagnosticsRecord r;
  r.t = s.t;
  double h1 = 0.0, hm = 0.0, vir = 0.0, rate = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double k2 = kabs[i] * kabs[i];
    h1 += (1.0 + k2) * std::norm(parts.u[i]);
    if (kabs[i] == 0.0) continue;
    hm += (1.0 + k2) * std::norm(parts.im[i]);
    vir += std::norm(parts.u[i]) / k2;
    rate += (std::conj(parts.u[i]) * parts.im[i]).real() * std::sqrt(1.0 + k2) / kabs[i];
  }
  r.h1_sq = h1 * cell;
  r.hm1_ut = hm * cell;
  r.virial = vir * cell;
  r.virial_rate = 2.0 * rate * cell;

  r.momentum.assign(g.dim(), 0.0);
  for (int j = 0; j < g.dim(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (kabs[i] == 0.0 || g.is_nyquist(i, j)) continue;
      const auto ijk = g.unflatten(i);
      const double kj = g.wavenumber(j, ijk[j]);
      const cplx p_hat = std::sqrt(1.0 + kabs[i] * kabs[i]) * parts.im[i];
      const cplx dw_hat = cplx(0.0, kj / kabs[i]) * parts.u[i];
      acc += (std::conj(p_hat) * dw_hat).real();
    }
    r.momentum[j] = acc * cell;
  }

  const std::vector<double> u = vp.real_part();
  const double alpha = s.params.alpha;
  const double lp_pow = lebesgue_power(u, alpha + 1.0, cell);
  r.lp = std::pow(lp_pow, 1.0 / (alpha + 1.0));
  r.static_E = 0.5 * r.h1_sq - lp_pow / (alpha + 1.0);
  r.static_R = r.h1_sq - lp_pow;

  double pot = 0.0;
  if (s.params.nonlinearity == Nonlinearity::power) {
    pot = s.params.beta * lp_pow / (alpha + 1.0);
  } else {
    for (double x : u) pot += s.params.potential(x);
    pot *= cell;
  }
  r.energy = 0.5 * (r.hm1_ut + r.h1_sq) + pot;

  if (weight) r.morawetz = morawetz_quantity(s, *weight);
  return r;
}

double energy(const State& s) { return compute_record(s).energy; }

std::vector<double> momentum(const State& s) { return compute_record(s).momentum; }

StaticFunctionals static_functionals(const Field& u, double alpha) {
  require(alpha > 1.0, "alpha must be > 1");
  const Grid& g = u.grid();
  const double h1 = std::pow(norm(u, Norm::h1()), 2);
  const std::vector<double> re = to_physical(u).real_part();
  const double lp_pow = lebesgue_power(re, alpha + 1.0, g.cell_volume());
  return {0.5 * h1 - lp_pow / (alpha + 1.0), h1 - lp_pow};
}

Virial virial(const State& s) {
  const DiagnosticsRecord r = compute_record(s);
  return {r.virial, r.virial_rate};
}

double virial_second(const State& s, double energy0) {
  if (s.params.beta != -1 || s.params.nonlinearity != Nonlinearity::power)
    fail(ErrorCode::invalid_argument, "second virial identity holds for the focusing power law only");
  const DiagnosticsRecord r = compute_record(s);
  const double a = s.params.alpha;
  return (a - 1.0) * r.h1_sq - 2.0 * (a + 1.0) * energy0 + (a + 3.0) * r.hm1_ut;
}

// ---------------------------------------------------------------------------

namespace {

using Poly = std::vector<double>;

double peval(const Poly& p, double s) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
  return acc;
}

Poly pint(const Poly& p, double c0) {
  Poly out(p.size() + 1);
  out[0] = c0;
  for (std::size_t i = 0; i < p.size(); ++i) out[i + 1] = p[i] / static_cast<double>(i + 1);
  return out;
}

Poly pder(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly out(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) out[i - 1] = p[i] * static_cast<double>(i);
  return out;
}

Poly pscale(Poly p, double f) {
  for (double& c : p) c *= f;
  return p;
}

}  // namespace

RadialProfile::RadialProfile(double tail_slope) {
  // a0'' on the blend, in s = 2r - 1. The bump term adds c/2 to the tail slope 3/2.
  const double c = 2.0 * (tail_slope - 1.5);
  require(c >= 0.0, "tail slope must be at least 3/2");
  p2_ = {2.0, 0.0, 30.0 * c, -(20.0 + 60.0 * c), 30.0 + 30.0 * c, -12.0};
  // dr = ds/2, so each integration in r halves the s-integral.
  p1_ = pint(pscale(p2_, 0.5), 1.0);
  p0_ = pint(pscale(p1_, 0.5), 0.25);
  gamma1_ = peval(p1_, 1.0);
  gamma2_ = peval(p0_, 1.0) - gamma1_;
}

double RadialProfile::blend(const Poly& p, double r, int extra) const {
  Poly q = p;
  double f = 1.0;
  for (int i = 0; i < extra; ++i) {
    q = pder(q);
    f *= 2.0;
  }
  return f * peval(q, 2.0 * r - 1.0);
}

double RadialProfile::value(double r) const {
  if (r <= 0.5) return r * r;
  if (r >= 1.0) return gamma1_ * r + gamma2_;
  return blend(p0_, r, 0);
}

double RadialProfile::d1(double r) const {
  if (r <= 0.5) return 2.0 * r;
  if (r >= 1.0) return gamma1_;
  return blend(p1_, r, 0);
}

double RadialProfile::d2(double r) const {
  if (r <= 0.5) return 2.0;
  if (r >= 1.0) return 0.0;
  return blend(p2_, r, 0);
}

double RadialProfile::d3(double r) const {
  if (r <= 0.5 || r >= 1.0) return 0.0;
  return blend(p2_, r, 1);
}

double RadialProfile::d4(double r) const {
  if (r <= 0.5 || r >= 1.0) return 0.0;
  return blend(p2_, r, 2);
}

double RadialProfile::bilaplacian(double r, int dim) const {
  require(r > 0.0, "bilaplacian sampled at r > 0 only");
  const double m = dim - 1.0;
  const double f1 = d1(r), f2 = d2(r), f3 = d3(r), f4 = d4(r);
  const double g1 = f3 + m * (f2 / r - f1 / (r * r));
  const double g2 = f4 + m * (f3 / r - 2.0 * f2 / (r * r) + 2.0 * f1 / (r * r * r));
  return g2 + m * g1 / r;
}

MorawetzWeight morawetz_weight(GridPtr grid, double R, MorawetzProfile profile) {
  require(std::isfinite(R) && R >= 1.0, "Morawetz scale R must be >= 1");
  const RadialProfile prof(profile == MorawetzProfile::d3 ? 2.0 : 1.5);
  const Grid& g = *grid;
  MorawetzWeight w;
  w.R = R;
  w.dim = g.dim();
  w.profile = profile;
  w.gamma1 = prof.gamma1();
  w.gamma2 = prof.gamma2();

  constexpr int samples = 10000;
  constexpr double rmax = 4.0;
  w.table_r.resize(samples);
  w.table_a.resize(samples);
  w.table_da.resize(samples);
  w.table_dda.resize(samples);
  w.max_bilaplacian = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double r = rmax * i / (samples - 1);
    w.table_r[i] = r;
    w.table_a[i] = prof.value(r);
    w.table_da[i] = prof.d1(r);
    w.table_dda[i] = prof.d2(r);
    if (w.table_da[i] < -1e-10 || w.table_dda[i] < -1e-10) {
      std::ostringstream os;
      os << "Morawetz profile loses monotonicity or convexity at r = " << r;
      fail(ErrorCode::ill_defined, os.str());
    }
    if (r > 0.0) w.max_bilaplacian = std::max(w.max_bilaplacian, prof.bilaplacian(r, g.dim()));
  }
  w.bilaplacian_nonpositive = w.max_bilaplacian <= 1e-10;

  w.grid = grid;
  w.a.resize(g.size());
  w.lap.resize(g.size());
  for (int j = 0; j < g.dim(); ++j) w.grad[j].assign(g.size(), 0.0);
  std::array<double, 3> x{};
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto ijk = g.unflatten(idx);
    double r2 = 0.0;
    for (int j = 0; j < g.dim(); ++j) {
      x[j] = g.coordinate(j, ijk[j]);
      r2 += x[j] * x[j];
    }
    const double r = std::sqrt(r2);
    const double rho = r / R;
    w.a[idx] = R * R * prof.value(rho);
    if (r > 0.0) {
      const double da = prof.d1(rho);
      for (int j = 0; j < g.dim(); ++j) w.grad[j][idx] = R * da * x[j] / r;
      w.lap[idx] = prof.d2(rho) + (g.dim() - 1.0) * da / rho;
    } else {
      w.lap[idx] = 2.0 * g.dim();
    }
  }
  return w;
}

double morawetz_quantity(const State& s, const MorawetzWeight& w) {
  const Grid& g = s.grid();
  require_same_grid(g, *w.grid);
  const auto& kabs = g.k_abs();
  const Field vhat = to_spectral(s.v);
  const Parts parts = split_parts(vhat);

  auto to_real = [&](CVec spec) {
    g.backward(spec.data());
    std::vector<double> out(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) out[i] = spec[i].real();
    return out;
  };

  CVec p_hat(g.size()), w_hat(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (kabs[i] == 0.0) continue;
    p_hat[i] = std::sqrt(1.0 + kabs[i] * kabs[i]) * parts.im[i];
    w_hat[i] = parts.u[i] / kabs[i];
  }
  const std::vector<double> P = to_real(p_hat);
  const std::vector<double> W = to_real(w_hat);
  std::vector<double> inner_term(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) inner_term[i] = 0.5 * w.lap[i] * W[i];
  for (int j = 0; j < g.dim(); ++j) {
    CVec d_hat(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.is_nyquist(i, j)) continue;
      const auto ijk = g.unflatten(i);
      d_hat[i] = cplx(0.0, g.wavenumber(j, ijk[j])) * w_hat[i];
    }
    const std::vector<double> dW = to_real(std::move(d_hat));
    for (std::size_t i = 0; i < g.size(); ++i) inner_term[i] += w.grad[j][i] * dW[i];
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += P[i] * inner_term[i];
  return -acc * g.cell_volume();
}

// ---------------------------------------------------------------------------

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_header(int dim) {
  static const char* axes[] = {"momentum_x", "momentum_y", "momentum_z"};
  std::string h = "t,energy";
  for (int j = 0; j < dim; ++j) {
    h += ',';
    h += axes[j];
  }
  h += ",E_u,R_u,h1_sq,lp,virial,virial_rate,morawetz,hm1_ut";
  return h;
}

std::string csv_row(const DiagnosticsRecord& r) {
  std::string row = format_double(r.t) + ',' + format_double(r.energy);
  for (double m : r.momentum) row += ',' + format_double(m);
  for (double x : {r.static_E, r.static_R, r.h1_sq, r.lp, r.virial, r.virial_rate, r.morawetz, r.hm1_ut})
    row += ',' + format_double(x);
  return row;
}

// ---------------------------------------------------------------------------

double theta_exponent(double alpha, int d) {
  require(d >= 3, "theta exponent is defined for d >= 3");
  require(alpha > 1.0, "alpha must be > 1");
  const double a = (d - 1.0) * (alpha - 1.0) / 2.0;
  const double b = (d + 2.0) * (d - 1.0) / (d * (d + 4.0));
  return std::min({1.0, a, b});
}

double spacetime_integral(const std::vector<DiagnosticsRecord>& rec, double t1, double t2, double alpha) {
  require(!rec.empty(), "empty trace");
  require(t1 <= t2, "interval must satisfy t1 <= t2");
  const double eps = 1e-9 * std::max(1.0, std::abs(rec.back().t));
  if (t1 < rec.front().t - eps || t2 > rec.back().t + eps)
    fail(ErrorCode::out_of_range, "interval lies outside the recorded trace");
  auto density = [&](const DiagnosticsRecord& r) { return std::pow(r.lp, alpha + 1.0); };
  auto at = [&](double t) {
    auto it = std::lower_bound(rec.begin(), rec.end(), t, [](const DiagnosticsRecord& r, double x) { return r.t < x; });
    if (it == rec.begin()) return density(*it);
    if (it == rec.end()) return density(rec.back());
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double th = (t - a.t) / (b.t - a.t);
    return (1.0 - th) * density(a) + th * density(b);
  };
  double acc = 0.0;
  double tp = t1, fp = at(t1);
  for (const auto& r : rec) {
    if (r.t <= t1 || r.t >= t2) continue;
    const double f = density(r);
    acc += 0.5 * (fp + f) * (r.t - tp);
    tp = r.t;
    fp = f;
  }
  acc += 0.5 * (fp + at(t2)) * (t2 - tp);
  return acc;
}

Rational make_rational(long num, long den) {
  require(den != 0, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long g = std::gcd(num, den);
  return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

double ExponentPair::p() const {
  return inv_p.num == 0 ? std::numeric_limits<double>::infinity() : static_cast<double>(inv_p.den) / inv_p.num;
}

double ExponentPair::q() const {
  return inv_q.num == 0 ? std::numeric_limits<double>::infinity() : static_cast<double>(inv_q.den) / inv_q.num;
}

Rational ExponentPair::scaling_defect(int d) const {
  // 2 inv_p - d (1/2 - inv_q) over the common denominator 2 * den_p * den_q.
  const long den = 2 * inv_p.den * inv_q.den;
  const long num = 4 * inv_p.num * inv_q.den - d * (inv_p.den * inv_q.den - 2 * inv_p.den * inv_q.num);
  return make_rational(num, den);
}

std::vector<ExponentPair> admissible_pairs(int d) {
  require(d >= 1, "dimension must be positive");
  std::vector<ExponentPair> out;
  out.push_back({make_rational(0, 1), make_rational(1, 2)});
  const Rational sym = make_rational(d, 2 * (d + 2));
  out.push_back({sym, sym});
  if (d >= 3) out.push_back({make_rational(1, 2), make_rational(d - 2, 2 * d)});
  return out;
}

void StrichartzTrace::add(const Field& v, double t) {
  require(!pairs.empty(), "Strichartz trace needs at least one exponent pair");
  const Grid& g = v.grid();
  Field w = s == 0.0 ? to_physical(v) : to_physical(apply_multiplier(v, Multiplier::bessel(s)));
  std::vector<double> mod(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) mod[i] = std::abs(w[i]);
  std::vector<double> row;
  row.reserve(pairs.size());
  for (const auto& pr : pairs) {
    const double q = pr.q();
    if (std::isinf(q)) {
      row.push_back(*std::max_element(mod.begin(), mod.end()));
      continue;
    }
    double acc = 0.0;
    if (q == 2.0)
      for (double m : mod) acc += m * m;
    else
      for (double m : mod) acc += std::pow(m, q);
    row.push_back(std::pow(acc * g.cell_volume(), 1.0 / q));
  }
  times.push_back(t);
  xnorms.push_back(std::move(row));
}

double strichartz_norm(const StrichartzTrace& tr, double t1, double t2) {
  if (tr.times.empty()) fail(ErrorCode::invalid_argument, "empty Strichartz trace");
  const double eps = 1e-9 * std::max(1.0, std::abs(t2));
  double best = 0.0;
  for (std::size_t k = 0; k < tr.pairs.size(); ++k) {
    const double p = tr.pairs[k].p();
    double acc = 0.0;
    bool have_prev = false;
    double tp = 0.0, fp = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const double t = tr.times[i];
      if (t < t1 - eps || t > t2 + eps) continue;
      const double x = tr.xnorms[i][k];
      if (std::isinf(p)) {
        acc = std::max(acc, x);
        continue;
      }
      const double f = std::pow(x, p);
      if (have_prev) acc += 0.5 * (fp + f) * (t - tp);
      tp = t;
      fp = f;
      have_prev = true;
    }
    best = std::max(best, std::isinf(p) ? acc : std::pow(acc, 1.0 / p));
  }
  return best;
}

double strichartz_norm(const StrichartzTrace& tr) {
  if (tr.times.empty()) fail(ErrorCode::invalid_argument, "empty Strichartz trace");
  return strichartz_norm(tr, tr.times.front(), tr.times.back());
}

double strichartz_norm(const std::vector<State>& states, double s, const std::vector<ExponentPair>& pairs) {
  if (states.empty()) fail(ErrorCode::invalid_argument, "empty trace");
  StrichartzTrace tr;
  tr.s = s;
  tr.pairs = pairs;
  for (const auto& st : states) tr.add(st.v, st.t);
  return strichartz_norm(tr);
}

namespace {

const Field& lookup(const ProfileTrace& trace, double t) {
  for (const auto& [time, field] : trace)
    if (std::abs(time - t) <= 1e-9 * std::max(1.0, std::abs(t))) return field;
  std::ostringstream os;
  os << "time " << t << " is not in the trace";
  fail(ErrorCode::out_of_range, os.str());
}

}  // namespace

double scattering_residual(const ProfileTrace& trace, double t1, double t2) {
  const Field& a = lookup(trace, t1);
  const Field& b = lookup(trace, t2);
  require_same_grid(a.grid(), b.grid());
  if (t1 == t2) return 0.0;
  const Field pa = apply_multiplier(to_spectral(a), Multiplier::phase(-t1));
  const Field pb = apply_multiplier(to_spectral(b), Multiplier::phase(-t2));
  return norm(pa - pb, Norm::h1());
}

RadialSobolev radial_sobolev_check(const Field& u) {
  const Grid& g = u.grid();
  require(g.dim() >= 2, "radial Sobolev check needs d >= 2");
  const std::vector<double> re = to_physical(u).real_part();
  double umax = 0.0;
  for (double x : re) umax = std::max(umax, std::abs(x));
  double dev = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) dev = std::max(dev, std::abs(re[i] - re[g.reflect(i)]));
  bool cubic = true;
  for (int a = 1; a < g.dim(); ++a)
    cubic = cubic && g.points(a) == g.points(0) && g.side(a) == g.side(0);
  if (cubic) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto ijk = g.unflatten(i);
      for (int a = 1; a < g.dim(); ++a) {
        auto swapped = ijk;
        std::swap(swapped[0], swapped[a]);
        dev = std::max(dev, std::abs(re[i] - re[g.flatten(swapped)]));
      }
    }
  }
  if (dev > 1e-6 * umax) fail(ErrorCode::invalid_argument, "field is not radial about the box center");

  const double expo = 0.5 * (g.dim() - 1.0);
  double lhs = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto ijk = g.unflatten(i);
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) r2 += std::pow(g.coordinate(a, ijk[a]), 2);
    lhs = std::max(lhs, std::pow(r2, 0.5 * expo) * std::abs(re[i]));
  }
  const Field real = Field::from_real(u.grid_ptr(), re);
  const double denom = std::sqrt(norm(real, Norm::l2()) * norm(real, Norm::hdot(1.0)));
  return {lhs, denom > 0.0 ? lhs / denom : 0.0};
}

Field make_packet(GridPtr grid, const PacketSpec& packet) {
  require(packet.shell > 0.0 && packet.width > 0.0, "packet shell and width must be positive");
  const Grid& g = *grid;
  const double kmax_support = packet.shell * std::exp2(packet.width);
  for (int a = 0; a < g.dim(); ++a)
    require(kmax_support < std::numbers::pi * g.points(a) / g.side(a), "packet support exceeds the grid's Nyquist wavenumber");
  double dk_vol = 1.0;
  for (int a = 0; a < g.dim(); ++a) dk_vol *= 2.0 * std::numbers::pi / g.side(a);
  const double scale = dk_vol * std::sqrt(static_cast<double>(g.size()));
  Field f(grid, Representation::spectral);
  const auto& kabs = g.k_abs();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (kabs[i] == 0.0) continue;
    const double y = std::log2(kabs[i] / packet.shell) / packet.width;
    if (std::abs(y) >= 1.0) continue;
    const double bump = std::exp(1.0 - 1.0 / (1.0 - y * y));
    const auto ijk = g.unflatten(i);
    int parity = 0;
    for (int a = 0; a < g.dim(); ++a) parity += g.mode_number(a, ijk[a]);
    f[i] = (parity % 2 == 0 ? 1.0 : -1.0) * bump * scale;
  }
  return real_field(to_physical(f));
}

double packet_wrap_time(const Grid& g, const PacketSpec& packet) {
  double radius = 0.5 * g.side(0);
  for (int a = 1; a < g.dim(); ++a) radius = std::min(radius, 0.5 * g.side(a));
  return radius / group_velocity(packet.shell * std::exp2(packet.width));
}

DecayFit decay_rate_fit(GridPtr grid, const PacketSpec& packet, const std::vector<double>& times) {
  require(times.size() >= 2, "decay fit needs at least two times");
  const Grid& g = *grid;
  DecayFit fit;
  fit.wrap_time = packet_wrap_time(g, packet);
  for (double t : times) {
    require(t > 0.0, "decay times must be positive");
    if (t >= fit.wrap_time) {
      std::ostringstream os;
      os << "time " << t << " exceeds the wrap-around time " << fit.wrap_time;
      fail(ErrorCode::out_of_range, os.str());
    }
  }
  const Field u0hat = to_spectral(make_packet(grid, packet));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double t : times) {
    Field ut = u0hat;
    const CVec table = symbol_table(g, Multiplier::cos_flow(t));
    multiply_in_place(ut.values(), table);
    const double linf = to_physical(ut).max_abs();
    fit.times.push_back(t);
    fit.linf.push_back(linf);
    const double x = std::log(t), y = std::log(linf);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(times.size());
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.prefactor = std::exp((sy - fit.slope * sx) / n);
  return fit;
}

std::vector<double> commutator_ratios(GridPtr grid, int samples, std::uint64_t seed, int max_mode) {
  require(grid->dim() == 1, "commutator study is one-dimensional");
  require(samples >= 1, "need at least one sample");
  require(max_mode >= 1 && 4 * max_mode < grid->points(0), "products of the modes must be resolved: 4 max_mode < N");
  const double k0 = 2.0 * std::numbers::pi / grid->side(0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;

  // Sum of Re(c_n e^{i n k0 x}); phi gets decaying coefficients, f flat ones.
  auto draw = [&](double decay) {
    std::vector<cplx> c(max_mode + 1);
    for (int n = 1; n <= max_mode; ++n) {
      const double a = normal(rng), b = normal(rng);
      c[n] = cplx(a, b) / std::pow(double(n), decay);
    }
    return c;
  };
  auto sample = [&](const std::vector<cplx>& c) {
    return Field::from_function(grid, [&](std::span<const double> x) {
      double v = 0.0;
      for (int n = 1; n <= max_mode; ++n) v += std::real(c[n] * std::polar(1.0, n * k0 * x[0]));
      return cplx(v, 0.0);
    });
  };

  std::vector<double> out;
  out.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const Field phi = sample(draw(1.0));
    const Field f = sample(draw(0.0));
    const double grad = apply_multiplier(phi, Multiplier::derivative(0)).max_abs();
    const double num = norm(riesz_commutator(phi, f), Norm::l2());
    out.push_back(num / (grad * norm(f, Norm::l2())));
  }
  return out;
}

}  // namespace gbq


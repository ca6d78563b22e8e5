#include "propagator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>

namespace gbq {

const char* to_string(Nonlinearity n) {
  switch (n) {
    case Nonlinearity::power:
      return "power";
    case Nonlinearity::quadratic:
      return "quadratic";
    case Nonlinearity::none:
      return "none";
  }
  return "?";
}

Nonlinearity parse_nonlinearity(const std::string& s) {
  if (s == "power") return Nonlinearity::power;
  if (s == "quadratic") return Nonlinearity::quadratic;
  if (s == "none" || s == "linear") return Nonlinearity::none;
  fail(ErrorCode::parse, "unknown nonlinearity '" + s + "' (expected power, quadratic or none)");
}

void ModelParams::validate() const {
  require(std::isfinite(alpha) && alpha > 1.0, "alpha must be > 1");
  require(beta == 1 || beta == -1, "beta must be +1 or -1");
  if (nonlinearity == Nonlinearity::quadratic) {
    require(alpha == 2.0, "quadratic nonlinearity requires alpha = 2");
    require(beta == 1, "quadratic nonlinearity carries its own sign; beta must be +1");
  }
}

// The good Boussinesq term +Delta(u^2) on the left moves to the right as
// Delta(-u^2), so f(u) = -u^2 with beta = +1 absorbed.
double ModelParams::force(double u) const {
  switch (nonlinearity) {
    case Nonlinearity::power: {
      double p;
      if (alpha == 3.0)
        p = u * u * u;
      else if (alpha == 5.0) {
        const double u2 = u * u;
        p = u2 * u2 * u;
      } else if (alpha == 2.0)
        p = std::abs(u) * u;
      else
        p = std::pow(std::abs(u), alpha - 1.0) * u;
      return beta * p;
    }
    case Nonlinearity::quadratic:
      return -u * u;
    case Nonlinearity::none:
      return 0.0;
  }
  return 0.0;
}

double ModelParams::potential(double u) const {
  switch (nonlinearity) {
    case Nonlinearity::power:
      return beta * std::pow(std::abs(u), alpha + 1.0) / (alpha + 1.0);
    case Nonlinearity::quadratic:
      return -u * u * u / 3.0;
    case Nonlinearity::none:
      return 0.0;
  }
  return 0.0;
}

void StepperConfig::validate() const {
  require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  require(std::isfinite(t_end) && t_end >= 0.0, "t_end must be nonnegative");
  require(sample_every >= 1, "sample_every must be >= 1");
  require(blowup_h1_factor > 1.0, "blowup_h1_factor must exceed 1");
}

// ---------------------------------------------------------------------------

State to_v(const Field& u0, const Field& u1, const ModelParams& params) {
  params.validate();
  require_same_grid(u0.grid(), u1.grid());
  if (relative_mean(u1) > 1e-10)
    fail(ErrorCode::ill_defined, "initial velocity has nonzero mean; B^{-1} u1 is undefined");
  const Field u0p = real_field(to_physical(u0));
  const Field w = real_field(apply_multiplier(real_field(to_physical(u1)), Multiplier::b_inv()));
  State s{0.0, Field(u0.grid_ptr()), params};
  for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] = cplx(u0p[i].real(), w[i].real());
  return s;
}

Components from_v(const State& s) {
  const Field vp = to_physical(s.v);
  Field u(vp.grid_ptr()), im(vp.grid_ptr());
  for (std::size_t i = 0; i < vp.size(); ++i) {
    u[i] = vp[i].real();
    im[i] = vp[i].imag();
  }
  return {std::move(u), real_field(apply_multiplier(im, Multiplier::b()))};
}

Field free_propagate(const Field& v, double t) {
  return to_physical(apply_multiplier(v, Multiplier::phase(t)));
}

Components linear_flow(const Field& u0, const Field& u1, double t) {
  const ModelParams linear{3.0, 1, Nonlinearity::none};
  State s = to_v(u0, u1, linear);
  s.v = free_propagate(s.v, t);
  s.t = t;
  return from_v(s);
}

Field nonlinear_term(const State& s, bool dealias) {
  const Field vp = to_physical(s.v);
  Field f(vp.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = s.params.force(vp[i].real());
  f = to_spectral(f);
  const auto& msym = s.grid().symbol_M();
  if (dealias) {
    const auto mask = dealias_mask(s.grid());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= mask[i] ? msym[i] : 0.0;
  } else {
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= msym[i];
  }
  return to_physical(f);
}

// ---------------------------------------------------------------------------

IfRk4Stepper::IfRk4Stepper(GridPtr grid, ModelParams params, double dt, bool dealias)
    : grid_(std::move(grid)), params_(params), dt_(dt), linear_(params.nonlinearity == Nonlinearity::none) {
  params_.validate();
  require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  const std::size_t n = grid_->size();
  const auto& b = grid_->symbol_B();
  half_fwd_.resize(n);
  half_bwd_.resize(n);
  full_fwd_.resize(n);
  full_bwd_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    half_fwd_[i] = std::polar(1.0, -0.5 * dt * b[i]);
    half_bwd_[i] = std::conj(half_fwd_[i]);
    full_fwd_[i] = std::polar(1.0, -dt * b[i]);
    full_bwd_[i] = std::conj(full_fwd_[i]);
  }
  msym_ = grid_->symbol_M();
  if (dealias) {
    const auto mask = dealias_mask(*grid_);
    for (std::size_t i = 0; i < n; ++i)
      if (!mask[i]) msym_[i] = 0.0;
  }
  if (!linear_) {
    stage_.resize(n);
    acc_.resize(n);
    k_.resize(n);
    scratch_.resize(n);
  }
}

// out = -i exp(i tau B) M FFT(f(Re IFFT(exp(-i tau B) w)))
void IfRk4Stepper::forcing(const CVec& what, const CVec* to_phys, const CVec* from_phys, CVec& out) {
  const std::size_t n = what.size();
  if (to_phys)
    for (std::size_t i = 0; i < n; ++i) scratch_[i] = what[i] * (*to_phys)[i];
  else
    std::copy(what.begin(), what.end(), scratch_.begin());
  grid_->backward(scratch_.data());
  for (std::size_t i = 0; i < n; ++i) scratch_[i] = params_.force(scratch_[i].real());
  grid_->forward(scratch_.data());
  for (std::size_t i = 0; i < n; ++i) {
    cplx z = scratch_[i] * msym_[i];
    if (from_phys) z *= (*from_phys)[i];
    out[i] = cplx(z.imag(), -z.real());  // multiply by -i
  }
}

bool IfRk4Stepper::advance(CVec& vhat) {
  const std::size_t n = vhat.size();
  if (linear_) {
    for (std::size_t i = 0; i < n; ++i) vhat[i] *= full_fwd_[i];
    return true;
  }
  const double h = dt_;
  forcing(vhat, nullptr, nullptr, k_);
  for (std::size_t i = 0; i < n; ++i) {
    acc_[i] = vhat[i] + (h / 6.0) * k_[i];
    stage_[i] = vhat[i] + (0.5 * h) * k_[i];
  }
  forcing(stage_, &half_fwd_, &half_bwd_, k_);
  for (std::size_t i = 0; i < n; ++i) {
    acc_[i] += (h / 3.0) * k_[i];
    stage_[i] = vhat[i] + (0.5 * h) * k_[i];
  }
  forcing(stage_, &half_fwd_, &half_bwd_, k_);
  for (std::size_t i = 0; i < n; ++i) {
    acc_[i] += (h / 3.0) * k_[i];
    stage_[i] = vhat[i] + h * k_[i];
  }
  forcing(stage_, &full_fwd_, &full_bwd_, k_);
  bool finite = true;
  for (std::size_t i = 0; i < n; ++i) {
    acc_[i] += (h / 6.0) * k_[i];
    if (!std::isfinite(acc_[i].real()) || !std::isfinite(acc_[i].imag())) finite = false;
  }
  if (!finite) return false;
  for (std::size_t i = 0; i < n; ++i) vhat[i] = acc_[i] * full_fwd_[i];
  return true;
}

State step(const State& s, double dt, bool dealias) {
  require(dt >= 0.0, "dt must be nonnegative");
  if (dt == 0.0) return s;
  IfRk4Stepper stepper(s.v.grid_ptr(), s.params, dt, dealias);
  Field vhat = to_spectral(s.v);
  if (!stepper.advance(vhat.storage())) throw BlowupSuspected(s, "non-finite value in a Runge-Kutta stage");
  return State{s.t + dt, to_physical(vhat), s.params};
}

const char* to_string(RunStatus r) { return r == RunStatus::completed ? "Completed" : "BlowupDetected"; }

double h1_norm_of_real_part(const Grid& g, const CVec& vhat) {
  // Re(v)^ at k is (v_k + conj(v_{-k}))/2.
  const auto& kabs = g.k_abs();
  double acc = 0.0;
  for (std::size_t i = 0; i < vhat.size(); ++i) {
    const cplx uk = 0.5 * (vhat[i] + std::conj(vhat[g.reflect(i)]));
    acc += (1.0 + kabs[i] * kabs[i]) * std::norm(uk);
  }
  return std::sqrt(acc * g.cell_volume());
}

namespace {

// Cheaper repeated H1 evaluation with a cached reflection table.
class H1Probe {
 public:
  explicit H1Probe(const Grid& g) : g_(g), reflect_(g.size()) {
    for (std::size_t i = 0; i < g.size(); ++i) reflect_[i] = g.reflect(i);
  }
  double operator()(const CVec& vhat) const {
    const auto& kabs = g_.k_abs();
    double acc = 0.0;
    for (std::size_t i = 0; i < vhat.size(); ++i) {
      const cplx uk = 0.5 * (vhat[i] + std::conj(vhat[reflect_[i]]));
      acc += (1.0 + kabs[i] * kabs[i]) * std::norm(uk);
    }
    return std::sqrt(acc * g_.cell_volume());
  }

 private:
  const Grid& g_;
  std::vector<std::size_t> reflect_;
};

}  // namespace

RunOutcome evolve(const State& s0, const StepperConfig& cfg, const StateSink& sink) {
  cfg.validate();
  s0.params.validate();
  const GridPtr grid = s0.v.grid_ptr();
  RunOutcome out;
  out.wrap_time = wrap_around_time(s0.v);

  const double ratio = cfg.t_end / cfg.dt;
  long full_steps = static_cast<long>(std::floor(ratio + 1e-9));
  double remainder = cfg.t_end - full_steps * cfg.dt;
  if (remainder < 1e-12 * std::max(1.0, cfg.t_end)) remainder = 0.0;

  IfRk4Stepper stepper(grid, s0.params, cfg.dt, cfg.dealias);
  const H1Probe h1(*grid);
  Field vhat = to_spectral(s0.v);
  out.h1_initial = h1(vhat.storage());
  const double base = cfg.h1_reference > 0.0 ? cfg.h1_reference : out.h1_initial;
  const double limit = cfg.blowup_h1_factor * base;

  auto emit = [&](double t) {
    if (sink) sink(State{t, to_physical(vhat), s0.params});
  };
  emit(s0.t);

  const long total = full_steps + (remainder > 0.0 ? 1 : 0);
  double t = s0.t;
  long last_emitted = 0;
  for (long n = 1; n <= total; ++n) {
    const CVec before = vhat.storage();
    bool ok;
    if (n <= full_steps) {
      ok = stepper.advance(vhat.storage());
      t = s0.t + n * cfg.dt;
    } else {
      IfRk4Stepper tail(grid, s0.params, remainder, cfg.dealias);
      ok = tail.advance(vhat.storage());
      t = s0.t + cfg.t_end;
    }
    const double h1now = ok ? h1(vhat.storage()) : std::numeric_limits<double>::quiet_NaN();
    if (!ok || !std::isfinite(h1now)) {
      vhat.storage() = before;
      out.status = RunStatus::blowup_detected;
      out.reason = "non-finite value in a Runge-Kutta stage";
      out.steps = n - 1;
      out.final_state = State{s0.t + (n - 1) * cfg.dt, to_physical(vhat), s0.params};
      out.h1_final = h1(vhat.storage());
      if (sink && last_emitted != n - 1) sink(out.final_state);
      return out;
    }
    if (base > 0.0 && h1now > limit) {
      out.status = RunStatus::blowup_detected;
      std::ostringstream os;
      os << "H1 norm exceeded " << cfg.blowup_h1_factor << "x its initial value";
      out.reason = os.str();
      out.steps = n;
      out.final_state = State{t, to_physical(vhat), s0.params};
      out.h1_final = h1now;
      if (sink) sink(out.final_state);
      return out;
    }
    if (n % cfg.sample_every == 0 || n == total) {
      emit(t);
      last_emitted = n;
    }
  }
  out.status = RunStatus::completed;
  out.steps = total;
  out.final_state = State{t, to_physical(vhat), s0.params};
  out.h1_final = h1(vhat.storage());
  return out;
}

double group_velocity(double k) {
  const double k2 = k * k;
  return (1.0 + 2.0 * k2) / std::sqrt(1.0 + k2);
}

double wrap_around_time(const Field& v) {
  const Grid& g = v.grid();
  const Field s = to_spectral(v);
  const auto& kabs = g.k_abs();
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> mass(g.size());
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    mass[i] = (1.0 + kabs[i] * kabs[i]) * std::norm(s[i]);
    total += mass[i];
  }
  if (total == 0.0) return std::numeric_limits<double>::infinity();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return kabs[a] > kabs[b]; });
  double tail = 0.0;
  double kres = 0.0;
  for (std::size_t idx : order) {
    tail += mass[idx];
    if (tail > 1e-10 * total) {
      kres = kabs[idx];
      break;
    }
  }
  double radius = 0.5 * g.side(0);
  for (int a = 1; a < g.dim(); ++a) radius = std::min(radius, 0.5 * g.side(a));
  return radius / group_velocity(kres);
}

// ---------------------------------------------------------------------------

namespace {

template <class T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.insert(out.end(), bytes, bytes + sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > b_.size()) fail(ErrorCode::io, "checkpoint truncated");
    std::uint8_t bytes[sizeof(T)];
    std::memcpy(bytes, b_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const State& s) {
  const Grid& g = s.grid();
  const Field v = to_physical(s.v);
  std::vector<std::uint8_t> out{'G', 'B', 'Q', '1'};
  out.reserve(64 + 16 * g.size());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) put<std::uint32_t>(out, static_cast<std::uint32_t>(g.points(a)));
  for (int a = 0; a < g.dim(); ++a) put<double>(out, g.side(a));
  put<double>(out, s.t);
  put<double>(out, s.params.alpha);
  put<std::int8_t>(out, static_cast<std::int8_t>(s.params.beta));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(s.params.nonlinearity));
  for (const auto& z : v.values()) {
    put<double>(out, z.real());
    put<double>(out, z.imag());
  }
  return out;
}

State decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "GBQ1", 4) != 0) fail(ErrorCode::io, "bad checkpoint magic");
  Reader r(bytes.subspan(4));
  const auto dim = r.get<std::uint32_t>();
  if (dim < 1 || dim > 3) fail(ErrorCode::io, "checkpoint dimension out of range");
  std::array<int, 3> pts{};
  std::array<double, 3> side{};
  for (std::uint32_t a = 0; a < dim; ++a) pts[a] = static_cast<int>(r.get<std::uint32_t>());
  for (std::uint32_t a = 0; a < dim; ++a) side[a] = r.get<double>();
  GridPtr g = make_grid(static_cast<int>(dim), std::span<const int>(pts.data(), dim),
                        std::span<const double>(side.data(), dim));
  State s;
  s.t = r.get<double>();
  s.params.alpha = r.get<double>();
  s.params.beta = r.get<std::int8_t>();
  const auto kind = r.get<std::uint8_t>();
  if (kind > 2) fail(ErrorCode::io, "unknown nonlinearity code in checkpoint");
  s.params.nonlinearity = static_cast<Nonlinearity>(kind);
  if (r.remaining() != 16 * g->size()) fail(ErrorCode::io, "checkpoint payload size does not match grid");
  s.v = Field(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double re = r.get<double>();
    const double im = r.get<double>();
    s.v[i] = cplx(re, im);
  }
  return s;
}

void write_checkpoint(const std::string& path, const State& s) {
  const auto bytes = encode_checkpoint(s);
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) fail(ErrorCode::io, "failed writing '" + path + "'");
}

State read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::io, "cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace gbq

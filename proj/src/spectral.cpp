#include "spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "errors.hpp"

namespace gbq {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

struct FftPlans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  double scale = 1.0;

  ~FftPlans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

Grid::Grid(int dim, std::array<int, 3> points, std::array<double, 3> side)
    : dim_(dim), points_(points), side_(side) {
  require(dim >= 1 && dim <= 3, "grid dimension must be 1, 2 or 3");
  for (int a = 0; a < 3; ++a) {
    if (a < dim) {
      if (!is_power_of_two(points_[a]) || points_[a] < 8) {
        std::ostringstream os;
        os << "points on axis " << a << " must be a power of two >= 8 (got " << points_[a] << ")";
        fail(ErrorCode::invalid_argument, os.str());
      }
      if (!(side_[a] > 0.0) || !std::isfinite(side_[a])) {
        std::ostringstream os;
        os << "side length on axis " << a << " must be positive (got " << side_[a] << ")";
        fail(ErrorCode::invalid_argument, os.str());
      }
    } else {
      points_[a] = 1;
      side_[a] = 1.0;
    }
  }
  size_ = static_cast<std::size_t>(points_[0]) * points_[1] * points_[2];
  cell_volume_ = 1.0;
  for (int a = 0; a < dim_; ++a) cell_volume_ *= spacing(a);

  for (int a = 0; a < 3; ++a) {
    kaxis_[a].resize(points_[a]);
    const double dk = a < dim_ ? 2.0 * std::numbers::pi / side_[a] : 0.0;
    for (int i = 0; i < points_[a]; ++i) kaxis_[a][i] = dk * mode_number(a, i);
  }

  kabs_.resize(size_);
  symB_.resize(size_);
  symM_.resize(size_);
  std::size_t idx = 0;
  for (int i = 0; i < points_[0]; ++i)
    for (int j = 0; j < points_[1]; ++j)
      for (int l = 0; l < points_[2]; ++l, ++idx) {
        const double k2 = kaxis_[0][i] * kaxis_[0][i] + kaxis_[1][j] * kaxis_[1][j] + kaxis_[2][l] * kaxis_[2][l];
        const double k = std::sqrt(k2);
        kabs_[idx] = k;
        symB_[idx] = k * std::sqrt(1.0 + k2);
        symM_[idx] = k / std::sqrt(1.0 + k2);
      }

  plans_ = std::make_unique<FftPlans>();
  plans_->scale = 1.0 / std::sqrt(static_cast<double>(size_));
  CVec scratch(size_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::array<int, 3> n{points_[0], points_[1], points_[2]};
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->fwd = fftw_plan_dft(dim_, n.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->bwd = fftw_plan_dft(dim_, n.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plans_->fwd || !plans_->bwd) fail(ErrorCode::invalid_argument, "FFTW planning failed");
}

Grid::~Grid() = default;

std::vector<double> Grid::centered_wavenumbers(int axis) const {
  std::vector<double> k(points_[axis]);
  const double dk = 2.0 * std::numbers::pi / side_[axis];
  for (int i = 0; i < points_[axis]; ++i) k[i] = dk * (i - points_[axis] / 2);
  return k;
}

double Grid::max_wavenumber() const {
  return *std::max_element(kabs_.begin(), kabs_.end());
}

std::array<int, 3> Grid::unflatten(std::size_t idx) const {
  const int l = static_cast<int>(idx % points_[2]);
  idx /= points_[2];
  const int j = static_cast<int>(idx % points_[1]);
  const int i = static_cast<int>(idx / points_[1]);
  return {i, j, l};
}

std::size_t Grid::flatten(const std::array<int, 3>& ijk) const {
  return (static_cast<std::size_t>(ijk[0]) * points_[1] + ijk[1]) * points_[2] + ijk[2];
}

std::size_t Grid::reflect(std::size_t idx) const {
  auto ijk = unflatten(idx);
  for (int a = 0; a < 3; ++a) ijk[a] = (points_[a] - ijk[a]) % points_[a];
  return flatten(ijk);
}

bool Grid::is_nyquist(std::size_t idx, int axis) const {
  if (axis >= dim_) return false;
  return unflatten(idx)[axis] == points_[axis] / 2;
}

bool Grid::same_shape(const Grid& o) const {
  return dim_ == o.dim_ && points_ == o.points_ && side_ == o.side_;
}

void Grid::forward(cplx* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plans_->fwd, p, p);
  for (std::size_t i = 0; i < size_; ++i) data[i] *= plans_->scale;
}

void Grid::backward(cplx* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plans_->bwd, p, p);
  for (std::size_t i = 0; i < size_; ++i) data[i] *= plans_->scale;
}

GridPtr make_grid(int dim, std::span<const int> points, std::span<const double> side) {
  require(dim >= 1 && dim <= 3, "grid dimension must be 1, 2 or 3");
  require(static_cast<int>(points.size()) >= dim && static_cast<int>(side.size()) >= dim,
          "points and side must list every axis");
  std::array<int, 3> p{1, 1, 1};
  std::array<double, 3> s{1.0, 1.0, 1.0};
  for (int a = 0; a < dim; ++a) {
    p[a] = points[a];
    s[a] = side[a];
  }
  return std::make_shared<const Grid>(dim, p, s);
}

GridPtr make_cubic_grid(int dim, int points, double side) {
  std::array<int, 3> p{points, points, points};
  std::array<double, 3> s{side, side, side};
  return make_grid(dim, std::span<const int>(p.data(), dim), std::span<const double>(s.data(), dim));
}

// ---------------------------------------------------------------------------

Field::Field(GridPtr grid, Representation rep) : grid_(std::move(grid)), rep_(rep), values_(grid_->size()) {}

Field::Field(GridPtr grid, Representation rep, CVec values)
    : grid_(std::move(grid)), rep_(rep), values_(std::move(values)) {
  require(values_.size() == grid_->size(), "field value count does not match grid size");
}

Field Field::from_real(GridPtr grid, std::span<const double> samples) {
  require(samples.size() == grid->size(), "sample count does not match grid size");
  Field f(std::move(grid));
  for (std::size_t i = 0; i < samples.size(); ++i) f.values_[i] = samples[i];
  return f;
}

Field Field::from_function(GridPtr grid, const std::function<cplx(std::span<const double>)>& fn) {
  Field f(grid);
  const Grid& g = *grid;
  std::array<double, 3> x{};
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto ijk = g.unflatten(idx);
    for (int a = 0; a < g.dim(); ++a) x[a] = g.coordinate(a, ijk[a]);
    f.values_[idx] = fn(std::span<const double>(x.data(), g.dim()));
  }
  return f;
}

std::vector<double> Field::real_part() const {
  std::vector<double> r(values_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = values_[i].real();
  return r;
}

std::vector<double> Field::imag_part() const {
  std::vector<double> r(values_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = values_[i].imag();
  return r;
}

double Field::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const {
  for (const auto& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (&a != &b && !a.same_shape(b)) fail(ErrorCode::grid_mismatch, "fields live on different grids");
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*grid_, *o.grid_);
  require(rep_ == o.rep_, "representation mismatch in field sum");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*grid_, *o.grid_);
  require(rep_ == o.rep_, "representation mismatch in field difference");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

Field transform(const Field& f, Representation target) {
  if (f.representation() == target) return f;
  Field out(f.grid_ptr(), target, f.storage());
  if (target == Representation::spectral)
    f.grid().forward(out.values().data());
  else
    f.grid().backward(out.values().data());
  return out;
}

Field pointwise_product(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid());
  require(!a.is_spectral() && !b.is_spectral(), "pointwise product needs physical fields");
  Field out(a.grid_ptr());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Field real_field(const Field& f) {
  require(!f.is_spectral(), "real_field needs a physical field");
  Field out(f.grid_ptr());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i].real();
  return out;
}

// ---------------------------------------------------------------------------

cplx symbol_value(const Multiplier& m, std::span<const double> k, bool nyquist_on_axis) {
  double k2 = 0.0;
  for (double kj : k) k2 += kj * kj;
  const double ka = std::sqrt(k2);
  const double bval = ka * std::sqrt(1.0 + k2);
  using K = Multiplier::Kind;
  switch (m.kind) {
    case K::B:
      return bval;
    case K::Binv:
      return ka == 0.0 ? 0.0 : 1.0 / bval;
    case K::M:
      return ka / std::sqrt(1.0 + k2);
    case K::M_power:
      if (m.param == 0.0) return 1.0;
      return ka == 0.0 ? 0.0 : std::pow(ka / std::sqrt(1.0 + k2), m.param);
    case K::fractional_laplacian:
      if (m.param == 0.0) return 1.0;
      return ka == 0.0 ? 0.0 : std::pow(ka, m.param);
    case K::bessel:
      return std::pow(1.0 + k2, 0.5 * m.param);
    case K::riesz:
      if (ka == 0.0 || nyquist_on_axis || m.axis >= static_cast<int>(k.size())) return 0.0;
      return cplx(0.0, -k[m.axis] / ka);
    case K::derivative:
      if (nyquist_on_axis || m.axis >= static_cast<int>(k.size())) return 0.0;
      return cplx(0.0, k[m.axis]);
    case K::phase:
      return std::polar(1.0, -m.param * bval);
    case K::cos_flow:
      return std::cos(m.param * bval);
    case K::sin_flow:
      return std::sin(m.param * bval);
    case K::dyadic:
      return (ka > m.param / std::numbers::sqrt2 && ka <= m.param * std::numbers::sqrt2) ? 1.0 : 0.0;
  }
  return 0.0;
}

CVec symbol_table(const Grid& g, const Multiplier& m) {
  CVec table(g.size());
  const bool odd = m.kind == Multiplier::Kind::riesz || m.kind == Multiplier::Kind::derivative;
  std::array<double, 3> k{};
  std::size_t idx = 0;
  for (int i = 0; i < g.points(0); ++i)
    for (int j = 0; j < g.points(1); ++j)
      for (int l = 0; l < g.points(2); ++l, ++idx) {
        k = {g.wavenumber(0, i), g.wavenumber(1, j), g.wavenumber(2, l)};
        bool nyq = false;
        if (odd && m.axis < g.dim()) {
          const int ia = m.axis == 0 ? i : (m.axis == 1 ? j : l);
          nyq = ia == g.points(m.axis) / 2;
        }
        table[idx] = symbol_value(m, std::span<const double>(k.data(), g.dim()), nyq);
      }
  return table;
}

void multiply_in_place(std::span<cplx> spectrum, std::span<const cplx> table) {
  require(spectrum.size() == table.size(), "symbol table size mismatch");
  for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= table[i];
}

Field apply_multiplier(const Field& f, const Multiplier& m) {
  Field s = to_spectral(f);
  const CVec table = symbol_table(f.grid(), m);
  multiply_in_place(s.values(), table);
  return f.is_spectral() ? s : to_physical(s);
}

Field dyadic_project(const Field& f, double n) {
  require(n > 0.0, "dyadic shell must be positive");
  return apply_multiplier(f, Multiplier::dyadic(n));
}

std::vector<double> dyadic_shells(const Grid& g) {
  double kmin = 1e300;
  for (int a = 0; a < g.dim(); ++a) kmin = std::min(kmin, 2.0 * std::numbers::pi / g.side(a));
  const double kmax = g.max_wavenumber();
  // Shell N covers (N/sqrt2, sqrt2 N]; start with the shell containing kmin.
  int j = static_cast<int>(std::floor(std::log2(kmin / std::numbers::sqrt2))) ;
  std::vector<double> shells;
  for (;; ++j) {
    const double n = std::ldexp(1.0, j);
    if (n * std::numbers::sqrt2 < kmin) continue;
    if (n / std::numbers::sqrt2 >= kmax) break;
    shells.push_back(n);
  }
  return shells;
}

// ---------------------------------------------------------------------------

double spectral_sum(const Field& spectral, std::span<const double> weight) {
  require(spectral.is_spectral(), "spectral_sum needs a spectral field");
  require(weight.size() == spectral.size(), "weight size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < spectral.size(); ++i) acc += weight[i] * std::norm(spectral[i]);
  return acc * spectral.grid().cell_volume();
}

double inner(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid());
  require(a.representation() == b.representation(), "representation mismatch in inner product");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (std::conj(a[i]) * b[i]).real();
  return acc * a.grid().cell_volume();
}

double relative_mean(const Field& f) {
  const Field s = to_spectral(f);
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) total += std::norm(s[i]);
  if (total == 0.0) return 0.0;
  return std::abs(s[0]) / std::sqrt(total);
}

Field subtract_mean(const Field& f) {
  Field s = to_spectral(f);
  s[0] = 0.0;
  return f.is_spectral() ? s : to_physical(s);
}

double norm(const Field& f, const Norm& which) {
  const Grid& g = f.grid();
  using K = Norm::Kind;
  switch (which.kind) {
    case K::L2:
    case K::Lp:
    case K::Linf: {
      const Field p = to_physical(f);
      if (which.kind == K::Linf) return p.max_abs();
      const double pw = which.kind == K::L2 ? 2.0 : which.param;
      require(pw >= 1.0, "Lp norm needs p >= 1");
      double acc = 0.0;
      if (pw == 2.0) {
        for (const auto& v : p.values()) acc += std::norm(v);
        return std::sqrt(acc * g.cell_volume());
      }
      for (const auto& v : p.values()) acc += std::pow(std::abs(v), pw);
      return std::pow(acc * g.cell_volume(), 1.0 / pw);
    }
    case K::H1:
    case K::Hs: {
      const double s = which.kind == K::H1 ? 1.0 : which.param;
      const Field sp = to_spectral(f);
      std::vector<double> w(g.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(1.0 + g.k_abs()[i] * g.k_abs()[i], s);
      return std::sqrt(spectral_sum(sp, w));
    }
    case K::Hdot: {
      const Field sp = to_spectral(f);
      const double s = which.param;
      if (s < 0.0) {
        double total = 0.0;
        for (const auto& v : sp.values()) total += std::norm(v);
        if (total > 0.0 && std::abs(sp[0]) > 1e-10 * std::sqrt(total))
          fail(ErrorCode::ill_defined, "homogeneous norm of negative order is undefined for a field with nonzero mean");
      }
      std::vector<double> w(g.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double k = g.k_abs()[i];
        w[i] = k == 0.0 ? (s == 0.0 ? 1.0 : 0.0) : std::pow(k, 2.0 * s);
      }
      return std::sqrt(spectral_sum(sp, w));
    }
  }
  return 0.0;
}

Field riesz_commutator(const Field& phi, const Field& f) {
  require_same_grid(phi.grid(), f.grid());
  const Field pp = to_physical(phi);
  const Field fp = to_physical(f);
  const Multiplier half = Multiplier::fractional_laplacian(1.0);
  Field lhs = apply_multiplier(pointwise_product(pp, fp), half);
  Field rhs = pointwise_product(pp, apply_multiplier(fp, half));
  return lhs - rhs;
}

std::vector<unsigned char> dealias_mask(const Grid& g) {
  std::vector<unsigned char> mask(g.size(), 1);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto ijk = g.unflatten(idx);
    for (int a = 0; a < g.dim(); ++a) {
      if (3 * std::abs(g.mode_number(a, ijk[a])) > g.points(a)) {
        mask[idx] = 0;
        break;
      }
    }
  }
  return mask;
}

}  // namespace gbq

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <new>
#include <span>
#include <vector>

namespace gbq {

using cplx = std::complex<double>;

template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), alignment)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using CVec = std::vector<cplx, AlignedAllocator<cplx>>;

struct FftPlans;

/// Periodic box [-L/2, L/2)^d sampled on a uniform grid, with the angular
/// wavenumber lattice k = 2*pi*n/L and cached |k|, B(k), M(k) tables.
///
/// Storage is row-major with axis 0 slowest. Spectral arrays use the FFT
/// ordering n = 0, 1, ..., N/2-1, -N/2, ..., -1 on each axis.
class Grid {
 public:
  Grid(int dim, std::array<int, 3> points, std::array<double, 3> side);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int dim() const { return dim_; }
  int points(int axis) const { return points_[axis]; }
  double side(int axis) const { return side_[axis]; }
  const std::array<int, 3>& shape() const { return points_; }
  std::size_t size() const { return size_; }
  double spacing(int axis) const { return side_[axis] / points_[axis]; }
  double cell_volume() const { return cell_volume_; }
  double volume() const { return cell_volume_ * static_cast<double>(size_); }

  /// Angular wavenumber of FFT-ordered index i on an axis.
  double wavenumber(int axis, int i) const { return kaxis_[axis][i]; }
  /// Signed integer mode number of FFT-ordered index i.
  int mode_number(int axis, int i) const { return i < points_[axis] / 2 ? i : i - points_[axis]; }
  /// Wavenumbers of an axis in ascending (centered) order: 2*pi/L * {-N/2, ..., N/2-1}.
  std::vector<double> centered_wavenumbers(int axis) const;
  /// Physical coordinate of sample i: -L/2 + i*L/N. Index N/2 is the origin.
  double coordinate(int axis, int i) const { return -0.5 * side_[axis] + i * spacing(axis); }
  double max_wavenumber() const;

  std::array<int, 3> unflatten(std::size_t idx) const;
  std::size_t flatten(const std::array<int, 3>& ijk) const;
  /// Flat index of the mirrored sample x -> -x about the box center.
  std::size_t reflect(std::size_t idx) const;

  const std::vector<double>& k_abs() const { return kabs_; }
  const std::vector<double>& symbol_B() const { return symB_; }
  const std::vector<double>& symbol_M() const { return symM_; }

  /// True when mode idx sits on the Nyquist plane of the given axis.
  bool is_nyquist(std::size_t idx, int axis) const;

  bool same_shape(const Grid& o) const;

  // Unitary in-place transforms (scaled by 1/sqrt(size)).
  void forward(cplx* data) const;
  void backward(cplx* data) const;

 private:
  int dim_;
  std::array<int, 3> points_;
  std::array<double, 3> side_;
  std::size_t size_;
  double cell_volume_;
  std::array<std::vector<double>, 3> kaxis_;
  std::vector<double> kabs_;
  std::vector<double> symB_;
  std::vector<double> symM_;
  std::unique_ptr<FftPlans> plans_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(int dim, std::span<const int> points, std::span<const double> side);
/// Convenience: same count and length on every axis.
GridPtr make_cubic_grid(int dim, int points, double side);

enum class Representation { physical, spectral };

/// Complex samples on a grid in one of the two representations.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid, Representation rep = Representation::physical);
  Field(GridPtr grid, Representation rep, CVec values);

  static Field from_real(GridPtr grid, std::span<const double> samples);
  /// Samples f(x) at every grid point; x has dim() entries.
  static Field from_function(GridPtr grid, const std::function<cplx(std::span<const double>)>& f);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  Representation representation() const { return rep_; }
  bool is_spectral() const { return rep_ == Representation::spectral; }
  std::size_t size() const { return values_.size(); }

  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  CVec& storage() { return values_; }
  const CVec& storage() const { return values_; }

  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  std::vector<double> real_part() const;
  std::vector<double> imag_part() const;
  double max_abs() const;
  bool all_finite() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);

 private:
  GridPtr grid_;
  Representation rep_ = Representation::physical;
  CVec values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

Field transform(const Field& f, Representation target);
inline Field to_spectral(const Field& f) { return transform(f, Representation::spectral); }
inline Field to_physical(const Field& f) { return transform(f, Representation::physical); }

/// Pointwise product of two physical fields.
Field pointwise_product(const Field& a, const Field& b);
/// Re part only, zero imaginary; input must be physical.
Field real_field(const Field& f);

void require_same_grid(const Grid& a, const Grid& b);

/// Fourier multiplier symbols used throughout. Conventions (angular k):
///   B            |k| sqrt(1+|k|^2)
///   Binv         1/B, zero mode defined as 0
///   M            |k| / sqrt(1+|k|^2)
///   M_power(s)   M^s, zero mode 0 for s > 0 and s < 0
///   fractional_laplacian(s)  |k|^s, i.e. (-Delta)^{s/2}; zero mode 0 unless s == 0
///   bessel(s)    (1+|k|^2)^{s/2}
///   riesz(j)     -i k_j/|k|
///   derivative(j)  i k_j
///   phase(t)     exp(-i t B)
///   cos_flow(t), sin_flow(t)   cos(t B), sin(t B)
///   dyadic(N)    indicator of the shell N/sqrt(2) < |k| <= sqrt(2) N
/// Odd symbols (riesz, derivative) vanish on the Nyquist plane of their axis so
/// that real fields stay real.
struct Multiplier {
  enum class Kind {
    B,
    Binv,
    M,
    M_power,
    fractional_laplacian,
    bessel,
    riesz,
    derivative,
    phase,
    cos_flow,
    sin_flow,
    dyadic,
  };
  Kind kind = Kind::B;
  double param = 0.0;
  int axis = 0;

  static Multiplier b() { return {Kind::B}; }
  static Multiplier b_inv() { return {Kind::Binv}; }
  static Multiplier m() { return {Kind::M}; }
  static Multiplier m_power(double s) { return {Kind::M_power, s}; }
  static Multiplier fractional_laplacian(double s) { return {Kind::fractional_laplacian, s}; }
  static Multiplier bessel(double s) { return {Kind::bessel, s}; }
  static Multiplier riesz(int j) { return {Kind::riesz, 0.0, j}; }
  static Multiplier derivative(int j) { return {Kind::derivative, 0.0, j}; }
  static Multiplier phase(double t) { return {Kind::phase, t}; }
  static Multiplier cos_flow(double t) { return {Kind::cos_flow, t}; }
  static Multiplier sin_flow(double t) { return {Kind::sin_flow, t}; }
  static Multiplier dyadic(double n) { return {Kind::dyadic, n}; }
};

/// Symbol value at a wavenumber vector (only the first dim entries used).
cplx symbol_value(const Multiplier& m, std::span<const double> k, bool nyquist_on_axis);
/// Symbol sampled on every mode of the grid in FFT order.
CVec symbol_table(const Grid& g, const Multiplier& m);

Field apply_multiplier(const Field& f, const Multiplier& m);
/// Multiply a spectral array in place by a precomputed table.
void multiply_in_place(std::span<cplx> spectrum, std::span<const cplx> table);

Field dyadic_project(const Field& f, double n);
/// Dyadic shells 2^j whose annulus intersects the nonzero modes of the grid.
std::vector<double> dyadic_shells(const Grid& g);

struct Norm {
  enum class Kind { L2, Lp, H1, Hs, Hdot, Linf };
  Kind kind = Kind::L2;
  double param = 0.0;

  static Norm l2() { return {Kind::L2}; }
  static Norm lp(double p) { return {Kind::Lp, p}; }
  static Norm h1() { return {Kind::H1}; }
  static Norm hs(double s) { return {Kind::Hs, s}; }
  static Norm hdot(double s) { return {Kind::Hdot, s}; }
  static Norm linf() { return {Kind::Linf}; }
};

/// Grid norms: Lebesgue norms by Riemann sum times cell volume, Sobolev norms by
/// Parseval. Hdot(s < 0) throws ill_defined when the mean does not vanish.
double norm(const Field& f, const Norm& which);

/// Spectral weighted sum  cell_volume * sum_k w(k) |f_k|^2  over all modes.
double spectral_sum(const Field& spectral, std::span<const double> weight);
/// Grid inner product  Re sum conj(a) b * cell_volume  (both physical or both spectral).
double inner(const Field& a, const Field& b);

/// Mean (zero-mode) magnitude relative to the field's L2 scale.
double relative_mean(const Field& f);
Field subtract_mean(const Field& f);

/// [(-Delta)^{1/2}, phi] f = (-Delta)^{1/2}(phi f) - phi (-Delta)^{1/2} f.
Field riesz_commutator(const Field& phi, const Field& f);

/// Two-thirds rule: true for modes with |n_j| <= N_j/3 on every axis.
std::vector<unsigned char> dealias_mask(const Grid& g);

}  // namespace gbq

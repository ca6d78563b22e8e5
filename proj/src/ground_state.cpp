#include "ground_state.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "diagnostics.hpp"
#include "propagator.hpp"

namespace gbq {

double GroundState::threshold_norm() const { return std::sqrt(h1_norm_sq); }

double alpha_upper_bound(int d) {
  if (d <= 2) return std::numeric_limits<double>::infinity();
  return (d + 2.0) / (d - 2.0);
}

double default_ground_state_box(int d) {
  switch (d) {
    case 1:
      return 80.0;
    case 2:
      return 40.0;
    default:
      return 30.0;
  }
}

namespace {

double power_term(double x, double alpha) {
  if (alpha == 3.0) return x * x * x;
  if (alpha == 5.0) {
    const double x2 = x * x;
    return x2 * x2 * x;
  }
  return std::pow(std::abs(x), alpha - 1.0) * x;
}

}  // namespace

SharpConstants constants_from_phi(const Field& phi, double alpha) {
  require(alpha > 1.0, "alpha must be > 1");
  const double h1sq = std::pow(norm(phi, Norm::h1()), 2);
  require(h1sq > 0.0, "ground state has zero norm");
  const double q = (alpha - 1.0) / (2.0 * (alpha + 1.0));
  return {std::pow(h1sq, -q), q * h1sq};
}

GroundState analyze_ground_state(Field phi, double alpha, int iterations) {
  const Grid& g = phi.grid();
  GroundState gs;
  gs.alpha = alpha;
  gs.dim = g.dim();
  gs.iterations = iterations;
  phi = real_field(to_physical(phi));
  gs.h1_norm_sq = std::pow(norm(phi, Norm::h1()), 2);
  const SharpConstants c = constants_from_phi(phi, alpha);
  gs.c_star = c.c_star;
  gs.eta = c.eta;
  const StaticFunctionals sf = static_functionals(phi, alpha);
  gs.static_energy = sf.E;
  gs.pohozaev_residual = std::abs(sf.R) / gs.h1_norm_sq;

  Field lhs = to_spectral(phi);
  const auto& kabs = g.k_abs();
  for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] *= 1.0 + kabs[i] * kabs[i];
  lhs = to_physical(lhs);
  double acc = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double r = lhs[i].real() - power_term(phi[i].real(), alpha);
    acc += r * r;
  }
  gs.equation_residual = std::sqrt(acc * g.cell_volume()) / norm(phi, Norm::l2());
  gs.phi = std::move(phi);
  return gs;
}

GroundState petviashvili(GridPtr grid, double alpha, const PetviashviliOptions& opts) {
  const Grid& g = *grid;
  require(std::isfinite(alpha) && alpha > 1.0, "alpha must be > 1");
  if (alpha >= alpha_upper_bound(g.dim())) {
    std::ostringstream os;
    os << "alpha must be below " << alpha_upper_bound(g.dim()) << " in dimension " << g.dim();
    fail(ErrorCode::invalid_argument, os.str());
  }
  require(opts.tol > 0.0, "tolerance must be positive");
  require(opts.max_iter >= 1, "max_iter must be positive");

  std::vector<double> phi(g.size());
  if (opts.init) {
    require_same_grid(g, opts.init->grid());
    phi = to_physical(*opts.init).real_part();
  } else {
    const Field gauss = Field::from_function(grid, [](std::span<const double> x) {
      double r2 = 0.0;
      for (double xi : x) r2 += xi * xi;
      return cplx(std::exp(-r2), 0.0);
    });
    phi = gauss.real_part();
  }

  const auto& kabs = g.k_abs();
  std::vector<double> inv_symbol(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) inv_symbol[i] = 1.0 / (1.0 + kabs[i] * kabs[i]);
  const double gamma = alpha / (alpha - 1.0);
  const double cell = g.cell_volume();

  CVec buf(g.size());
  double change = std::numeric_limits<double>::infinity();
  int it = 0;
  while (it < opts.max_iter) {
    ++it;
    // <(1-Delta) phi, phi> by Parseval.
    for (std::size_t i = 0; i < g.size(); ++i) buf[i] = phi[i];
    g.forward(buf.data());
    double lin = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) lin += std::norm(buf[i]) / inv_symbol[i];
    lin *= cell;
    double nl = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double n = power_term(phi[i], alpha);
      nl += n * phi[i];
      buf[i] = n;
    }
    nl *= cell;
    if (!(nl > 0.0)) fail(ErrorCode::not_converged, "Petviashvili iteration collapsed to zero");
    const double factor = std::pow(lin / nl, gamma);
    g.forward(buf.data());
    for (std::size_t i = 0; i < g.size(); ++i) buf[i] *= factor * inv_symbol[i];
    g.backward(buf.data());
    change = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double next = buf[i].real();
      change = std::max(change, std::abs(next - phi[i]));
      phi[i] = next;
    }
    if (!std::isfinite(change)) break;
    if (change <= opts.tol) break;
  }
  if (!(change <= opts.tol)) {
    std::ostringstream os;
    os << "Petviashvili iteration did not converge in " << it << " iterations (last change " << change << ")";
    throw NotConverged(Field::from_real(grid, phi), change, it, os.str());
  }
  return analyze_ground_state(Field::from_real(grid, phi), alpha, it);
}

std::string sidecar_text(const GroundState& gs) {
  std::ostringstream os;
  os << "alpha = " << format_double(gs.alpha) << '\n'
     << "dim = " << gs.dim << '\n'
     << "h1_norm_sq = " << format_double(gs.h1_norm_sq) << '\n'
     << "c_star = " << format_double(gs.c_star) << '\n'
     << "eta = " << format_double(gs.eta) << '\n'
     << "pohozaev_residual = " << format_double(gs.pohozaev_residual) << '\n'
     << "equation_residual = " << format_double(gs.equation_residual) << '\n'
     << "iterations = " << gs.iterations << '\n';
  return os.str();
}

void write_ground_state(const GroundState& gs, const std::string& checkpoint_path, const std::string& sidecar_path) {
  State s;
  s.t = 0.0;
  s.v = gs.phi;
  s.params.alpha = gs.alpha;
  s.params.beta = -1;
  s.params.nonlinearity = Nonlinearity::power;
  write_checkpoint(checkpoint_path, s);
  std::ofstream os(sidecar_path);
  if (!os) fail(ErrorCode::io, "cannot open '" + sidecar_path + "' for writing");
  os << sidecar_text(gs);
  if (!os) fail(ErrorCode::io, "failed writing '" + sidecar_path + "'");
}

GroundState read_ground_state(const std::string& checkpoint_path) {
  const State s = read_checkpoint(checkpoint_path);
  return analyze_ground_state(real_field(s.v), s.params.alpha);
}

}  // namespace gbq

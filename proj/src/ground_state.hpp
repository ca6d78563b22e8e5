#pragma once

#include <optional>
#include <string>

#include "errors.hpp"
#include "spectral.hpp"

namespace gbq {

/// Positive radial solution of -Delta phi + phi = |phi|^{alpha-1} phi on the box,
/// with the sharp Sobolev constants derived from it.
struct GroundState {
  Field phi;  // real, physical
  double alpha = 3.0;
  int dim = 1;
  double h1_norm_sq = 0.0;
  double c_star = 0.0;
  double eta = 0.0;
  double static_energy = 0.0;      // E(phi), should equal eta
  double pohozaev_residual = 0.0;  // |H1^2 - L^{a+1}^{a+1}| / H1^2
  double equation_residual = 0.0;  // ||-Delta phi + phi - phi^a||_2 / ||phi||_2
  int iterations = 0;

  double threshold_energy() const { return eta; }
  /// C*^{-(alpha+1)/(alpha-1)} = ||phi||_{H1}.
  double threshold_norm() const;
};

struct PetviashviliOptions {
  double tol = 1e-12;
  int max_iter = 5000;
  std::optional<Field> init;
};

class NotConverged : public Error {
 public:
  NotConverged(Field last, double change, int iterations, const std::string& what)
      : Error(ErrorCode::not_converged, what), last_(std::move(last)), change_(change), iterations_(iterations) {}
  const Field& last_iterate() const { return last_; }
  double last_change() const { return change_; }
  int iterations() const { return iterations_; }

 private:
  Field last_;
  double change_;
  int iterations_;
};

/// Largest admissible alpha for the dimension ((d+2)/(d-2) for d >= 3, unbounded below).
double alpha_upper_bound(int d);

/// phi <- m^gamma (1-Delta)^{-1}(|phi|^{alpha-1} phi), m = <(1-Delta)phi, phi>/<|phi|^{alpha-1}phi, phi>,
/// gamma = alpha/(alpha-1); stops when the sup-norm change is at most tol.
GroundState petviashvili(GridPtr grid, double alpha, const PetviashviliOptions& opts = {});

struct SharpConstants {
  double c_star = 0.0;
  double eta = 0.0;
};
SharpConstants constants_from_phi(const Field& phi, double alpha);

/// Fills the derived fields of a ground state from phi and alpha.
GroundState analyze_ground_state(Field phi, double alpha, int iterations = 0);

/// Default box sides: 80 (d=1), 40 (d=2), 30 (d=3).
double default_ground_state_box(int d);

/// Checkpoint (v = phi, ut = 0) plus key = value sidecar.
void write_ground_state(const GroundState& gs, const std::string& checkpoint_path, const std::string& sidecar_path);
GroundState read_ground_state(const std::string& checkpoint_path);
std::string sidecar_text(const GroundState& gs);

}  // namespace gbq

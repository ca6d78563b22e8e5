#pragma once

#include <string>
#include <vector>

#include "run_config.hpp"

namespace gbq {

/// What a subcommand produced. Files named in the arguments are already written.
struct CommandResult {
  std::string summary;
  std::string csv;
  std::string csv_path;  // where the CSV was written, empty if nowhere
  bool contradiction = false;
};

struct GroundStateArgs {
  double alpha = 3.0;
  int dim = 1;
  double box = 0.0;  // 0: default for the dimension
  int points = 0;    // 0: 2048, 256 or 128 for d = 1, 2, 3
  double tol = 1e-12;
  int max_iter = 5000;
  std::string out;  // checkpoint path; the sidecar goes to out + ".txt"
};
CommandResult ground_state_command(const GroundStateArgs& args);

/// Runs the configured evolution; the summary starts with "OUTCOME=<status> t=<time>".
CommandResult evolve_command(const RunConfig& cfg);

struct ClassifyArgs {
  std::string ground_state_path;  // overrides initial.ground_state; empty computes one on the run grid
  bool confirm = false;
  std::string csv;  // diagnostics of the confirmation run
};
CommandResult classify_command(const RunConfig& cfg, const ClassifyArgs& args);

struct SweepArgs {
  int jobs = 1;
  bool timing = true;
  std::string csv;  // overrides output.csv of the sweep file
};
CommandResult sweep_command(const SweepConfig& cfg, const SweepArgs& args);

struct DecayArgs {
  int dim = 1;
  std::vector<double> shells{1.0};
  double width = 1.0;
  int points = 0;  // 0: 4096, 512, 128 for d = 1, 2, 3
  double box = 0.0;  // 0: 1024, 512, 128
  std::vector<double> times;  // empty: five geometric times in [wrap/8, wrap/2]
  std::string csv;
};
inline constexpr const char* kDecayHeader = "dim,shell,t,linf";
CommandResult decay_command(const DecayArgs& args);

inline constexpr const char* kMorawetzHeader = "R,t,morawetz,derivative,potential";
/// Radii override diagnostics.morawetz_R. The initial mean is always removed.
CommandResult morawetz_command(const RunConfig& cfg, const std::vector<double>& radii, const std::string& csv);

inline constexpr const char* kScatteringHeader = "quantity,t1,t2,value";
CommandResult scattering_command(const RunConfig& cfg, double horizon, const std::string& csv);

}  // namespace gbq

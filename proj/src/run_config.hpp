#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "experiments.hpp"

namespace gbq {

// Plain-text configuration: "[section]" headers followed by "key = value" lines.
// '#' starts a comment. Lists are comma separated. Every key belongs to a section.
//
//   [model]        alpha, beta, nonlinearity (power | quadratic | none)
//   [grid]         dim, points, box            (one value for all axes or one per axis)
//   [stepper]      dt, t_end, sample_every, blowup_factor, dealias
//   [initial]      profile (gaussian | cosine | ground_state), amplitude, width, modes,
//                  weights, mean_subtract, noise, noise_band, ground_state (checkpoint path)
//   [diagnostics]  morawetz_R (list), morawetz_profile (d3 | dge4)
//   [output]       csv, checkpoint
//   [run]          seed (for the noise perturbation)

struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

/// Splits text into entries; syntax errors carry the line number.
std::vector<ConfigEntry> parse_entries(const std::string& text);

struct RunConfig {
  ModelParams model;
  int dim = 1;
  std::vector<int> points{256};
  std::vector<double> box{6.283185307179586};
  StepperConfig stepper;
  InitialData init;
  std::string ground_state_path;
  std::vector<double> morawetz_R;
  MorawetzProfile morawetz_profile = MorawetzProfile::d3;
  std::string csv_path;
  std::string checkpoint_path;

  void validate() const;
  GridPtr make_grid() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
/// Canonical text: every key of every section in a fixed order, 17 significant digits.
std::string serialize(const RunConfig& cfg);
/// Sets "section.key" from its text form, as if it appeared in the file.
void set_config_value(RunConfig& cfg, const std::string& dotted_key, const std::string& value);

// Sweep description, same syntax:
//   [grid]     dim, points, box
//   [sweep]    alpha, beta, amplitude, profile (lists; an empty list gives no cells), confirm
//              alpha, beta and profile default to 3, -1 and ground_state; amplitude to empty
//   [initial]  width, modes, weights, mean_subtract, noise, noise_band
//   [stepper]  dt, t_end, sample_every, blowup_factor, dealias, probe_time, horizon_factor
//   [output]   csv
//   [run]      seed
struct SweepConfig {
  SweepSpec spec;
  std::string csv_path;
};

SweepConfig parse_sweep_config(const std::string& text);
SweepConfig load_sweep_config(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gbq

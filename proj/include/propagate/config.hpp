#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "propagate/grid.hpp"
#include "propagate/models.hpp"
#include "propagate/sim.hpp"

namespace propagate {

// Flat [section] key = value text. Section and key order preserved for the echo.
struct Ini {
  // section -> (key -> value); insertion order kept separately
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::vector<std::string> section_order;
  std::map<std::string, std::vector<std::string>> key_order;

  bool has(const std::string& sec, const std::string& key) const;
  std::string get(const std::string& sec, const std::string& key) const;
  void set(const std::string& sec, const std::string& key, const std::string& value);
  std::string serialize() const;
};

Ini parse_ini(const std::string& text);

struct IcSpec {
  std::string kind = "bump_h";  // bump_h | xi | xi_tilde | constant
  double amplitude = 1.0;
  double d = 1.0;
  double rho = 1.0;
  std::vector<double> constant;
};

struct AnalysisSpec {
  double epsilon = 0.2;
  double t_min = 0.0;             // defaults to t_end/2 when unset
  double level_fraction = 0.5;    // front level = fraction * u*_+
  double window_fraction = 0.4;
  double inner_offset = 5.0;      // systems spreading inner edge
  double tol_spreading = 0.0;     // defaults to 0.05 * u*_+
  double tol_annihilation = 0.0;  // defaults to 0.01 * u*_+
  double tol_attractivity = 0.0;  // defaults to 0.05 * u*_+
  double tol_sandwich = 1e-8;
  double tol_wave_tails = 1e-3;
};

struct WaveSpec {
  double z_min = -120.0;
  double z_max = 80.0;
  double dz = 0.1;
  double tol_steady = 1e-8;
  double t_max = 400.0;
};

struct SweepSpec {
  std::string parameter;  // "section.key"
  std::vector<double> values;
};

struct RunConfig {
  // model (exactly one of the two is active)
  bool is_cooperative = false;
  ScalarShiftModel scalar;
  CooperativeModel coop;
  std::string model_kind;

  Grid1D grid;
  double dt_requested = 0.0;
  double dt = 0.0;  // after adjustment
  double t_end = 0.0;
  int snapshot_stride = 1;
  Frame frame = Frame::lab;
  double blowup_guard = 1e8;

  IcSpec ic;
  AnalysisSpec analysis;
  WaveSpec wave;
  SweepSpec sweep;
  std::string out_dir = "out";

  // load-time metadata
  double c_star_plus_pred = 0.0;
  double c_star_minus_pred = 0.0;
  std::vector<std::string> adjustments;
  Ini ini;             // raw parsed config (for sweeps)
  std::string echo_text;
  std::string hash;
};

// Validates, fills defaults, adjusts dt (reaction bound, tau divisibility),
// enforces the domain margin, and computes the speed predictions for the echo.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

Field build_ic(const RunConfig& cfg);
SimConfig sim_config(const RunConfig& cfg);

}  // namespace propagate

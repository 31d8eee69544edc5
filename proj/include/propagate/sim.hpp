#pragma once

#include <vector>

#include "propagate/grid.hpp"
#include "propagate/models.hpp"

namespace propagate {

// How the delay history is seeded from the single-field ic.
//  constant_in_theta: phi(theta, .) = ic for all theta in [-tau, 0], read in
//    the integration frame (the comoving semiflow's own initial value).
//  lab_constant: the history is constant in the lab frame; in the comoving
//    frame slot theta becomes ic shifted by c*theta, so a comoving run is the
//    exact comoving picture of the lab run with the same ic.
enum class HistorySeed { constant_in_theta, lab_constant };

struct SimConfig {
  double dt = 0.01;
  double t_end = 1.0;
  Frame frame = Frame::lab;
  int snapshot_stride = 1;
  double blowup_guard = 1e8;
  HistorySeed history_seed = HistorySeed::constant_in_theta;
};

struct SimState {
  double t = 0.0;
  Field current;
  DelayHistory history;  // scalar delayed model only
};

// One Crank-Nicolson step of u_t = d u_xx per component, Neumann boundaries.
Field diffusion_step(const Field& f, const std::vector<double>& d_per_component, double dt);

// Crank-Nicolson step of u_t = d u_xx + a u_x (centered advection), Neumann
// boundaries. The comoving substep; a = 0 reduces to diffusion_step.
Field advection_diffusion_step(const Field& f, const std::vector<double>& d_per_component,
                               double advection, double dt);

SimState make_scalar_state(const ScalarShiftModel& model, const Field& ic, const SimConfig& cfg);
SimState make_cooperative_state(const Field& ic);

// Strang step of the delayed scalar model, lab or comoving frame.
void step_scalar_delay(SimState& state, const ScalarShiftModel& model, const SimConfig& cfg);
// Strang step of the cooperative system (static habitat).
void step_cooperative(SimState& state, const CooperativeModel& model, const SimConfig& cfg);

Trajectory run(const ScalarShiftModel& model, const Field& ic, const SimConfig& cfg);
Trajectory run(const CooperativeModel& model, const Field& ic, const SimConfig& cfg);

// Initial-condition builders: the compactly supported bump h, the plateau
// ramp xi_d, and the outward ramp xi~_{d,rho}.
double bump_h(double x);
double xi_d(double x, double d);
double xi_tilde(double x, double d, double rho);

Field ic_bump_h(const Grid1D& grid, double amplitude, int n_components = 1);
Field ic_xi(const Grid1D& grid, double d, int n_components = 1);
Field ic_xi_tilde(const Grid1D& grid, double d, double rho, int n_components = 1);
Field ic_constant(const Grid1D& grid, const std::vector<double>& value_per_component);

}  // namespace propagate

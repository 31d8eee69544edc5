#pragma once

#include <vector>

#include "propagate/grid.hpp"
#include "propagate/models.hpp"

namespace propagate {

// Comoving steady profile with residual and tail diagnostics. Tail windows
// are the outer 5% of interior cells, excluding 10 boundary cells per side.
struct WaveProfile {
  Field w;
  double speed = 0.0;
  double residual_sup = 0.0;
  std::vector<double> tail_plus;   // measured limit per component, right side
  std::vector<double> tail_minus;  // left side
  bool converged = false;
  bool oscillating = false;
  double time_used = 0.0;
};

// Long-time comoving relaxation from the constant supersolution
// r** = 1.05 * max(u*_+, u*_-) until sup|u(t+1)-u(t)| < tol_steady.
// ic_override replaces the default supersolution start when given.
WaveProfile solve_forced_wave(const ScalarShiftModel& model, const Grid1D& grid,
                              double tol_steady, double t_max,
                              const Field* ic_override = nullptr);

WaveProfile solve_steady_state(const CooperativeModel& model, const Grid1D& grid,
                               double tol_steady, double t_max,
                               const Field* ic_override = nullptr);

// sup over interior cells of |d W'' + c W' - mu W + mu f(z, W(z + c tau))|
// with second-order central differences.
double steady_residual(const WaveProfile& profile, const ScalarShiftModel& model);
// sup over interior cells of |D W'' + f(x, W)| componentwise.
double steady_residual(const WaveProfile& profile, const CooperativeModel& model);

}  // namespace propagate

#pragma once

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "propagate/errors.hpp"

namespace propagate {

// Uniform 1-D grid on [x_min, x_max], nodes x_i = x_min + i*dx.
struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  int n = 2;
  double dx = 1.0;

  double x(int i) const { return x_min + i * dx; }
};

Grid1D make_grid(double x_min, double x_max, int n);

inline bool same_grid(const Grid1D& a, const Grid1D& b) {
  return a.x_min == b.x_min && a.x_max == b.x_max && a.n == b.n;
}

// Values of an n_components-valued function on a grid. Component k of node i
// lives at values[k*n + i].
struct Field {
  Grid1D grid;
  int n_components = 1;
  std::vector<double> values;

  double& at(int k, int i) { return values[static_cast<size_t>(k) * grid.n + i]; }
  double at(int k, int i) const { return values[static_cast<size_t>(k) * grid.n + i]; }
  double* row(int k) { return values.data() + static_cast<size_t>(k) * grid.n; }
  const double* row(int k) const { return values.data() + static_cast<size_t>(k) * grid.n; }
};

Field make_field(const Grid1D& grid, int n_components);

// values[k][i] = fn(x_i)[k]; rejects non-finite samples.
Field sample_field(const Grid1D& grid,
                   const std::function<std::vector<double>(double)>& fn,
                   int n_components);
Field sample_scalar_field(const Grid1D& grid, const std::function<double(double)>& fn);

// output[i] = input evaluated at x_i + delta, by linear interpolation with
// constant extrapolation beyond the grid. Shifts by exact multiples of dx
// reduce to index copies, so they are exact and invertible on the interior.
Field shift_interpolate(const Field& field, double delta);

// Linear interpolation of one component at an arbitrary position (constant
// extrapolation outside the grid). Same kernel as shift_interpolate.
double eval_at(const Field& field, int component, double x);

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

// max over components and grid nodes inside the window of |a - b|.
double sup_distance(const Field& a, const Field& b, Window window);

// Ring buffer of the last m+1 states, tau = m*dt. Oldest slot is evicted on push.
struct DelayHistory {
  double dt = 0.0;
  double tau = 0.0;
  int m = 0;
  std::deque<Field> slots;  // oldest -> newest
};

DelayHistory make_history(const Field& ic, double dt, double tau);
void history_push(DelayHistory& hist, Field f);
// lag must be a stored multiple of dt in [0, tau]; at_lag(0) is the newest slot.
const Field& history_at_lag(const DelayHistory& hist, double lag);

enum class Frame { lab, comoving };

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> snapshots;
  std::string model_id;
  Frame frame = Frame::lab;
  // invariant monitor summary, filled by run()
  double min_value = 0.0;
  double max_value = 0.0;
  double boundary_activity = 0.0;  // max |u| over the outer 10 cells at the final time
};

}  // namespace propagate

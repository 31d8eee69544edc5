#include "propagate/grid.hpp"

#include <cmath>

namespace propagate {

Grid1D make_grid(double x_min, double x_max, int n) {
  if (!(x_min < x_max)) throw ConfigError("make_grid: inverted bounds (x_min >= x_max)");
  if (n < 3) throw ConfigError("make_grid: need at least 3 points");
  Grid1D g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n = n;
  g.dx = (x_max - x_min) / (n - 1);
  return g;
}

Field make_field(const Grid1D& grid, int n_components) {
  Field f;
  f.grid = grid;
  f.n_components = n_components;
  f.values.assign(static_cast<size_t>(n_components) * grid.n, 0.0);
  return f;
}

Field sample_field(const Grid1D& grid, const std::function<std::vector<double>(double)>& fn,
                   int n_components) {
  Field f = make_field(grid, n_components);
  for (int i = 0; i < grid.n; ++i) {
    const std::vector<double> v = fn(grid.x(i));
    for (int k = 0; k < n_components; ++k) {
      if (!std::isfinite(v[k]))
        throw NumericError("sample_field: non-finite sample at x=" + std::to_string(grid.x(i)));
      f.at(k, i) = v[k];
    }
  }
  return f;
}

Field sample_scalar_field(const Grid1D& grid, const std::function<double(double)>& fn) {
  return sample_field(
      grid, [&](double x) { return std::vector<double>{fn(x)}; }, 1);
}

namespace {

// Interpolation weights for position x on the grid, constant extrapolation.
// Near-node positions snap to the node so grid-multiple shifts stay exact.
inline void locate(const Grid1D& g, double x, int& j, double& alpha) {
  double t = (x - g.x_min) / g.dx;
  if (t <= 0.0) {
    j = 0;
    alpha = 0.0;
    return;
  }
  if (t >= g.n - 1) {
    j = g.n - 1;
    alpha = 0.0;
    return;
  }
  j = static_cast<int>(std::floor(t));
  alpha = t - j;
  const double snap = 1e-9;
  if (alpha < snap) {
    alpha = 0.0;
  } else if (alpha > 1.0 - snap) {
    alpha = 0.0;
    ++j;
  }
}

}  // namespace

Field shift_interpolate(const Field& field, double delta) {
  const Grid1D& g = field.grid;
  Field out = make_field(g, field.n_components);

  // integer-in-dx shifts reduce to index copies (exact)
  const double steps = delta / g.dx;
  const double rounded = std::round(steps);
  if (std::fabs(steps - rounded) < 1e-12 * std::max(1.0, std::fabs(rounded))) {
    const int s = static_cast<int>(rounded);
    for (int k = 0; k < field.n_components; ++k) {
      const double* in = field.row(k);
      double* o = out.row(k);
      for (int i = 0; i < g.n; ++i) {
        int j = i + s;
        if (j < 0) j = 0;
        if (j > g.n - 1) j = g.n - 1;
        o[i] = in[j];
      }
    }
    return out;
  }

  for (int k = 0; k < field.n_components; ++k) {
    const double* in = field.row(k);
    double* o = out.row(k);
    for (int i = 0; i < g.n; ++i) {
      int j;
      double alpha;
      locate(g, g.x(i) + delta, j, alpha);
      o[i] = (alpha == 0.0) ? in[j] : (1.0 - alpha) * in[j] + alpha * in[j + 1];
    }
  }
  return out;
}

double eval_at(const Field& field, int component, double x) {
  int j;
  double alpha;
  locate(field.grid, x, j, alpha);
  const double* in = field.row(component);
  return (alpha == 0.0) ? in[j] : (1.0 - alpha) * in[j] + alpha * in[j + 1];
}

double sup_distance(const Field& a, const Field& b, Window window) {
  if (!same_grid(a.grid, b.grid) || a.n_components != b.n_components)
    throw ConfigError("sup_distance: fields must share one grid and component count");
  const Grid1D& g = a.grid;
  const double slack = 1e-12 * std::max(1.0, std::fabs(window.hi) + std::fabs(window.lo));
  double m = -1.0;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    if (x < window.lo - slack || x > window.hi + slack) continue;
    for (int k = 0; k < a.n_components; ++k)
      m = std::max(m, std::fabs(a.at(k, i) - b.at(k, i)));
  }
  if (m < 0.0) throw ConfigError("sup_distance: window contains no grid points");
  return m;
}

DelayHistory make_history(const Field& ic, double dt, double tau) {
  if (dt <= 0.0) throw ConfigError("DelayHistory: dt must be positive");
  DelayHistory h;
  h.dt = dt;
  h.tau = tau;
  const double ratio = tau / dt;
  h.m = static_cast<int>(std::round(ratio));
  if (std::fabs(ratio - h.m) > 1e-9)
    throw ConfigError("DelayHistory: tau must be an integer multiple of dt");
  h.slots.assign(static_cast<size_t>(h.m) + 1, ic);
  return h;
}

void history_push(DelayHistory& hist, Field f) {
  hist.slots.push_back(std::move(f));
  while (static_cast<int>(hist.slots.size()) > hist.m + 1) hist.slots.pop_front();
}

const Field& history_at_lag(const DelayHistory& hist, double lag) {
  const double ratio = lag / hist.dt;
  const int k = static_cast<int>(std::round(ratio));
  if (std::fabs(ratio - k) > 1e-9 || k < 0 || k > hist.m)
    throw ConfigError("history_at_lag: lag not on the stored dt grid");
  return hist.slots[hist.slots.size() - 1 - k];
}

}  // namespace propagate

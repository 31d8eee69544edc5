#include "propagate/waves.hpp"

#include <algorithm>
#include <cmath>

#include "propagate/sim.hpp"

namespace propagate {

namespace {

// outer 5% of interior cells per side, 10 boundary cells excluded
struct TailWindows {
  int left_lo, left_hi, right_lo, right_hi;  // inclusive index ranges
};

TailWindows tail_windows(int n) {
  const int skip = 10;
  const int interior = n - 2 * skip;
  if (interior < 40) throw ConfigError("wave grid too small for tail windows");
  const int k = std::max(1, static_cast<int>(0.05 * interior));
  return {skip, skip + k - 1, n - skip - k, n - skip - 1};
}

std::vector<double> window_mean(const Field& f, int lo, int hi) {
  std::vector<double> m(f.n_components, 0.0);
  for (int k = 0; k < f.n_components; ++k) {
    double s = 0.0;
    for (int i = lo; i <= hi; ++i) s += f.at(k, i);
    m[k] = s / (hi - lo + 1);
  }
  return m;
}

double sup_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i)
    m = std::max(m, std::fabs(a.values[i] - b.values[i]));
  return m;
}

// Relaxation loop shared by the scalar and cooperative solvers. Advances in
// whole time units and stops when sup|u(t+1) - u(t)| < tol_steady.
template <typename StepFn>
WaveProfile relax(double dt, double tol_steady, double t_max, StepFn step, SimState st,
                  double speed) {
  WaveProfile wp;
  wp.speed = speed;

  const long per_unit = std::lround(1.0 / dt);
  Field prev = st.current;
  Field prev2 = st.current;
  double drift = 1e300, drift_prev = 1e300;
  double t = 0.0;
  while (t < t_max - 0.5) {
    prev2 = prev;
    prev = st.current;
    for (long k = 0; k < per_unit; ++k) step(st);
    t = st.t;
    drift_prev = drift;
    drift = sup_diff(st.current, prev);
    if (drift < tol_steady) {
      wp.converged = true;
      break;
    }
  }
  // period-2 stall: consecutive states keep moving but every other state agrees
  if (!wp.converged && drift > tol_steady &&
      sup_diff(st.current, prev2) < 0.25 * std::min(drift, drift_prev))
    wp.oscillating = true;

  wp.w = st.current;
  wp.time_used = t;

  const TailWindows tw = tail_windows(st.current.grid.n);
  wp.tail_minus = window_mean(st.current, tw.left_lo, tw.left_hi);
  wp.tail_plus = window_mean(st.current, tw.right_lo, tw.right_hi);
  return wp;
}

// dt satisfying the reaction bound, the monotone range of the split
// Crank-Nicolson substeps (dt <= 2 dx^2 / d), and tau divisibility
double wave_dt(double lipschitz, double tau, double dx, double d_max) {
  double dt = std::min({0.025, 0.1 / std::max(lipschitz, 1e-6), 2.0 * dx * dx / d_max});
  if (tau > 0.0) {
    const int m = std::max(1, static_cast<int>(std::ceil(tau / dt - 1e-12)));
    dt = tau / m;
  }
  return dt;
}

double scalar_lipschitz(const ScalarShiftModel& model) {
  // mu * max |df/du| sampled over the box and the habitat transition
  double lf = 0.0;
  const double span = 20.0 * model.transition_width;
  const double h = 1e-6 * std::max(1.0, model.cap);
  for (int is = 0; is <= 40; ++is) {
    const double s = -span + 2.0 * span * is / 40.0;
    for (int iu = 0; iu <= 40; ++iu) {
      const double u = 1.05 * model.cap * iu / 40.0;
      lf = std::max(lf, std::fabs(model.f(s, u + h) - model.f(s, u)) / h);
    }
  }
  return model.mu * std::max(1.0, lf);
}

double coop_lipschitz(const CooperativeModel& model) {
  double lf = 0.0;
  const double span = 20.0 * model.transition_width;
  const int n = model.n_components;
  std::vector<double> u(n), fp(n), fm(n);
  for (int is = 0; is <= 30; ++is) {
    const double x = -span + 2.0 * span * is / 30.0;
    for (int iu = 0; iu <= 30; ++iu) {
      for (int k = 0; k < n; ++k) u[k] = 1.05 * model.cap[k] * iu / 30.0;
      for (int col = 0; col < n; ++col) {
        std::vector<double> up(u), um(u);
        up[col] += 1e-6;
        um[col] = std::max(0.0, um[col] - 1e-6);
        model.f(x, up.data(), fp.data());
        model.f(x, um.data(), fm.data());
        double colsum = 0.0;
        for (int r = 0; r < n; ++r)
          colsum += std::fabs(fp[r] - fm[r]) / (up[col] - um[col]);
        lf = std::max(lf, colsum);
      }
    }
  }
  return std::max(1.0, lf);
}

}  // namespace

WaveProfile solve_forced_wave(const ScalarShiftModel& model, const Grid1D& grid,
                              double tol_steady, double t_max, const Field* ic_override) {
  const double r_star_star = 1.05 * std::max(model.u_star_plus, model.u_star_minus);
  Field ic = ic_override ? *ic_override : ic_constant(grid, {r_star_star});
  if (!same_grid(ic.grid, grid)) throw ConfigError("solve_forced_wave: ic grid mismatch");

  SimConfig cfg;
  cfg.dt = wave_dt(scalar_lipschitz(model), model.tau, grid.dx, model.d);
  cfg.frame = Frame::comoving;
  cfg.blowup_guard = 1e8;

  SimState st = make_scalar_state(model, ic, cfg);
  WaveProfile wp = relax(
      cfg.dt, tol_steady, t_max,
      [&](SimState& s) { step_scalar_delay(s, model, cfg); }, std::move(st), model.c);
  wp.residual_sup = steady_residual(wp, model);
  return wp;
}

WaveProfile solve_steady_state(const CooperativeModel& model, const Grid1D& grid,
                               double tol_steady, double t_max, const Field* ic_override) {
  std::vector<double> start(model.n_components);
  for (int k = 0; k < model.n_components; ++k)
    start[k] = 1.05 * std::max(model.u_star_plus[k], model.u_star_minus[k]);
  Field ic = ic_override ? *ic_override : ic_constant(grid, start);
  if (!same_grid(ic.grid, grid)) throw ConfigError("solve_steady_state: ic grid mismatch");

  SimConfig cfg;
  cfg.dt = wave_dt(coop_lipschitz(model), 0.0, grid.dx,
                   *std::max_element(model.diffusivities.begin(), model.diffusivities.end()));
  cfg.frame = Frame::lab;
  cfg.blowup_guard = 1e8;

  SimState st = make_cooperative_state(ic);
  WaveProfile wp = relax(
      cfg.dt, tol_steady, t_max,
      [&](SimState& s) { step_cooperative(s, model, cfg); }, std::move(st), 0.0);
  wp.residual_sup = steady_residual(wp, model);
  return wp;
}

double steady_residual(const WaveProfile& profile, const ScalarShiftModel& model) {
  const Field& w = profile.w;
  const Grid1D& g = w.grid;
  if (g.n < 7) throw ConfigError("steady_residual: need at least 5 interior points");
  Field wsh = (model.tau > 0.0 && model.c != 0.0)
                  ? shift_interpolate(w, model.c * model.tau)
                  : w;
  double res = 0.0;
  for (int i = 1; i < g.n - 1; ++i) {
    const double wxx = (w.at(0, i - 1) - 2.0 * w.at(0, i) + w.at(0, i + 1)) / (g.dx * g.dx);
    const double wx = (w.at(0, i + 1) - w.at(0, i - 1)) / (2.0 * g.dx);
    const double r = model.d * wxx + model.c * wx - model.mu * w.at(0, i) +
                     model.mu * model.f(g.x(i), wsh.at(0, i));
    res = std::max(res, std::fabs(r));
  }
  return res;
}

double steady_residual(const WaveProfile& profile, const CooperativeModel& model) {
  const Field& w = profile.w;
  const Grid1D& g = w.grid;
  if (g.n < 7) throw ConfigError("steady_residual: need at least 5 interior points");
  const int n = model.n_components;
  std::vector<double> u(n), fu(n);
  double res = 0.0;
  for (int i = 1; i < g.n - 1; ++i) {
    for (int k = 0; k < n; ++k) u[k] = w.at(k, i);
    model.f(g.x(i), u.data(), fu.data());
    for (int k = 0; k < n; ++k) {
      const double wxx =
          (w.at(k, i - 1) - 2.0 * w.at(k, i) + w.at(k, i + 1)) / (g.dx * g.dx);
      res = std::max(res, std::fabs(model.diffusivities[k] * wxx + fu[k]));
    }
  }
  return res;
}

}  // namespace propagate

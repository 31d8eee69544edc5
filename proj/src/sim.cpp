#include "propagate/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace propagate {

namespace {

// Thomas solve of a tridiagonal system; diag/rhs are overwritten.
void solve_tridiagonal(std::vector<double>& sub, std::vector<double>& diag,
                       std::vector<double>& sup, std::vector<double>& rhs,
                       double* out, int n) {
  for (int i = 1; i < n; ++i) {
    if (std::fabs(diag[i - 1]) < 1e-300)
      throw NumericError("tridiagonal solve: zero pivot");
    const double m = sub[i] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  out[n - 1] = rhs[n - 1] / diag[n - 1];
  for (int i = n - 2; i >= 0; --i) out[i] = (rhs[i] - sup[i] * out[i + 1]) / diag[i];
}

struct StepScratch {
  std::vector<double> sub, diag, sup, rhs;
};

// One Crank-Nicolson step of u_t = d u_xx + a u_x with reflective (Neumann)
// boundaries; the advection term vanishes at the walls under reflection.
void advdiff_component(const double* in, double* out, int n, double dx, double d, double a,
                       double dt, StepScratch& s) {
  const double alpha = d * dt / (2.0 * dx * dx);
  const double beta = a * dt / (4.0 * dx);

  s.sub.assign(n, -(alpha - beta));
  s.diag.assign(n, 1.0 + 2.0 * alpha);
  s.sup.assign(n, -(alpha + beta));
  s.rhs.assign(n, 0.0);

  for (int i = 1; i < n - 1; ++i)
    s.rhs[i] = (alpha - beta) * in[i - 1] + (1.0 - 2.0 * alpha) * in[i] +
               (alpha + beta) * in[i + 1];

  // i = 0 and i = n-1: ghost reflection u_{-1} = u_1, u_n = u_{n-2}
  s.sup[0] = -2.0 * alpha;
  s.rhs[0] = (1.0 - 2.0 * alpha) * in[0] + 2.0 * alpha * in[1];
  s.sub[n - 1] = -2.0 * alpha;
  s.rhs[n - 1] = (1.0 - 2.0 * alpha) * in[n - 1] + 2.0 * alpha * in[n - 2];

  solve_tridiagonal(s.sub, s.diag, s.sup, s.rhs, out, n);
}

Field advdiff_field(const Field& f, const std::vector<double>& d_per_component,
                    double advection, double dt) {
  if (static_cast<int>(d_per_component.size()) != f.n_components)
    throw ConfigError("diffusion step: one diffusivity per component required");
  Field out = make_field(f.grid, f.n_components);
  StepScratch scratch;
  for (int k = 0; k < f.n_components; ++k)
    advdiff_component(f.row(k), out.row(k), f.grid.n, f.grid.dx, d_per_component[k],
                      advection, dt, scratch);
  return out;
}

void check_blowup(const Field& f, double t, double guard) {
  for (int k = 0; k < f.n_components; ++k) {
    const double* row = f.row(k);
    for (int i = 0; i < f.grid.n; ++i) {
      if (!std::isfinite(row[i]) || std::fabs(row[i]) > guard) {
        std::ostringstream os;
        os << "blowup guard tripped at t=" << t << ", x=" << f.grid.x(i) << ", component "
           << k << ", value " << row[i];
        throw NumericError(os.str());
      }
    }
  }
}

}  // namespace

Field diffusion_step(const Field& f, const std::vector<double>& d_per_component, double dt) {
  if (!(dt > 0.0)) throw ConfigError("diffusion_step: dt must be positive");
  return advdiff_field(f, d_per_component, 0.0, dt);
}

Field advection_diffusion_step(const Field& f, const std::vector<double>& d_per_component,
                               double advection, double dt) {
  if (!(dt > 0.0)) throw ConfigError("advection_diffusion_step: dt must be positive");
  return advdiff_field(f, d_per_component, advection, dt);
}

SimState make_scalar_state(const ScalarShiftModel& model, const Field& ic,
                           const SimConfig& cfg) {
  SimState st;
  st.t = 0.0;
  st.current = ic;
  st.history = make_history(ic, cfg.dt, model.tau);
  if (cfg.frame == Frame::comoving && cfg.history_seed == HistorySeed::lab_constant &&
      model.tau > 0.0 && model.c != 0.0) {
    // slot at lag k dt carries ic(z - c k dt), the comoving view of a history
    // that is constant in the lab frame
    const int m = st.history.m;
    for (int j = 0; j < m; ++j) {
      const double lag = (m - j) * cfg.dt;
      st.history.slots[j] = shift_interpolate(ic, -model.c * lag);
    }
  }
  return st;
}

SimState make_cooperative_state(const Field& ic) {
  SimState st;
  st.t = 0.0;
  st.current = ic;
  return st;
}

void step_scalar_delay(SimState& state, const ScalarShiftModel& model, const SimConfig& cfg) {
  const Grid1D& g = state.current.grid;
  const double dt = cfg.dt;
  const double adv = cfg.frame == Frame::comoving ? model.c : 0.0;
  const std::vector<double> dvec{model.d};
  const double mu = model.mu;

  Field u = advdiff_field(state.current, dvec, adv, 0.5 * dt);

  // habitat coordinate: static in the comoving frame, x - c t in the lab frame
  auto s_at = [&](int i, double t_eval) {
    return cfg.frame == Frame::comoving ? g.x(i) : g.x(i) - model.c * t_eval;
  };

  Field unew = make_field(g, 1);
  if (model.tau > 0.0) {
    // delayed forcing, frozen over the substep: stage 1 at t - tau, stage 2 at
    // the substep midpoint t + dt/2 - tau (mean of the two bracketing slots)
    const Field& lag0 = history_at_lag(state.history, model.tau);
    const Field& lag1 = history_at_lag(state.history, model.tau - dt);
    Field lag_mid = make_field(g, 1);
    for (int i = 0; i < g.n; ++i)
      lag_mid.at(0, i) = 0.5 * (lag0.at(0, i) + lag1.at(0, i));

    Field arg0 = lag0, arg_mid = lag_mid;
    if (cfg.frame == Frame::comoving && model.c != 0.0) {
      arg0 = shift_interpolate(lag0, model.c * model.tau);
      arg_mid = shift_interpolate(lag_mid, model.c * model.tau);
    }

    for (int i = 0; i < g.n; ++i) {
      const double ui = u.at(0, i);
      const double k1 = -mu * ui + mu * model.f(s_at(i, state.t), arg0.at(0, i));
      const double uh = ui + 0.5 * dt * k1;
      const double k2 =
          -mu * uh + mu * model.f(s_at(i, state.t + 0.5 * dt), arg_mid.at(0, i));
      unew.at(0, i) = ui + dt * k2;
    }
  } else {
    // no delay: genuine ODE in u, explicit midpoint
    for (int i = 0; i < g.n; ++i) {
      const double ui = u.at(0, i);
      const double k1 = -mu * ui + mu * model.f(s_at(i, state.t), ui);
      const double uh = ui + 0.5 * dt * k1;
      const double k2 = -mu * uh + mu * model.f(s_at(i, state.t + 0.5 * dt), uh);
      unew.at(0, i) = ui + dt * k2;
    }
  }

  state.current = advdiff_field(unew, dvec, adv, 0.5 * dt);
  state.t += dt;
  check_blowup(state.current, state.t, cfg.blowup_guard);
  history_push(state.history, state.current);
}

void step_cooperative(SimState& state, const CooperativeModel& model, const SimConfig& cfg) {
  const Grid1D& g = state.current.grid;
  const int nc = model.n_components;
  const double dt = cfg.dt;

  Field u = advdiff_field(state.current, model.diffusivities, 0.0, 0.5 * dt);

  Field unew = make_field(g, nc);
  std::vector<double> ui(nc), fu(nc), uh(nc);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    for (int k = 0; k < nc; ++k) ui[k] = u.at(k, i);
    model.f(x, ui.data(), fu.data());
    for (int k = 0; k < nc; ++k) uh[k] = ui[k] + 0.5 * dt * fu[k];
    model.f(x, uh.data(), fu.data());
    for (int k = 0; k < nc; ++k) unew.at(k, i) = ui[k] + dt * fu[k];
  }

  state.current = advdiff_field(unew, model.diffusivities, 0.0, 0.5 * dt);
  state.t += dt;
  check_blowup(state.current, state.t, cfg.blowup_guard);
}

namespace {

template <typename StepFn>
Trajectory run_impl(const Field& ic, const SimConfig& cfg, double cap_hint, StepFn step,
                    SimState st, const std::string& id, int n_components) {
  if (ic.n_components != n_components)
    throw ConfigError("run: ic component count does not match the model");
  for (double v : ic.values) {
    if (v < -1e-12 || !std::isfinite(v))
      throw ConfigError("run: initial condition must be nonnegative and finite");
    if (cap_hint > 0.0 && v > cap_hint * (1.0 + 1e-9) + 1e-9)
      throw ConfigError("run: initial condition exceeds the invariant box");
  }

  Trajectory traj;
  traj.model_id = id;
  traj.frame = cfg.frame;
  traj.times.push_back(0.0);
  traj.snapshots.push_back(ic);

  double vmin = 1e300, vmax = -1e300;
  auto monitor = [&](const Field& f) {
    for (double v : f.values) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  };
  monitor(ic);

  const long steps = std::lround(cfg.t_end / cfg.dt);
  for (long k = 1; k <= steps; ++k) {
    step(st);
    monitor(st.current);
    if (k % cfg.snapshot_stride == 0 || k == steps) {
      traj.times.push_back(st.t);
      traj.snapshots.push_back(st.current);
    }
  }

  traj.min_value = steps >= 0 ? vmin : 0.0;
  traj.max_value = vmax;
  const Field& last = traj.snapshots.back();
  double ba = 0.0;
  const int edge = std::min(10, last.grid.n / 2);
  for (int k = 0; k < last.n_components; ++k)
    for (int i = 0; i < edge; ++i) {
      ba = std::max(ba, std::fabs(last.at(k, i)));
      ba = std::max(ba, std::fabs(last.at(k, last.grid.n - 1 - i)));
    }
  traj.boundary_activity = ba;
  return traj;
}

}  // namespace

Trajectory run(const ScalarShiftModel& model, const Field& ic, const SimConfig& cfg) {
  SimState st = make_scalar_state(model, ic, cfg);
  return run_impl(
      ic, cfg, model.cap, [&](SimState& s) { step_scalar_delay(s, model, cfg); },
      std::move(st), model.id, 1);
}

Trajectory run(const CooperativeModel& model, const Field& ic, const SimConfig& cfg) {
  SimState st = make_cooperative_state(ic);
  const double cap_hint = *std::max_element(model.cap.begin(), model.cap.end());
  return run_impl(
      ic, cfg, cap_hint, [&](SimState& s) { step_cooperative(s, model, cfg); },
      std::move(st), model.id, model.n_components);
}

double bump_h(double x) {
  if (x >= -1.0 && x <= 1.0) return 1.0;
  if (x <= -2.0 || x >= 2.0) return 0.0;
  return x > 0.0 ? 2.0 - x : 2.0 + x;
}

double xi_d(double x, double d) {
  return std::max(0.0, std::min(1.0, d + 1.0 - std::fabs(x)));
}

double xi_tilde(double x, double d, double rho) {
  return std::min(rho, std::max(1.0, (rho - 1.0) * std::fabs(x) - rho * d + d + 1.0));
}

namespace {

Field sample_icon(const Grid1D& grid, int n_components,
                  const std::function<double(double)>& profile) {
  Field f = make_field(grid, n_components);
  for (int i = 0; i < grid.n; ++i) {
    const double v = profile(grid.x(i));
    for (int k = 0; k < n_components; ++k) f.at(k, i) = v;
  }
  return f;
}

}  // namespace

Field ic_bump_h(const Grid1D& grid, double amplitude, int n_components) {
  return sample_icon(grid, n_components, [&](double x) { return amplitude * bump_h(x); });
}

Field ic_xi(const Grid1D& grid, double d, int n_components) {
  if (!(d > 0.0)) throw ConfigError("ic_xi: need d > 0");
  return sample_icon(grid, n_components, [&](double x) { return xi_d(x, d); });
}

Field ic_xi_tilde(const Grid1D& grid, double d, double rho, int n_components) {
  if (!(d > 0.0)) throw ConfigError("ic_xi_tilde: need d > 0");
  if (rho < 1.0) throw ConfigError("ic_xi_tilde: need rho >= 1");
  return sample_icon(grid, n_components, [&](double x) { return xi_tilde(x, d, rho); });
}

Field ic_constant(const Grid1D& grid, const std::vector<double>& value_per_component) {
  Field f = make_field(grid, static_cast<int>(value_per_component.size()));
  for (int k = 0; k < f.n_components; ++k)
    for (int i = 0; i < grid.n; ++i) f.at(k, i) = value_per_component[k];
  return f;
}

}  // namespace propagate

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "propagate/models.hpp"
#include "propagate/sim.hpp"

using namespace propagate;

TEST_CASE("initial-condition builders match the defining formulas") {
  CHECK(bump_h(0.0) == 1.0);
  CHECK(bump_h(1.0) == 1.0);
  CHECK(bump_h(-1.0) == 1.0);
  CHECK(bump_h(2.0) == 0.0);
  CHECK(bump_h(-2.0) == 0.0);
  CHECK(bump_h(1.5) == doctest::Approx(0.5));
  CHECK(bump_h(-1.25) == doctest::Approx(0.75));

  CHECK(xi_d(0.0, 3.0) == 1.0);
  CHECK(xi_d(4.0, 3.0) == 0.0);
  CHECK(xi_d(3.5, 3.0) == doctest::Approx(0.5));

  CHECK(xi_tilde(0.0, 3.0, 2.0) == 1.0);
  CHECK(xi_tilde(4.0, 3.0, 2.0) == doctest::Approx(2.0));
  CHECK(xi_tilde(10.0, 3.0, 2.0) == doctest::Approx(2.0));
  CHECK(xi_tilde(-5.0, 3.0, 2.0) == doctest::Approx(2.0));

  Grid1D g = make_grid(-5, 5, 101);
  Field f = ic_bump_h(g, 0.25);
  CHECK(eval_at(f, 0, 0.0) == 0.25);
  CHECK_THROWS_AS(ic_xi_tilde(g, 1.0, 0.5), ConfigError);
  CHECK_THROWS_AS(ic_xi(g, -1.0), ConfigError);
}

TEST_CASE("diffusion step preserves constants and the discrete range (r <= 1)") {
  Grid1D g = make_grid(-3, 7, 501);
  Field c = ic_constant(g, {0.7});
  Field cd = diffusion_step(c, {2.3}, 0.05);
  for (int i = 0; i < g.n; ++i) CHECK(std::fabs(cd.at(0, i) - 0.7) < 1e-12);

  // rough random data, r = d dt / dx^2 = 0.8: monotone regime
  oracles::Lcg rng(31);
  Field f = sample_scalar_field(g, [&](double) { return rng.next(); });
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < g.n; ++i) {
    lo = std::min(lo, f.at(0, i));
    hi = std::max(hi, f.at(0, i));
  }
  const double dt = 0.8 * g.dx * g.dx / 1.0;
  Field fd = f;
  for (int k = 0; k < 20; ++k) fd = diffusion_step(fd, {1.0}, dt);
  for (int i = 0; i < g.n; ++i) {
    CHECK(fd.at(0, i) >= lo - 1e-12);
    CHECK(fd.at(0, i) <= hi + 1e-12);
  }
}

TEST_CASE("single cosine mode decays by the discrete Crank-Nicolson symbol") {
  const int n = 101;
  Grid1D g = make_grid(0.0, M_PI, n);
  const double k = 3.0;  // integer wavenumber: Neumann-compatible on [0, pi]
  Field u = sample_scalar_field(g, [&](double x) { return std::cos(k * x); });
  const double d = 0.7, dt = 0.01;
  Field u1 = diffusion_step(u, {d}, dt);

  const double kd2 = (2.0 - 2.0 * std::cos(k * g.dx)) / (g.dx * g.dx);
  const double discrete_symbol = (1.0 - 0.5 * d * kd2 * dt) / (1.0 + 0.5 * d * kd2 * dt);
  const double continuous_symbol = (1.0 - 0.5 * d * k * k * dt) / (1.0 + 0.5 * d * k * k * dt);

  for (int i = 0; i < g.n; ++i)
    CHECK(u1.at(0, i) == doctest::Approx(discrete_symbol * u.at(0, i)).epsilon(1e-12));
  // the discrete symbol is the continuous one up to O(dx^2)
  CHECK(std::fabs(discrete_symbol - continuous_symbol) < k * k * k * k * g.dx * g.dx * dt);
}

TEST_CASE("delayed scalar step reproduces a dense DDE oracle on constant data") {
  ScalarShiftModel m = builtin_shifted_logistic(0.5, 0.5, 1.0, 3.0, 1.0, 0.5, 0.0);
  Grid1D g = make_grid(-5, 5, 11);
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.frame = Frame::lab;
  const double u0 = 0.2;
  SimState st = make_scalar_state(m, ic_constant(g, {u0}), cfg);
  double worst = 0.0;
  for (int unit = 1; unit <= 10; ++unit) {
    for (int k = 0; k < 100; ++k) step_scalar_delay(st, m, cfg);
    const double ref = oracles::dde_reference(m, u0, unit, 1e-4);
    worst = std::max(worst, std::fabs(st.current.at(0, 5) - ref));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("equilibria are fixed points; zero stays exactly zero") {
  ScalarShiftModel m = builtin_shifted_logistic(1.0, 1.0, 1.0, 3.0, 1.0, 0.5, 0.0);
  Grid1D g = make_grid(-10, 10, 201);
  SimConfig cfg;
  cfg.dt = 0.025;
  cfg.frame = Frame::lab;

  SimState st = make_scalar_state(m, ic_constant(g, {m.u_star_plus}), cfg);
  for (int k = 0; k < 40; ++k) {
    Field before = st.current;
    step_scalar_delay(st, m, cfg);
    CHECK(sup_distance(before, st.current, {-10, 10}) < 1e-10);
  }

  SimState z = make_scalar_state(m, make_field(g, 1), cfg);
  for (int k = 0; k < 10; ++k) step_scalar_delay(z, m, cfg);
  for (int i = 0; i < g.n; ++i) CHECK(z.current.at(0, i) == 0.0);
}

TEST_CASE("cooperative step: fixed points, symmetry preservation, cap decay") {
  CooperativeModel m = builtin_cooperative_pair(0.25, 1.0, 0.25, 1.0, 0.3, 1.0, 1.0, 1.0);
  Grid1D g = make_grid(-20, 20, 201);
  SimConfig cfg;
  cfg.dt = 0.02;

  // u = u*_+ with f = f_+: freeze the habitat at its + limit
  CooperativeModel hom = m;
  hom.f = [&m](double, const double* u, double* out) { m.f_plus(u, out); };
  SimState st = make_cooperative_state(ic_constant(g, m.u_star_plus));
  for (int k = 0; k < 20; ++k) {
    Field before = st.current;
    step_cooperative(st, hom, cfg);
    CHECK(sup_distance(before, st.current, {-20, 20}) < 1e-10);
  }

  // symmetric data keep the two components equal
  SimState sym = make_cooperative_state(ic_bump_h(g, 0.5, 2));
  for (int k = 0; k < 50; ++k) step_cooperative(sym, m, cfg);
  for (int i = 0; i < g.n; ++i)
    CHECK(std::fabs(sym.current.at(0, i) - sym.current.at(1, i)) < 1e-13);

  // above the cap: strictly decreasing sup norm over a step (C4)
  std::vector<double> above{1.5 * m.cap[0], 1.5 * m.cap[1]};
  SimState big = make_cooperative_state(ic_constant(g, above));
  Field before = big.current;
  step_cooperative(big, m, cfg);
  for (int i = 0; i < g.n; ++i)
    for (int kk = 0; kk < 2; ++kk) CHECK(big.current.at(kk, i) < before.at(kk, i));
}

TEST_CASE("run: degenerate horizons, zero data, box invariance, monotone comparison") {
  ScalarShiftModel m = builtin_shifted_logistic(0.25, 1.0, 1.0, 3.0, 1.0, 0.5, 0.5);
  Grid1D g = make_grid(-40, 40, 401);
  SimConfig cfg;
  cfg.dt = 0.025;
  cfg.t_end = 0.0;
  Trajectory t0 = run(m, ic_bump_h(g, 1.0), cfg);
  CHECK(t0.snapshots.size() == 1);
  CHECK(t0.times[0] == 0.0);

  cfg.t_end = 10.0;
  cfg.snapshot_stride = 40;
  Trajectory tz = run(m, make_field(g, 1), cfg);
  CHECK(tz.max_value == 0.0);
  CHECK(tz.min_value == 0.0);

  Trajectory tb = run(m, ic_bump_h(g, 1.0), cfg);
  CHECK(tb.min_value >= -1e-12);
  CHECK(tb.max_value <= m.cap + 1e-8);
  CHECK(tb.times.back() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(tb.boundary_activity < 1e-6);  // fronts never reach the walls here

  // monotone comparison on ordered initial pairs
  oracles::Lcg rng(2024);
  for (int pair = 0; pair < 5; ++pair) {
    const double a1 = 0.2 + 0.5 * rng.next();
    const double a2 = a1 + (1.0 - a1) * rng.next();
    const double w1 = 1.0 + 3.0 * rng.next();
    Field lo = sample_scalar_field(g, [&](double x) { return a1 * bump_h(x / w1); });
    Field hi = sample_scalar_field(g, [&](double x) { return a2 * bump_h(x / w1); });
    Trajectory tl = run(m, lo, cfg);
    Trajectory th = run(m, hi, cfg);
    for (size_t s = 0; s < tl.snapshots.size(); ++s)
      for (int i = 0; i < g.n; ++i)
        CHECK(tl.snapshots[s].at(0, i) <= th.snapshots[s].at(0, i) + 1e-8);
  }

  CHECK_THROWS_AS(run(m, ic_constant(g, {-0.5}), cfg), ConfigError);
  CHECK_THROWS_AS(run(m, ic_constant(g, {2.0}), cfg), ConfigError);  // above the box
}

TEST_CASE("blowup guard aborts with a diagnostic") {
  ScalarShiftModel m = builtin_fisher();
  m.f = [](double, double u) { return u * (1.0 + u); };  // superlinear growth
  m.f_plus = [](double u) { return u * (1.0 + u); };
  m.f_minus = m.f_plus;
  m.cap = 1e9;
  Grid1D g = make_grid(-10, 10, 101);
  SimConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 400.0;
  cfg.blowup_guard = 1e4;
  CHECK_THROWS_WITH_AS(run(m, ic_constant(g, {1.0}), cfg), doctest::Contains("blowup"),
                       NumericError);
}

TEST_CASE("lab and comoving frames agree after shifting by ct") {
  ScalarShiftModel m = builtin_shifted_logistic(0.25, 1.0, 1.0, 3.0, 1.0, 0.5, 0.5);
  Grid1D g = make_grid(-60, 60, 1201);
  SimConfig lab;
  lab.dt = 0.02;
  lab.t_end = 10.0;
  lab.frame = Frame::lab;
  lab.snapshot_stride = 1 << 20;
  SimConfig com = lab;
  com.frame = Frame::comoving;
  com.history_seed = HistorySeed::lab_constant;

  Field ic = ic_bump_h(g, 1.0);
  Field ul = run(m, ic, lab).snapshots.back();
  Field uc = run(m, ic, com).snapshots.back();
  const double ct = m.c * 10.0;  // 5.0 = 50 dx, grid-aligned
  double worst = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double z = g.x(i);
    if (z < -40.0 || z > 40.0) continue;
    worst = std::max(worst, std::fabs(eval_at(ul, 0, z + ct) - uc.at(0, i)));
  }
  CHECK(worst < 5e-3);
}

TEST_CASE("halving dx and dt reduces the error against a fine reference by >= 3.5x") {
  ScalarShiftModel m = builtin_fisher();
  auto solve = [&](double dx, double dt) {
    const int n = static_cast<int>(std::lround(60.0 / dx)) + 1;
    Grid1D g = make_grid(-30, 30, n);
    SimConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 5.0;
    cfg.snapshot_stride = 1 << 20;
    return run(m, ic_bump_h(g, 1.0), cfg).snapshots.back();
  };
  Field coarse = solve(0.2, 0.04);
  Field mid = solve(0.1, 0.02);
  Field fine = solve(0.025, 0.005);
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i < coarse.grid.n; ++i)
    e1 = std::max(e1, std::fabs(coarse.at(0, i) - eval_at(fine, 0, coarse.grid.x(i))));
  for (int i = 0; i < mid.grid.n; ++i)
    e2 = std::max(e2, std::fabs(mid.at(0, i) - eval_at(fine, 0, mid.grid.x(i))));
  CHECK(e1 / e2 >= 3.5);
}

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "propagate/grid.hpp"
#include "propagate/sim.hpp"

using namespace propagate;

TEST_CASE("make_grid spacing and preconditions") {
  CHECK(make_grid(-1, 1, 5).dx == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(make_grid(0, 10, 101).dx == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS_AS(make_grid(1, 0, 10), ConfigError);
  CHECK_THROWS_AS(make_grid(0, 1, 2), ConfigError);
  Grid1D g = make_grid(-3, 3, 7);
  CHECK(g.x(0) == -3.0);
  CHECK(g.x(6) == 3.0);
}

TEST_CASE("sample_field values and finiteness") {
  Grid1D g = make_grid(-4, 4, 81);
  Field ones = sample_scalar_field(g, [](double) { return 1.0; });
  for (int i = 0; i < g.n; ++i) CHECK(ones.at(0, i) == 1.0);

  Field h = sample_scalar_field(g, [](double x) { return bump_h(x); });
  CHECK(eval_at(h, 0, 0.0) == 1.0);
  CHECK(eval_at(h, 0, 1.5) == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(
      sample_scalar_field(g, [](double x) { return x == 0.0 ? 1.0 / 0.0 : 0.0; }),
      NumericError);
}

TEST_CASE("shift_interpolate identity, exactness on affine data, constants") {
  Grid1D g = make_grid(-2, 2, 41);
  Field ramp = sample_scalar_field(g, [](double x) { return x; });

  Field same = shift_interpolate(ramp, 0.0);
  for (int i = 0; i < g.n; ++i) CHECK(same.at(0, i) == ramp.at(0, i));

  const double delta = 0.5 * g.dx;
  Field shifted = shift_interpolate(ramp, delta);
  for (int i = 1; i < g.n - 1; ++i)
    CHECK(shifted.at(0, i) == doctest::Approx(g.x(i) + delta).epsilon(1e-14));

  Field c = sample_scalar_field(g, [](double) { return 0.7; });
  for (double d : {-3.3, -0.017, 0.4, 10.0}) {
    Field cs = shift_interpolate(c, d);
    for (int i = 0; i < g.n; ++i) CHECK(cs.at(0, i) == 0.7);
  }
}

TEST_CASE("shift_interpolate grid-multiple round trip is exact on the interior") {
  Grid1D g = make_grid(-5, 5, 101);
  oracles::Lcg rng(42);
  Field f = sample_scalar_field(g, [&](double) { return rng.next(); });
  const int k = 7;
  Field back = shift_interpolate(shift_interpolate(f, k * g.dx), -k * g.dx);
  for (int i = k; i < g.n - k; ++i) CHECK(back.at(0, i) == f.at(0, i));
}

TEST_CASE("shift_interpolate never overshoots the input range") {
  Grid1D g = make_grid(0, 1, 33);
  oracles::Lcg rng(7);
  Field f = sample_scalar_field(g, [&](double) { return rng.next(); });
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < g.n; ++i) {
    lo = std::min(lo, f.at(0, i));
    hi = std::max(hi, f.at(0, i));
  }
  for (double d : {-0.513, -0.03, 0.0123, 0.21, 0.77}) {
    Field s = shift_interpolate(f, d);
    for (int i = 0; i < g.n; ++i) {
      CHECK(s.at(0, i) >= lo);
      CHECK(s.at(0, i) <= hi);
    }
  }
}

TEST_CASE("shift_interpolate moves every component of a vector field") {
  Grid1D g = make_grid(-2, 2, 41);
  Field f = make_field(g, 2);
  for (int i = 0; i < g.n; ++i) {
    f.at(0, i) = g.x(i);
    f.at(1, i) = 3.0 - 2.0 * g.x(i);
  }
  Field s = shift_interpolate(f, 0.3 * g.dx);
  for (int i = 1; i < g.n - 1; ++i) {
    const double xs = g.x(i) + 0.3 * g.dx;
    CHECK(s.at(0, i) == doctest::Approx(xs).epsilon(1e-13));
    CHECK(s.at(1, i) == doctest::Approx(3.0 - 2.0 * xs).epsilon(1e-13));
  }
}

TEST_CASE("sup_distance examples and window endpoint") {
  Grid1D g = make_grid(-4, 4, 81);
  Field a = sample_scalar_field(g, [](double x) { return x; });
  Field zero = make_field(g, 1);
  Field one = sample_scalar_field(g, [](double) { return 1.0; });

  CHECK(sup_distance(a, a, {-4, 4}) == 0.0);
  CHECK(sup_distance(one, zero, {-4, 4}) == 1.0);
  CHECK(sup_distance(a, zero, {0, 2}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(sup_distance(a, zero, {1.55, 1.58}), ConfigError);  // between nodes
}

TEST_CASE("sup_distance is a metric on a fixed window") {
  Grid1D g = make_grid(-1, 1, 21);
  oracles::Lcg rng(12345);
  auto rand_field = [&] { return sample_scalar_field(g, [&](double) { return rng.next(); }); };
  Field a = rand_field(), b = rand_field(), c = rand_field();
  Window w{-1, 1};
  CHECK(sup_distance(a, b, w) == sup_distance(b, a, w));
  CHECK(sup_distance(a, a, w) == 0.0);
  CHECK(sup_distance(a, c, w) <= sup_distance(a, b, w) + sup_distance(b, c, w) + 1e-15);
}

TEST_CASE("delay history push, lag access, fixed capacity") {
  Grid1D g = make_grid(0, 1, 5);
  const double dt = 0.1, tau = 0.3;
  Field f0 = sample_scalar_field(g, [](double) { return 0.0; });
  DelayHistory h = make_history(f0, dt, tau);
  CHECK(h.m == 3);
  CHECK(h.slots.size() == 4);

  Field f1 = sample_scalar_field(g, [](double) { return 1.0; });
  history_push(h, f1);
  CHECK(history_at_lag(h, 0.0).at(0, 0) == 1.0);

  // push m+1 distinct fields; the oldest stored is then the first pushed
  for (int k = 2; k <= 4; ++k)
    history_push(h, sample_scalar_field(g, [&](double) { return double(k); }));
  CHECK(h.slots.size() == 4);
  CHECK(history_at_lag(h, 3 * dt).at(0, 0) == 1.0);
  CHECK(history_at_lag(h, 0.0).at(0, 0) == 4.0);

  CHECK_THROWS_AS(history_at_lag(h, 0.5 * dt), ConfigError);

  for (int k = 0; k < 10; ++k) history_push(h, f1);
  CHECK(h.slots.size() == 4);

  CHECK_THROWS_AS(make_history(f0, 0.1, 0.25), ConfigError);  // tau not a multiple
}

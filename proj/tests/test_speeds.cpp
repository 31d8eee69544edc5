#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "propagate/speeds.hpp"

using namespace propagate;

TEST_CASE("principal root: closed forms, omega constant, residual") {
  CHECK(principal_root({-0.7, 0.3, 0.0}) == doctest::Approx(-0.4).epsilon(1e-15));
  CHECK(principal_root({1.3, 0.0, 2.0}) == 1.3);

  // z e^z = 1: the omega constant, cross-checked against a bisection oracle
  const double omega = oracles::bisect(
      [](double z) { return z - std::exp(-z); }, 0.0, 1.0);
  const double z = principal_root({0.0, 1.0, 1.0});
  CHECK(z == doctest::Approx(0.5671432904).epsilon(1e-9));
  CHECK(z == doctest::Approx(omega).epsilon(1e-12));
  CHECK(std::fabs(z - 0.0 - 1.0 * std::exp(-z)) < 1e-12);

  CHECK_THROWS_AS(principal_root({0.0, -1.0, 1.0}), ConfigError);
}

TEST_CASE("principal root is increasing in a and b") {
  oracles::Lcg rng(99);
  for (int k = 0; k < 40; ++k) {
    const double a = -3.0 + 6.0 * rng.next();
    const double b = 0.1 + 3.0 * rng.next();
    const double tau = 0.1 + rng.next();
    const double base = principal_root({a, b, tau});
    CHECK(principal_root({a + 0.1, b, tau}) > base);
    CHECK(principal_root({a, b + 0.1, tau}) > base);
  }
}

TEST_CASE("lambda_scalar: Fisher fiber values") {
  ScalarShiftModel fisher = builtin_fisher();
  CHECK(lambda_scalar(fisher, Side::plus, 1.0) ==
        doctest::Approx(std::exp(2.0)).epsilon(1e-12));
  // z(nu) = nu^2 + 1 > 0 near nu = 0: instability of the zero state
  CHECK(lambda_scalar(fisher, Side::plus, 1e-3) > 1.0);
  CHECK_THROWS_AS(lambda_scalar(fisher, Side::plus, 0.0), ConfigError);
}

TEST_CASE("matrix_exp: identity, diagonal, symmetric flip, series oracle") {
  Matrix z(2, 2);
  Matrix ez = matrix_exp(z);
  CHECK(ez(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ez(0, 1) == 0.0);

  Matrix d(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  Matrix ed = matrix_exp(d);
  CHECK(ed(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
  CHECK(ed(1, 1) == doctest::Approx(std::exp(2.0)).epsilon(1e-13));
  CHECK(std::fabs(ed(0, 1)) < 1e-15);

  Matrix flip(2, 2);
  flip(0, 1) = 1.0;
  flip(1, 0) = 1.0;
  Matrix ef = matrix_exp(flip);
  CHECK(ef(0, 0) == doctest::Approx(std::cosh(1.0)).epsilon(1e-13));
  CHECK(ef(0, 1) == doctest::Approx(std::sinh(1.0)).epsilon(1e-13));
  CHECK(ef(0, 0) == doctest::Approx(1.5430806348152437).epsilon(1e-12));
  CHECK(ef(0, 1) == doctest::Approx(1.1752011936438014).epsilon(1e-12));

  // random small-norm 3x3 against the raw power series
  oracles::Lcg rng(5);
  Matrix r(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = rng.next() - 0.5;
  Matrix er = matrix_exp(r);
  Matrix es = oracles::expm_series(r);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(er(i, j) == doctest::Approx(es(i, j)).epsilon(1e-12));

  CHECK_THROWS_AS(matrix_exp(Matrix(2, 3)), ConfigError);
}

TEST_CASE("perron: examples, row-sum bounds, residual, failures") {
  Matrix p(2, 2);
  p(0, 0) = 2;
  p(0, 1) = 1;
  p(1, 0) = 1;
  p(1, 1) = 2;
  PerronResult r = perron(p);
  CHECK(r.rho == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.v[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.v[1] == doctest::Approx(1.0).epsilon(1e-10));

  CHECK(perron(Matrix::identity(3)).rho == doctest::Approx(1.0));

  // exp([[-1,2],[2,-1]]) has Perron root e^1 (spectral mapping of {1,-3})
  Matrix a(2, 2);
  a(0, 0) = -1;
  a(0, 1) = 2;
  a(1, 0) = 2;
  a(1, 1) = -1;
  CHECK(perron(matrix_exp(a)).rho == doctest::Approx(std::exp(1.0)).epsilon(1e-12));

  CHECK_THROWS_AS(perron(Matrix(2, 2)), NumericError);  // zero matrix

  // rho between min and max row sums; residual within 1e-12 rho
  oracles::Lcg rng(17);
  for (int k = 0; k < 20; ++k) {
    Matrix q(3, 3);
    double rmin = 1e300, rmax = 0;
    for (int i = 0; i < 3; ++i) {
      double s = 0;
      for (int j = 0; j < 3; ++j) {
        q(i, j) = 0.05 + rng.next();
        s += q(i, j);
      }
      rmin = std::min(rmin, s);
      rmax = std::max(rmax, s);
    }
    PerronResult pr = perron(q);
    CHECK(pr.rho >= rmin - 1e-10);
    CHECK(pr.rho <= rmax + 1e-10);
    std::vector<double> qv = q * pr.v;
    for (int i = 0; i < 3; ++i) CHECK(std::fabs(qv[i] - pr.rho * pr.v[i]) <= 1e-12 * pr.rho);
  }
}

TEST_CASE("lambda_matrix: scalar fiber, cooperative pair, nu -> 0 limit") {
  CooperativeModel one;
  one.n_components = 1;
  one.diffusivities = {1.0};
  one.a_plus = Matrix(1, 1);
  one.a_plus(0, 0) = 1.0;
  one.a_minus = one.a_plus;
  one.analytic_limits = true;
  CHECK(lambda_matrix(one, Side::plus, 1.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-12));

  CooperativeModel pair = builtin_cooperative_pair(1, 1, 1, 1, 2.0, 1, 1, 1);
  CHECK(lambda_matrix(pair, Side::plus, 1.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-10));
  // nu -> 0: lambda -> e^{s(A)} = e
  CHECK(lambda_matrix(pair, Side::plus, 1e-6) == doctest::Approx(std::exp(1.0)).epsilon(1e-5));
}

TEST_CASE("spreading speeds: Fisher, cooperative pair, logistic defaults") {
  SpeedReport fisher = spreading_speed(builtin_fisher(), Side::plus);
  CHECK(fisher.c_star == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(fisher.nu_star == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fisher.samples.size() >= 200);

  CooperativeModel pair = builtin_cooperative_pair(1, 1, 1, 1, 2.0, 1, 1, 1);
  SpeedReport rp = spreading_speed(pair, Side::plus);
  CHECK(rp.c_star == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(rp.nu_star == doctest::Approx(1.0).epsilon(1e-6));
  REQUIRE(rp.perron_vector.size() == 2);
  CHECK(rp.perron_vector[0] > 0.0);
  CHECK(rp.perron_vector[1] > 0.0);
  CHECK(std::max(rp.perron_vector[0], rp.perron_vector[1]) == doctest::Approx(1.0));

  // logistic defaults, tau = 0: z(nu) = nu^2 - 3 + 4 = nu^2 + 1, c* = 2
  ScalarShiftModel logi = builtin_shifted_logistic(0.25, 1.0, 1.0, 3.0, 1.0, 0.0, 0.0);
  CHECK(spreading_speed(logi, Side::plus).c_star == doctest::Approx(2.0).epsilon(1e-7));
  // minus side: z = nu^2 + 0.25, c* = 1 at nu* = 0.5
  SpeedReport rm = spreading_speed(logi, Side::minus);
  CHECK(rm.c_star == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(rm.nu_star == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("scalar and matrix lambda agree for N=1, tau=0 on matched parameters") {
  ScalarShiftModel fisher = builtin_fisher();  // d=1, mu=1, b=2
  CooperativeModel one;
  one.n_components = 1;
  one.diffusivities = {1.0};
  one.a_plus = Matrix(1, 1);
  one.a_plus(0, 0) = fisher.mu * (fisher.b_plus - 1.0);  // net linear growth
  one.a_minus = one.a_plus;
  for (double nu : {0.2, 0.7, 1.0, 1.9, 4.0})
    CHECK(lambda_matrix(one, Side::plus, nu) ==
          doctest::Approx(lambda_scalar(fisher, Side::plus, nu)).epsilon(1e-10));
}

TEST_CASE("distinct diffusivities: lambda and c* against the symmetric 2x2 closed form") {
  // A + nu^2 D stays symmetric for the pair, so its Perron exponent is the
  // larger eigenvalue (tr/2 + sqrt(tr^2/4 - det)) in closed form
  CooperativeModel m = builtin_cooperative_pair(0.3, 0.9, 0.5, 1.2, 0.4, 1.0, 1.0, 2.3);
  auto log_lambda_oracle = [&](double nu, Side side) {
    const Matrix& a = side == Side::plus ? m.a_plus : m.a_minus;
    const double m00 = a(0, 0) + nu * nu * m.diffusivities[0];
    const double m11 = a(1, 1) + nu * nu * m.diffusivities[1];
    const double tr = m00 + m11, det = m00 * m11 - a(0, 1) * a(1, 0);
    return tr / 2.0 + std::sqrt(tr * tr / 4.0 - det);
  };
  for (double nu : {0.3, 0.7, 1.0, 1.8, 3.0})
    for (Side side : {Side::plus, Side::minus})
      CHECK(std::log(lambda_matrix(m, side, nu)) ==
            doctest::Approx(log_lambda_oracle(nu, side)).epsilon(1e-12));

  // minimize the closed form by golden section as an independent speed oracle
  for (Side side : {Side::plus, Side::minus}) {
    auto phi = [&](double nu) { return log_lambda_oracle(nu, side) / nu; };
    double lo = 1e-3, hi = 10.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = phi(x1), f2 = phi(x2);
    while (hi - lo > 1e-10) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = phi(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = phi(x2);
      }
    }
    SpeedReport r = spreading_speed(m, side);
    CHECK(r.c_star == doctest::Approx(phi(0.5 * (lo + hi))).epsilon(1e-8));
    CHECK(r.nu_star == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-5));
  }
}

TEST_CASE("KPP scaling: doubling d and the growth rate doubles c*") {
  ScalarShiftModel a = builtin_shifted_logistic(0.25, 1.0, 1.0, 3.0, 1.0, 0.0, 0.0);
  ScalarShiftModel b = builtin_shifted_logistic(0.5, 2.0, 1.0, 6.0, 2.0, 0.0, 0.0);
  const double ca = spreading_speed(a, Side::plus).c_star;
  const double cb = spreading_speed(b, Side::plus).c_star;
  CHECK(ca == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(cb == doctest::Approx(2.0 * ca).epsilon(1e-7));
}

TEST_CASE("degenerate linearization is rejected") {
  // hand-built model with f'(0) = 1: marginal, c* undefined through this path
  ScalarShiftModel m = builtin_fisher();
  m.b_plus = 1.0;
  CHECK_THROWS_AS(spreading_speed(m, Side::plus), NumericError);
}

TEST_CASE("lab and comoving frame speeds") {
  ScalarShiftModel logi = builtin_shifted_logistic(0.25, 1.0, 1.0, 3.0, 1.0, 0.0, 1.5);
  SpeedReport plus = spreading_speed(logi, Side::plus);
  SpeedReport minus = spreading_speed(logi, Side::minus);
  FrameSpeeds fs = lab_frame_speeds(logi, plus, minus);
  CHECK(fs.lab_right == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(fs.lab_left == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(fs.comoving_right == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(fs.comoving_left == doctest::Approx(2.5).epsilon(1e-7));

  // c = 0: comoving equals lab
  ScalarShiftModel still = builtin_shifted_logistic(0.25, 1.0, 1.0, 3.0, 1.0, 0.0, 0.0);
  FrameSpeeds f0 = lab_frame_speeds(still, plus, minus);
  CHECK(f0.comoving_right == f0.lab_right);
  CHECK(f0.comoving_left == f0.lab_left);

  // symmetric habitat: rightward equals leftward
  ScalarShiftModel sym = builtin_shifted_logistic(1.0, 1.0, 1.0, 3.0, 1.0, 0.0, 0.0);
  SpeedReport sp = spreading_speed(sym, Side::plus);
  SpeedReport sm = spreading_speed(sym, Side::minus);
  CHECK(sp.c_star == doctest::Approx(sm.c_star).epsilon(1e-10));
}

TEST_CASE("delayed speeds are below their tau=0 values") {
  ScalarShiftModel d0 = builtin_shifted_logistic(0.25, 1.0, 1.0, 3.0, 1.0, 0.0, 0.0);
  ScalarShiftModel d5 = builtin_shifted_logistic(0.25, 1.0, 1.0, 3.0, 1.0, 0.5, 0.0);
  const double c0 = spreading_speed(d0, Side::plus).c_star;
  const double c5 = spreading_speed(d5, Side::plus).c_star;
  CHECK(c0 == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(c5 < c0);
  // the minimizer satisfies the characteristic equation at 1e-12
  SpeedReport r = spreading_speed(d5, Side::plus);
  const double z = r.c_star * r.nu_star;  // log lambda at nu*
  const double g = z - (d5.d * r.nu_star * r.nu_star - d5.mu) -
                   d5.mu * d5.b_plus * std::exp(-z * d5.tau);
  CHECK(std::fabs(g) < 1e-10);
}

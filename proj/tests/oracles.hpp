#pragma once

// Test-side oracles, independent of the library's solution paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "propagate/matrix.hpp"
#include "propagate/models.hpp"

namespace oracles {

// deterministic LCG for reproducible pseudo-random test data
struct Lcg {
  uint64_t state;
  explicit Lcg(uint64_t seed) : state(seed) {}
  double next() {  // uniform in [0, 1)
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return (state >> 11) * (1.0 / 9007199254740992.0);
  }
};

// plain bisection; requires a sign change on [lo, hi]
inline double bisect(const std::function<double(double)>& g, double lo, double hi,
                     int iters = 200) {
  double glo = g(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((glo > 0) == (gm > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// power-series matrix exponential (no scaling): adequate for small norms
inline propagate::Matrix expm_series(const propagate::Matrix& a, int terms = 60) {
  propagate::Matrix result = propagate::Matrix::identity(a.rows());
  propagate::Matrix term = propagate::Matrix::identity(a.rows());
  for (int k = 1; k <= terms; ++k) {
    term = term * a * (1.0 / k);
    result = result + term;
  }
  return result;
}

// closed-form least squares slope and r^2
struct LsFit {
  double slope, intercept, r_squared;
};
inline LsFit least_squares(const std::vector<double>& t, const std::vector<double>& p) {
  const size_t n = t.size();
  double st = 0, sp = 0, stt = 0, stp = 0, spp = 0;
  for (size_t i = 0; i < n; ++i) {
    st += t[i];
    sp += p[i];
    stt += t[i] * t[i];
    stp += t[i] * p[i];
    spp += p[i] * p[i];
  }
  LsFit f{};
  f.slope = (n * stp - st * sp) / (n * stt - st * st);
  f.intercept = (sp - f.slope * st) / n;
  double ss_res = 0;
  for (size_t i = 0; i < n; ++i) {
    const double r = p[i] - (f.slope * t[i] + f.intercept);
    ss_res += r * r;
  }
  const double ss_tot = spp - sp * sp / n;
  f.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

// dense DDE reference: RK4 with linear interpolation into a fine history, for
// the spatially homogeneous equation u' = -mu u + mu f(u(t - tau))
inline double dde_reference(const propagate::ScalarShiftModel& m, double u0, double t_end,
                            double h) {
  const int nlag = static_cast<int>(std::lround(m.tau / h));
  std::vector<double> hist;
  for (int k = 0; k <= nlag; ++k) hist.push_back(u0);
  auto lag_at = [&](double tq) {
    const double idx = tq / h + nlag;
    if (idx <= 0) return hist.front();
    const int j = static_cast<int>(std::floor(idx));
    const double a = idx - j;
    if (j >= static_cast<int>(hist.size()) - 1) return hist.back();
    return (1 - a) * hist[j] + a * hist[j + 1];
  };
  auto f = [&](double u_lag, double u) { return -m.mu * u + m.mu * m.f(0.0, u_lag); };
  double u = u0;
  const long steps = std::lround(t_end / h);
  for (long k = 0; k < steps; ++k) {
    const double t = k * h;
    const double l1 = lag_at(t - m.tau);
    const double l2 = lag_at(t + h / 2 - m.tau);
    const double l4 = lag_at(t + h - m.tau);
    const double k1 = f(l1, u);
    const double k2 = f(l2, u + h / 2 * k1);
    const double k3 = f(l2, u + h / 2 * k2);
    const double k4 = f(l4, u + h * k3);
    u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    hist.push_back(u);
  }
  return u;
}

}  // namespace oracles

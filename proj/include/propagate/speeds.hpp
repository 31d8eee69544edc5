#pragma once

#include <utility>
#include <vector>

#include "propagate/matrix.hpp"
#include "propagate/models.hpp"

namespace propagate {

// Linearized delayed equation v' = a v + b v(t - tau) on an exponential fiber:
// a = d nu^2 - mu, b = mu f'_pm(0).
struct CharacteristicParams {
  double a = 0.0;
  double b = 0.0;  // >= 0
  double tau = 0.0;
};

// The unique real root of z = a + b exp(-z tau) (dominant characteristic root
// for nonnegative delayed feedback). |g(z)| < 1e-12 on return.
double principal_root(const CharacteristicParams& p);

// lambda_pm(nu) = exp(principal_root(d nu^2 - mu, mu b_pm, tau)).
double lambda_scalar(const ScalarShiftModel& model, Side side, double nu);

// e^A by scaling-and-squaring with a truncated Taylor series.
Matrix matrix_exp(const Matrix& a);

struct PerronResult {
  double rho = 0.0;
  std::vector<double> v;  // >> 0, sup-norm 1
};

// Power iteration; requires P >= 0 irreducible. Residual below 1e-12 * rho.
PerronResult perron(const Matrix& p);

// Perron root of exp(A_pm + nu^2 D).
double lambda_matrix(const CooperativeModel& model, Side side, double nu);

struct SpeedReport {
  Side side = Side::plus;
  double c_star = 0.0;
  double nu_star = 0.0;
  std::vector<std::pair<double, double>> samples;  // (nu, lambda(nu))
  std::vector<double> phis;                        // log lambda(nu) / nu per sample
  std::vector<double> perron_vector;               // systems only, at nu_star
};

// c*(+-inf) = inf_{nu>0} log lambda(nu) / nu: coarse log-spaced scan over
// [1e-3, 50] (200 points), unimodality asserted, golden-section refinement.
SpeedReport spreading_speed(const ScalarShiftModel& model, Side side);
SpeedReport spreading_speed(const CooperativeModel& model, Side side);

struct FrameSpeeds {
  double lab_right = 0.0;      // c*(inf)
  double lab_left = 0.0;       // c*(-inf)
  double comoving_right = 0.0; // c*(inf) - c
  double comoving_left = 0.0;  // c*(-inf) + c
};

FrameSpeeds lab_frame_speeds(const ScalarShiftModel& model, const SpeedReport& plus,
                             const SpeedReport& minus);

}  // namespace propagate

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "propagate/errors.hpp"
#include "propagate/matrix.hpp"

namespace propagate {

// Standing assumption labels used in diagnostics:
//   (B)    scalar reaction: f(s,0)=0, sublinear limits, invariant box
//   (B+-)  each limit f_pm is monostable with f'_pm(0) > 1 and a unique
//          positive period-two point (= the equilibrium u*_pm)
//   (C1-C4) systems: positive diffusivities, f(x,0)=0, cooperative Jacobian,
//          subhomogeneity with a cap vector M, f(x, aM) << 0 for a > 1
//   (C+-)  irreducible limit Jacobians with s(D_u f_pm(0)) > 0

enum class Side { plus, minus };

// Scalar model  u_t = d u_xx - mu u + mu f(x - c t, u(t - tau, x)).
// Reactions written as classical growth g(u) enter through f = u + g/mu.
struct ScalarShiftModel {
  double d = 1.0;    // diffusivity
  double mu = 1.0;   // decay rate
  double tau = 0.0;  // delay
  double c = 0.0;    // habitat shift speed

  std::function<double(double, double)> f;  // f(s, u), s = habitat coordinate
  std::function<double(double)> f_plus;     // limit s -> +inf
  std::function<double(double)> f_minus;    // limit s -> -inf

  double b_plus = 0.0;   // f_+'(0)
  double b_minus = 0.0;  // f_-'(0)
  double u_star_plus = 0.0;
  double u_star_minus = 0.0;
  double cap = 0.0;  // invariant box bound u_1*

  bool monotone_in_u = false;   // f(s,.) nondecreasing on R_+
  bool subhomogeneous = false;  // f(s, a u) >= a f(s, u) for a in [0,1]
  bool analytic_limits = true;  // b_pm stored analytically (built-ins)
  double transition_width = 1.0;

  std::string id;
};

// Cooperative system  u_t = D u_xx + f(x, u),  D = diag(d_k).
struct CooperativeModel {
  int n_components = 1;
  std::vector<double> diffusivities;

  std::function<void(double, const double*, double*)> f;  // f(x, u) -> out
  std::function<void(const double*, double*)> f_plus;
  std::function<void(const double*, double*)> f_minus;

  Matrix a_plus;   // D_u f_+(0)
  Matrix a_minus;  // D_u f_-(0)
  std::vector<double> u_star_plus;
  std::vector<double> u_star_minus;
  std::vector<double> cap;  // box bound M
  double alpha0 = 0.0;      // quasimonotonicity shift alpha_0*

  bool analytic_limits = true;
  double transition_width = 1.0;

  std::string id;
};

// f(s,u) = u + u*(beta(s)-u)/mu with a tanh transition beta_- -> beta_+.
// beta_plus == beta_minus gives a homogeneous habitat (e.g. the Fisher encoding).
ScalarShiftModel builtin_shifted_logistic(double beta_minus, double beta_plus, double w,
                                          double mu, double d, double tau, double c);

// f(s,u) = p(s) * u * exp(-u); non-monotone on R_+. Requires 1 < p < e^2.
ScalarShiftModel builtin_shifted_ricker(double p_minus, double p_plus, double w,
                                        double mu, double d, double tau, double c);

// Two-component cooperative system f_i = u_i*(beta_i(x)-u_i) + kappa*(u_j-u_i).
CooperativeModel builtin_cooperative_pair(double beta1_minus, double beta1_plus,
                                          double beta2_minus, double beta2_plus,
                                          double kappa, double w, double d1, double d2);

// u(1-u) growth with d = mu = 1, tau = 0, c = 0: the classical baseline.
ScalarShiftModel builtin_fisher();

// f'_pm(0): stored analytic value for built-ins, central finite differences
// (step 1e-6) otherwise.
double limit_derivative(const ScalarShiftModel& model, Side side);
// D_u f_pm(0); cooperativity of the result is checked (off-diagonals >= -1e-8).
Matrix limit_jacobian(const CooperativeModel& model, Side side);

// Scalar: solves f_pm(u) = u; system: solves f_pm(u) = 0. Damped Newton from
// the cap with bisection fallback (scalar); residual below 1e-12.
double positive_equilibrium(const ScalarShiftModel& model, Side side);
std::vector<double> positive_equilibrium(const CooperativeModel& model, Side side);

// alpha_0* = 1.1 * max(0, -min sampled diagonal Jacobian entry over R x [0,M]).
double alpha_star(const CooperativeModel& model, int n_samples);

struct AssumptionClause {
  std::string name;
  bool pass = true;
  double worst = 0.0;    // worst violation magnitude
  double where_x = 0.0;  // sample location of the worst violation
  double where_u = 0.0;
};

struct AssumptionReport {
  std::vector<AssumptionClause> clauses;
  bool all_pass = true;

  const AssumptionClause* find(const std::string& name) const;
};

// Samples the standing assumptions on deterministic low-discrepancy grids:
// f(.,0)=0, box mapping, monotonicity/cooperativity, subhomogeneity, the
// linear bound f <= f_u(.,0) u, and limit convergence.
AssumptionReport verify_assumptions(const ScalarShiftModel& model, int sample_budget);
AssumptionReport verify_assumptions(const CooperativeModel& model, int sample_budget);

// Tabulated custom reaction on a rectangular (s,u) grid, bilinear interpolation.
struct TabulatedReaction {
  std::vector<double> s_nodes;  // strictly increasing
  std::vector<double> u_nodes;  // strictly increasing, u_nodes[0] == 0
  std::vector<double> f;        // f[is*u_count + iu]

  double eval(double s, double u) const;
};

ScalarShiftModel make_tabulated_scalar_model(const TabulatedReaction& tab, double mu,
                                             double d, double tau, double c);

}  // namespace propagate

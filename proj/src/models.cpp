#include "propagate/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace propagate {

namespace {

constexpr double kFdStep = 1e-6;

// tanh transition between two limits, width w, centered at 0
inline double tanh_profile(double s, double lo, double hi, double w) {
  return lo + (hi - lo) * 0.5 * (1.0 + std::tanh(s / w));
}

// golden-ratio based low-discrepancy sequences (deterministic)
inline double weyl(int k, double irrational) {
  double v = k * irrational;
  return v - std::floor(v);
}
constexpr double kW1 = 0.6180339887498949;   // 1/phi
constexpr double kW2 = 0.7548776662466927;   // plastic-number based
constexpr double kW3 = 0.5698402909980532;

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ScalarShiftModel builtin_shifted_logistic(double beta_minus, double beta_plus, double w,
                                          double mu, double d, double tau, double c) {
  if (!(beta_minus > 0.0))
    throw ConfigError("shifted_logistic: need beta_minus > 0");
  if (!(beta_plus >= beta_minus))
    throw ConfigError("shifted_logistic: need beta_plus >= beta_minus");
  if (!(w > 0.0)) throw ConfigError("shifted_logistic: need w > 0");
  if (!(mu > 0.0) || !(d > 0.0)) throw ConfigError("shifted_logistic: need mu > 0 and d > 0");
  if (!(tau >= 0.0)) throw ConfigError("shifted_logistic: need tau >= 0");
  if (!(beta_plus < mu + beta_minus))
    throw ConfigError("shifted_logistic: box invariance needs beta_plus < mu + beta_minus");
  if (!(mu >= 2.0 * beta_plus - beta_minus))
    throw ConfigError(
        "shifted_logistic: monotonicity of f in u needs mu >= 2*beta_plus - beta_minus");

  ScalarShiftModel m;
  m.d = d;
  m.mu = mu;
  m.tau = tau;
  m.c = c;
  m.f = [=](double s, double u) {
    const double beta = tanh_profile(s, beta_minus, beta_plus, w);
    return u + u * (beta - u) / mu;
  };
  m.f_plus = [=](double u) { return u + u * (beta_plus - u) / mu; };
  m.f_minus = [=](double u) { return u + u * (beta_minus - u) / mu; };
  m.b_plus = 1.0 + beta_plus / mu;
  m.b_minus = 1.0 + beta_minus / mu;
  m.u_star_plus = beta_plus;
  m.u_star_minus = beta_minus;
  m.cap = beta_plus;
  m.monotone_in_u = true;
  m.subhomogeneous = true;
  m.analytic_limits = true;
  m.transition_width = w;
  m.id = "shifted_logistic(beta=[" + fmt(beta_minus) + "," + fmt(beta_plus) + "],w=" + fmt(w) +
         ",mu=" + fmt(mu) + ",d=" + fmt(d) + ",tau=" + fmt(tau) + ",c=" + fmt(c) + ")";
  return m;
}

ScalarShiftModel builtin_shifted_ricker(double p_minus, double p_plus, double w, double mu,
                                        double d, double tau, double c) {
  const double e2 = std::exp(2.0);
  if (!(1.0 < p_minus && p_minus <= p_plus && p_plus < e2))
    throw ConfigError("shifted_ricker: (B+-) period-two uniqueness not guaranteed outside 1 < p < e^2");
  if (!(w > 0.0) || !(mu > 0.0) || !(d > 0.0) || !(tau >= 0.0))
    throw ConfigError("shifted_ricker: need w, mu, d > 0 and tau >= 0");

  ScalarShiftModel m;
  m.d = d;
  m.mu = mu;
  m.tau = tau;
  m.c = c;
  m.f = [=](double s, double u) {
    const double p = tanh_profile(s, p_minus, p_plus, w);
    return p * u * std::exp(-u);
  };
  m.f_plus = [=](double u) { return p_plus * u * std::exp(-u); };
  m.f_minus = [=](double u) { return p_minus * u * std::exp(-u); };
  m.b_plus = p_plus;
  m.b_minus = p_minus;
  m.u_star_plus = std::log(p_plus);
  m.u_star_minus = std::log(p_minus);
  m.cap = std::max(p_plus / std::exp(1.0), std::log(p_plus));
  m.monotone_in_u = false;  // u e^{-u} is non-monotone on R_+
  m.subhomogeneous = true;
  m.analytic_limits = true;
  m.transition_width = w;
  m.id = "shifted_ricker(p=[" + fmt(p_minus) + "," + fmt(p_plus) + "],w=" + fmt(w) +
         ",mu=" + fmt(mu) + ",d=" + fmt(d) + ",tau=" + fmt(tau) + ",c=" + fmt(c) + ")";
  return m;
}

ScalarShiftModel builtin_fisher() {
  ScalarShiftModel m = builtin_shifted_logistic(1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0);
  m.id = "fisher";
  return m;
}

CooperativeModel builtin_cooperative_pair(double beta1_minus, double beta1_plus,
                                          double beta2_minus, double beta2_plus, double kappa,
                                          double w, double d1, double d2) {
  if (!(kappa > 0.0))
    throw ConfigError("cooperative_pair: kappa = 0 gives a reducible Jacobian; need kappa > 0");
  if (!(beta1_minus > 0.0 && beta1_plus >= beta1_minus && beta2_minus > 0.0 &&
        beta2_plus >= beta2_minus))
    throw ConfigError("cooperative_pair: betas must be positive with beta(+inf) >= beta(-inf)");
  if (!(w > 0.0) || !(d1 > 0.0) || !(d2 > 0.0))
    throw ConfigError("cooperative_pair: need w, d1, d2 > 0");

  CooperativeModel m;
  m.n_components = 2;
  m.diffusivities = {d1, d2};
  m.f = [=](double x, const double* u, double* out) {
    const double b1 = tanh_profile(x, beta1_minus, beta1_plus, w);
    const double b2 = tanh_profile(x, beta2_minus, beta2_plus, w);
    out[0] = u[0] * (b1 - u[0]) + kappa * (u[1] - u[0]);
    out[1] = u[1] * (b2 - u[1]) + kappa * (u[0] - u[1]);
  };
  m.f_plus = [=](const double* u, double* out) {
    out[0] = u[0] * (beta1_plus - u[0]) + kappa * (u[1] - u[0]);
    out[1] = u[1] * (beta2_plus - u[1]) + kappa * (u[0] - u[1]);
  };
  m.f_minus = [=](const double* u, double* out) {
    out[0] = u[0] * (beta1_minus - u[0]) + kappa * (u[1] - u[0]);
    out[1] = u[1] * (beta2_minus - u[1]) + kappa * (u[0] - u[1]);
  };
  m.a_plus = Matrix(2, 2);
  m.a_plus(0, 0) = beta1_plus - kappa;
  m.a_plus(0, 1) = kappa;
  m.a_plus(1, 0) = kappa;
  m.a_plus(1, 1) = beta2_plus - kappa;
  m.a_minus = Matrix(2, 2);
  m.a_minus(0, 0) = beta1_minus - kappa;
  m.a_minus(0, 1) = kappa;
  m.a_minus(1, 0) = kappa;
  m.a_minus(1, 1) = beta2_minus - kappa;

  // s(A) for a symmetric-coupling 2x2: largest eigenvalue
  auto stability_modulus = [](const Matrix& a) {
    const double tr = a(0, 0) + a(1, 1);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return tr / 2.0 + disc;
  };
  if (stability_modulus(m.a_plus) <= 0.0 || stability_modulus(m.a_minus) <= 0.0)
    throw ConfigError("cooperative_pair: (C+-) instability of 0 fails (s(A) <= 0)");

  // M = 2 * max beta componentwise-constant: f(x, alpha M) << 0 for alpha > 1
  const double bmax = std::max(std::max(beta1_plus, beta1_minus),
                               std::max(beta2_plus, beta2_minus));
  m.cap = {2.0 * bmax, 2.0 * bmax};
  m.u_star_plus = {};  // resolved via positive_equilibrium
  m.u_star_minus = {};
  m.analytic_limits = true;
  m.transition_width = w;
  m.id = "cooperative_pair(beta1=[" + fmt(beta1_minus) + "," + fmt(beta1_plus) + "],beta2=[" +
         fmt(beta2_minus) + "," + fmt(beta2_plus) + "],kappa=" + fmt(kappa) + ",w=" + fmt(w) +
         ",D=[" + fmt(d1) + "," + fmt(d2) + "])";

  m.u_star_plus = positive_equilibrium(m, Side::plus);
  m.u_star_minus = positive_equilibrium(m, Side::minus);
  m.alpha0 = alpha_star(m, 4000);
  return m;
}

double limit_derivative(const ScalarShiftModel& model, Side side) {
  if (model.analytic_limits) return side == Side::plus ? model.b_plus : model.b_minus;
  const auto& g = side == Side::plus ? model.f_plus : model.f_minus;
  return (g(kFdStep) - g(-kFdStep)) / (2.0 * kFdStep);
}

Matrix limit_jacobian(const CooperativeModel& model, Side side) {
  Matrix j(model.n_components, model.n_components);
  if (model.analytic_limits) {
    j = side == Side::plus ? model.a_plus : model.a_minus;
  } else {
    const auto& g = side == Side::plus ? model.f_plus : model.f_minus;
    const int n = model.n_components;
    std::vector<double> up(n, 0.0), um(n, 0.0), fp(n), fm(n);
    for (int col = 0; col < n; ++col) {
      std::fill(up.begin(), up.end(), 0.0);
      std::fill(um.begin(), um.end(), 0.0);
      up[col] = kFdStep;
      um[col] = -kFdStep;
      g(up.data(), fp.data());
      g(um.data(), fm.data());
      for (int r = 0; r < n; ++r) j(r, col) = (fp[r] - fm[r]) / (2.0 * kFdStep);
    }
  }
  for (int r = 0; r < model.n_components; ++r)
    for (int col = 0; col < model.n_components; ++col)
      if (r != col && j(r, col) < -1e-8)
        throw NumericError("limit_jacobian: (C3) violated, off-diagonal entry " +
                           fmt(j(r, col)));
  return j;
}

double positive_equilibrium(const ScalarShiftModel& model, Side side) {
  const auto& g = side == Side::plus ? model.f_plus : model.f_minus;
  auto h = [&](double u) { return g(u) - u; };  // root of f(u) = u

  // damped Newton from the cap
  double u = std::max(model.cap, 1e-3);
  bool newton_ok = false;
  for (int it = 0; it < 200; ++it) {
    const double hu = h(u);
    if (std::fabs(hu) < 1e-13 && u > 0.0) {
      newton_ok = true;
      break;
    }
    const double dh = (h(u + kFdStep) - h(u - kFdStep)) / (2.0 * kFdStep);
    if (dh == 0.0) break;
    double step = -hu / dh;
    double unew = u + step;
    int damp = 0;
    while ((unew <= 0.0 || std::fabs(h(unew)) > std::fabs(hu)) && damp < 60) {
      step *= 0.5;
      unew = u + step;
      ++damp;
    }
    if (damp >= 60) break;
    u = unew;
  }
  if (!(newton_ok && u > 0.0 && std::fabs(h(u)) < 1e-12)) {
    // bisection fallback on (0, 1.5*cap]
    double lo = 1e-12, hi = std::max(model.cap * 1.5, 1.0);
    if (h(lo) <= 0.0 || h(hi) >= 0.0) {
      // widen the search for a sign change
      bool found = false;
      double prev = lo, hprev = h(lo);
      for (int k = 1; k <= 2000; ++k) {
        const double x = hi * k / 2000.0;
        const double hx = h(x);
        if (hprev > 0.0 && hx <= 0.0) {
          lo = prev;
          hi = x;
          found = true;
          break;
        }
        prev = x;
        hprev = hx;
      }
      if (!found) throw NumericError("positive_equilibrium: equilibrium not found (no sign change)");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (h(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    u = 0.5 * (lo + hi);
    if (std::fabs(h(u)) > 1e-12)
      throw NumericError("positive_equilibrium: residual " + fmt(std::fabs(h(u))) +
                         " above 1e-12");
  }
  return u;
}

std::vector<double> positive_equilibrium(const CooperativeModel& model, Side side) {
  const auto& g = side == Side::plus ? model.f_plus : model.f_minus;
  const int n = model.n_components;
  std::vector<double> u = model.cap;  // start from the cap
  std::vector<double> fu(n), fp(n), fm(n);

  auto residual = [&](const std::vector<double>& v) {
    g(v.data(), fu.data());
    double r = 0.0;
    for (int i = 0; i < n; ++i) r = std::max(r, std::fabs(fu[i]));
    return r;
  };

  for (int it = 0; it < 400; ++it) {
    const double r0 = residual(u);
    if (r0 < 1e-13) break;
    // finite-difference Jacobian of f at u
    Matrix j(n, n);
    std::vector<double> up(u), um(u);
    for (int col = 0; col < n; ++col) {
      up = u;
      um = u;
      up[col] += kFdStep;
      um[col] -= kFdStep;
      g(up.data(), fp.data());
      g(um.data(), fm.data());
      for (int r = 0; r < n; ++r) j(r, col) = (fp[r] - fm[r]) / (2.0 * kFdStep);
    }
    g(u.data(), fu.data());
    // solve j * step = -fu by Gaussian elimination with partial pivoting
    Matrix a = j;
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = -fu[i];
    for (int col = 0; col < n; ++col) {
      int piv = col;
      for (int r = col + 1; r < n; ++r)
        if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
      if (std::fabs(a(piv, col)) < 1e-14)
        throw NumericError("positive_equilibrium: singular Jacobian");
      if (piv != col) {
        for (int cc = 0; cc < n; ++cc) std::swap(a(col, cc), a(piv, cc));
        std::swap(rhs[col], rhs[piv]);
      }
      for (int r = col + 1; r < n; ++r) {
        const double fct = a(r, col) / a(col, col);
        for (int cc = col; cc < n; ++cc) a(r, cc) -= fct * a(col, cc);
        rhs[r] -= fct * rhs[col];
      }
    }
    std::vector<double> step(n);
    for (int r = n - 1; r >= 0; --r) {
      double s = rhs[r];
      for (int cc = r + 1; cc < n; ++cc) s -= a(r, cc) * step[cc];
      step[r] = s / a(r, r);
    }
    // damping: keep u positive and the residual decreasing
    double lam = 1.0;
    std::vector<double> trial(n);
    for (int damp = 0; damp < 60; ++damp) {
      bool pos = true;
      for (int i = 0; i < n; ++i) {
        trial[i] = u[i] + lam * step[i];
        if (trial[i] <= 0.0) pos = false;
      }
      if (pos && residual(trial) < r0) break;
      lam *= 0.5;
      if (damp == 59)
        throw NumericError("positive_equilibrium: Newton divergence (damping exhausted)");
    }
    u = trial;
  }
  if (residual(u) > 1e-12)
    throw NumericError("positive_equilibrium: residual above 1e-12");
  for (double v : u)
    if (!(v > 0.0)) throw NumericError("positive_equilibrium: equilibrium not strictly positive");
  return u;
}

double alpha_star(const CooperativeModel& model, int n_samples) {
  const int n = model.n_components;
  const double span = 30.0 * model.transition_width;
  std::vector<double> u(n), fp(n), fm(n);
  double min_diag = 0.0;

  auto probe_diag = [&](double x, const std::vector<double>& v) {
    for (int i = 0; i < n; ++i) {
      std::vector<double> up(v), um(v);
      up[i] += kFdStep;
      um[i] = std::max(0.0, um[i] - kFdStep);
      model.f(x, up.data(), fp.data());
      model.f(x, um.data(), fm.data());
      const double dii = (fp[i] - fm[i]) / (up[i] - um[i]);
      if (!std::isfinite(dii)) throw NumericError("alpha_star: unbounded sampled Jacobian");
      min_diag = std::min(min_diag, dii);
    }
  };

  for (int k = 0; k < n_samples; ++k) {
    const double x = -span + 2.0 * span * weyl(k + 1, kW1);
    for (int i = 0; i < n; ++i) u[i] = model.cap[i] * weyl(k + 1 + i, kW2);
    probe_diag(x, u);
  }
  // box corners (the diagonal minimum typically sits at u = M)
  for (int mask = 0; mask < (1 << n); ++mask) {
    for (int i = 0; i < n; ++i) u[i] = (mask & (1 << i)) ? model.cap[i] : 0.0;
    for (double x : {-span, 0.0, span}) probe_diag(x, u);
  }
  return 1.1 * std::max(0.0, -min_diag);
}

const AssumptionClause* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : clauses)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

void note_violation(AssumptionClause& c, double violation, double x, double u) {
  if (violation > c.worst) {
    c.worst = violation;
    c.where_x = x;
    c.where_u = u;
  }
}

void finalize(AssumptionReport& rep, AssumptionClause c, double tol) {
  c.pass = c.worst <= tol;
  rep.all_pass = rep.all_pass && c.pass;
  rep.clauses.push_back(std::move(c));
}

}  // namespace

AssumptionReport verify_assumptions(const ScalarShiftModel& model, int sample_budget) {
  AssumptionReport rep;
  const double tol = 1e-8;
  const double span = 25.0 * model.transition_width;
  const int nsamp = std::max(100, sample_budget);

  AssumptionClause zero{"f(s,0)=0"};
  AssumptionClause box{"box mapping 0<=f<=cap"};
  AssumptionClause mono{"monotone in u"};
  AssumptionClause subh{"subhomogeneous"};
  AssumptionClause linb{"linear bound f<=f_u(s,0)u"};
  AssumptionClause blim{"limit derivatives > 1"};

  for (int k = 0; k < nsamp; ++k) {
    const double s = -span + 2.0 * span * weyl(k + 1, kW1);
    const double u = model.cap * weyl(k + 1, kW2);
    const double a = weyl(k + 1, kW3);

    note_violation(zero, std::fabs(model.f(s, 0.0)), s, 0.0);

    const double fv = model.f(s, u);
    note_violation(box, std::max(-fv, fv - model.cap), s, u);

    if (model.monotone_in_u) {
      const double h = 1e-5 * std::max(1.0, model.cap);
      const double lo_u = std::max(0.0, u - h);
      const double slope = (model.f(s, u + h) - model.f(s, lo_u)) / (u + h - lo_u);
      note_violation(mono, -slope, s, u);
    }

    note_violation(subh, a * model.f(s, u) - model.f(s, a * u), s, u);

    if (model.subhomogeneous) {
      const double fu0 = (model.f(s, kFdStep) - model.f(s, -kFdStep)) / (2.0 * kFdStep);
      note_violation(linb, fv - fu0 * u, s, u);
    }
  }

  note_violation(blim, 1.0 - limit_derivative(model, Side::plus), 0, 0);
  note_violation(blim, 1.0 - limit_derivative(model, Side::minus), 0, 0);

  finalize(rep, zero, tol);
  finalize(rep, box, tol);
  if (model.monotone_in_u) finalize(rep, mono, tol);
  finalize(rep, subh, 1e-12);
  if (model.subhomogeneous) finalize(rep, linb, tol);
  finalize(rep, blim, 0.0);

  // limit convergence: sup_u |f(+-X, u) - f_pm(u)| decreasing in X
  AssumptionClause conv{"limit convergence"};
  double prev_p = 1e300, prev_m = 1e300;
  for (double X : {5.0 * model.transition_width, 10.0 * model.transition_width,
                   20.0 * model.transition_width, 40.0 * model.transition_width}) {
    double dp = 0.0, dm = 0.0;
    for (int j = 0; j <= 50; ++j) {
      const double u = model.cap * j / 50.0;
      dp = std::max(dp, std::fabs(model.f(X, u) - model.f_plus(u)));
      dm = std::max(dm, std::fabs(model.f(-X, u) - model.f_minus(u)));
    }
    note_violation(conv, dp - prev_p, X, 0.0);
    note_violation(conv, dm - prev_m, -X, 0.0);
    prev_p = dp;
    prev_m = dm;
  }
  finalize(rep, conv, 1e-12);
  return rep;
}

AssumptionReport verify_assumptions(const CooperativeModel& model, int sample_budget) {
  AssumptionReport rep;
  const double tol = 1e-8;
  const int n = model.n_components;
  const double span = 25.0 * model.transition_width;
  const int nsamp = std::max(100, sample_budget);

  AssumptionClause zero{"f(x,0)=0"};
  AssumptionClause coop{"cooperative Jacobian (C3)"};
  AssumptionClause subh{"subhomogeneous (C4)"};
  AssumptionClause capn{"f(x, alpha M) << 0 for alpha > 1 (C4)"};
  AssumptionClause linb{"linear bound f <= D_uf(x,0)u"};

  std::vector<double> u(n), au(n), fu(n), fau(n), z(n, 0.0), fz(n), fp(n), fm(n);
  for (int k = 0; k < nsamp; ++k) {
    const double x = -span + 2.0 * span * weyl(k + 1, kW1);
    for (int i = 0; i < n; ++i) u[i] = model.cap[i] * weyl(k + 1 + i, kW2);
    const double a = weyl(k + 1, kW3);

    model.f(x, z.data(), fz.data());
    for (int i = 0; i < n; ++i) note_violation(zero, std::fabs(fz[i]), x, 0.0);

    // cooperativity: off-diagonal finite differences
    for (int col = 0; col < n; ++col) {
      std::vector<double> up(u), um(u);
      up[col] += kFdStep;
      um[col] = std::max(0.0, um[col] - kFdStep);
      model.f(x, up.data(), fp.data());
      model.f(x, um.data(), fm.data());
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        const double off = (fp[r] - fm[r]) / (up[col] - um[col]);
        note_violation(coop, -off, x, u[col]);
      }
    }

    // subhomogeneity
    for (int i = 0; i < n; ++i) au[i] = a * u[i];
    model.f(x, u.data(), fu.data());
    model.f(x, au.data(), fau.data());
    for (int i = 0; i < n; ++i) note_violation(subh, a * fu[i] - fau[i], x, u[i]);

    // linear bound against the sampled Jacobian at u = 0 (one-sided, 2nd order)
    Matrix j0(n, n);
    for (int col = 0; col < n; ++col) {
      std::vector<double> u1(n, 0.0), u2(n, 0.0);
      u1[col] = kFdStep;
      u2[col] = 2.0 * kFdStep;
      model.f(x, u1.data(), fp.data());
      model.f(x, u2.data(), fm.data());
      for (int r = 0; r < n; ++r) j0(r, col) = (4.0 * fp[r] - fm[r]) / (2.0 * kFdStep);
    }
    const std::vector<double> bound = j0 * u;
    for (int i = 0; i < n; ++i) note_violation(linb, fu[i] - bound[i], x, u[i]);
  }

  for (double a : {1.01, 1.1, 1.5, 2.0}) {
    for (double x : {-span, 0.0, span}) {
      for (int i = 0; i < n; ++i) au[i] = a * model.cap[i];
      model.f(x, au.data(), fau.data());
      for (int i = 0; i < n; ++i) note_violation(capn, fau[i] + 1e-10, x, au[i]);
    }
  }

  finalize(rep, zero, tol);
  finalize(rep, coop, tol);
  finalize(rep, subh, 1e-12);
  finalize(rep, capn, 0.0);
  finalize(rep, linb, tol);

  AssumptionClause conv{"limit convergence"};
  double prev_p = 1e300, prev_m = 1e300;
  std::vector<double> flim(n);
  for (double X : {5.0 * model.transition_width, 10.0 * model.transition_width,
                   20.0 * model.transition_width, 40.0 * model.transition_width}) {
    double dp = 0.0, dm = 0.0;
    for (int j = 0; j <= 20; ++j) {
      for (int i = 0; i < n; ++i) u[i] = model.cap[i] * j / 20.0;
      model.f(X, u.data(), fu.data());
      model.f_plus(u.data(), flim.data());
      for (int i = 0; i < n; ++i) dp = std::max(dp, std::fabs(fu[i] - flim[i]));
      model.f(-X, u.data(), fu.data());
      model.f_minus(u.data(), flim.data());
      for (int i = 0; i < n; ++i) dm = std::max(dm, std::fabs(fu[i] - flim[i]));
    }
    note_violation(conv, dp - prev_p, X, 0.0);
    note_violation(conv, dm - prev_m, -X, 0.0);
    prev_p = dp;
    prev_m = dm;
  }
  finalize(rep, conv, 1e-12);
  return rep;
}

double TabulatedReaction::eval(double s, double u) const {
  const auto clampf = [](double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); };
  const int ns = static_cast<int>(s_nodes.size());
  const int nu = static_cast<int>(u_nodes.size());
  // habitat coordinate continues as a constant beyond the table; the density
  // axis continues linearly through the edge cells (keeps derivatives at u=0
  // well defined for finite differencing)
  const double sc = clampf(s, s_nodes.front(), s_nodes.back());
  const double uc = u;
  int is = static_cast<int>(std::upper_bound(s_nodes.begin(), s_nodes.end(), sc) -
                            s_nodes.begin()) - 1;
  int iu = static_cast<int>(std::upper_bound(u_nodes.begin(), u_nodes.end(), uc) -
                            u_nodes.begin()) - 1;
  is = std::min(std::max(is, 0), ns - 2);
  iu = std::min(std::max(iu, 0), nu - 2);
  const double ts = (sc - s_nodes[is]) / (s_nodes[is + 1] - s_nodes[is]);
  const double tu = (uc - u_nodes[iu]) / (u_nodes[iu + 1] - u_nodes[iu]);
  const double f00 = f[is * nu + iu], f01 = f[is * nu + iu + 1];
  const double f10 = f[(is + 1) * nu + iu], f11 = f[(is + 1) * nu + iu + 1];
  return (1 - ts) * ((1 - tu) * f00 + tu * f01) + ts * ((1 - tu) * f10 + tu * f11);
}

ScalarShiftModel make_tabulated_scalar_model(const TabulatedReaction& tab, double mu, double d,
                                             double tau, double c) {
  if (tab.s_nodes.size() < 2 || tab.u_nodes.size() < 2)
    throw ConfigError("tabulated reaction: need at least a 2x2 grid");
  if (std::fabs(tab.u_nodes.front()) > 1e-14)
    throw ConfigError("tabulated reaction: u grid must start at 0");

  ScalarShiftModel m;
  m.d = d;
  m.mu = mu;
  m.tau = tau;
  m.c = c;
  m.f = [tab](double s, double u) { return tab.eval(s, u); };
  const double s_lo = tab.s_nodes.front(), s_hi = tab.s_nodes.back();
  m.f_plus = [tab, s_hi](double u) { return tab.eval(s_hi, u); };
  m.f_minus = [tab, s_lo](double u) { return tab.eval(s_lo, u); };
  m.cap = tab.u_nodes.back();
  m.analytic_limits = false;
  // one-sided second-order derivative at u=0 (f(0)=0 assumed)
  const double eta = std::min(1e-6, 0.25 * (tab.u_nodes[1] - tab.u_nodes[0]));
  m.b_plus = (4.0 * m.f_plus(eta) - m.f_plus(2.0 * eta)) / (2.0 * eta);
  m.b_minus = (4.0 * m.f_minus(eta) - m.f_minus(2.0 * eta)) / (2.0 * eta);
  m.u_star_plus = positive_equilibrium(m, Side::plus);
  m.u_star_minus = positive_equilibrium(m, Side::minus);
  m.transition_width = 0.25 * (s_hi - s_lo);

  // flags determined by sampling
  bool mono = true, subh = true;
  for (int k = 0; k < 2000; ++k) {
    const double s = s_lo + (s_hi - s_lo) * weyl(k + 1, kW1);
    const double u = m.cap * weyl(k + 1, kW2);
    const double a = weyl(k + 1, kW3);
    const double h = 1e-4 * m.cap;
    if (tab.eval(s, u + h) - tab.eval(s, std::max(0.0, u - h)) < -1e-8) mono = false;
    if (tab.eval(s, a * u) - a * tab.eval(s, u) < -1e-8) subh = false;
  }
  m.monotone_in_u = mono;
  m.subhomogeneous = subh;
  m.id = "tabulated";
  return m;
}

}  // namespace propagate

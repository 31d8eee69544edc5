#include "propagate/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "propagate/sim.hpp"

namespace propagate {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

constexpr double kTailSlack = 1e-9;  // float noise allowance in the nonincreasing check

// pass rule shared by spreading/attractivity: small at the final time and
// nonincreasing over the last three evaluated times
bool limit_pass(const std::vector<double>& sup_curve, double tol) {
  if (sup_curve.empty()) return false;
  if (!(sup_curve.back() <= tol)) return false;
  const size_t n = sup_curve.size();
  if (n >= 3) {
    const double e2 = sup_curve[n - 3], e1 = sup_curve[n - 2], e0 = sup_curve[n - 1];
    if (e1 > e2 + kTailSlack || e0 > e1 + kTailSlack) return false;
  }
  return true;
}

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool empty() const { return !(lo <= hi); }
};

// sup over grid nodes in the interval of |u - target(x)|, all components
double sup_error_on(const Field& f, const Interval& iv,
                    const std::function<double(double, int)>& target) {
  double m = -1.0;
  const Grid1D& g = f.grid;
  if (iv.empty()) return m;
  int i0 = static_cast<int>(std::ceil((iv.lo - g.x_min) / g.dx - 1e-12));
  int i1 = static_cast<int>(std::floor((iv.hi - g.x_min) / g.dx + 1e-12));
  i0 = std::max(i0, 0);
  i1 = std::min(i1, g.n - 1);
  for (int i = i0; i <= i1; ++i)
    for (int k = 0; k < f.n_components; ++k)
      m = std::max(m, std::fabs(f.at(k, i) - target(g.x(i), k)));
  return m;
}

}  // namespace

FrontTrace track_front(const Trajectory& traj, double level, FrontDirection direction,
                       int component) {
  FrontTrace tr;
  tr.level = level;
  tr.direction = direction;
  tr.component = component;

  for (size_t s = 0; s < traj.snapshots.size(); ++s) {
    const Field& f = traj.snapshots[s];
    const Grid1D& g = f.grid;
    const double* u = f.row(component);
    bool found = false;
    double pos = 0.0;
    if (direction == FrontDirection::rightmost) {
      for (int i = g.n - 2; i >= 0; --i) {
        const double a = u[i] - level, b = u[i + 1] - level;
        if (a == 0.0) {
          pos = g.x(i);
          found = true;
          break;
        }
        if (a * b < 0.0) {
          pos = g.x(i) + g.dx * a / (a - b);
          found = true;
          break;
        }
        if (b == 0.0) {
          pos = g.x(i + 1);
          found = true;
          break;
        }
      }
    } else {
      for (int i = 0; i < g.n - 1; ++i) {
        const double a = u[i] - level, b = u[i + 1] - level;
        if (b == 0.0) {
          pos = g.x(i + 1);
          found = true;
          break;
        }
        if (a * b < 0.0) {
          pos = g.x(i) + g.dx * a / (a - b);
          found = true;
          break;
        }
        if (a == 0.0) {
          pos = g.x(i);
          found = true;
          break;
        }
      }
    }
    tr.times.push_back(traj.times[s]);
    tr.positions.push_back(found ? pos : std::numeric_limits<double>::quiet_NaN());
    tr.present.push_back(found ? 1 : 0);
  }
  return tr;
}

SpeedFit estimate_speed(const FrontTrace& trace, double window_fraction) {
  std::vector<double> ts, ps;
  for (size_t i = 0; i < trace.times.size(); ++i)
    if (trace.present[i]) {
      ts.push_back(trace.times[i]);
      ps.push_back(trace.positions[i]);
    }
  const size_t total = ts.size();
  const size_t start = static_cast<size_t>(std::floor(total * (1.0 - window_fraction)));
  if (total - start < 10)
    throw ConfigError("estimate_speed: fewer than 10 trace points in the window");

  double st = 0, sp = 0, stt = 0, stp = 0, spp = 0;
  const size_t m = total - start;
  for (size_t i = start; i < total; ++i) {
    st += ts[i];
    sp += ps[i];
    stt += ts[i] * ts[i];
    stp += ts[i] * ps[i];
    spp += ps[i] * ps[i];
  }
  const double denom = m * stt - st * st;
  if (denom == 0.0) throw NumericError("estimate_speed: degenerate time window");
  const double slope = (m * stp - st * sp) / denom;
  const double ss_tot = spp - sp * sp / m;
  const double intercept = (sp - slope * st) / m;
  double ss_res = 0.0;
  for (size_t i = start; i < total; ++i) {
    const double r = ps[i] - (slope * ts[i] + intercept);
    ss_res += r * r;
  }
  SpeedFit fit;
  fit.speed = slope;
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

namespace {

Verdict region_verdict(const Trajectory& traj, const std::string& clause,
                       const std::function<std::vector<Interval>(double)>& regions,
                       const std::function<double(double, double, int)>& target,
                       double t_min, double tol, bool final_only,
                       const std::string& region_desc) {
  Verdict v;
  v.clause = clause;
  v.region = region_desc;
  v.tolerance = tol;

  bool saw_region = false;
  for (size_t s = 0; s < traj.snapshots.size(); ++s) {
    const double t = traj.times[s];
    if (t < t_min - 1e-12) continue;
    double sup = -1.0;
    for (const Interval& iv : regions(t)) {
      const double e = sup_error_on(traj.snapshots[s], iv,
                                    [&](double x, int k) { return target(t, x, k); });
      sup = std::max(sup, e);
    }
    if (sup < 0.0) continue;  // empty region at this time
    saw_region = true;
    v.times.push_back(t);
    v.sup_curve.push_back(sup);
  }
  if (!saw_region)
    throw ConfigError(clause + ": region empty at t_min; extend domain or t_min");
  v.sup_error = v.sup_curve.back();
  v.pass = final_only ? (v.sup_error <= tol) : limit_pass(v.sup_curve, tol);
  return v;
}

}  // namespace

Verdict spreading_verdict(const Trajectory& traj, const ScalarShiftModel& model,
                          const SpeedReport& plus, const SpeedReport& minus, double epsilon,
                          double t_min, double tol) {
  const double cp = plus.c_star, cm = minus.c_star, c = model.c;
  const double dx = traj.snapshots.front().grid.dx;
  const double up = model.u_star_plus, um = model.u_star_minus;

  // E_{eps,c} = [-c*(-inf)+eps, min{c, c*(-inf)}-eps] U [c+eps, c*(inf)-eps],
  // edges pulled in by one dx; empty parts are skipped
  auto regions = [=](double t) {
    std::vector<Interval> parts;
    Interval left{t * (-cm + epsilon) + dx, t * (std::min(c, cm) - epsilon) - dx};
    Interval right{t * (c + epsilon) + dx, t * (cp - epsilon) - dx};
    if (!left.empty()) parts.push_back(left);
    if (!right.empty()) parts.push_back(right);
    return parts;
  };
  auto target = [=](double t, double x, int) { return x - c * t >= 0.0 ? up : um; };

  std::string desc = "t*E_eps,c, E = [" + fmt(-cm + epsilon) + "," +
                     fmt(std::min(c, cm) - epsilon) + "] U [" + fmt(c + epsilon) + "," +
                     fmt(cp - epsilon) + "]";
  Verdict v = region_verdict(traj, "spreading", regions, target, t_min, tol, false, desc);
  if (c + epsilon > cp - epsilon)
    v.note = "right sub-region empty (c >= c*(inf) - 2 eps); left sub-region evaluated";
  return v;
}

Verdict spreading_verdict(const Trajectory& traj, const CooperativeModel& model,
                          const SpeedReport& plus, const SpeedReport& minus, double epsilon,
                          double inner_offset, double t_min, double tol) {
  const double cp = plus.c_star, cm = minus.c_star;
  const double dx = traj.snapshots.front().grid.dx;
  const std::vector<double> up = model.u_star_plus, um = model.u_star_minus;

  auto regions = [=](double t) {
    std::vector<Interval> parts;
    Interval right{inner_offset + dx, t * (cp - epsilon) - dx};
    Interval left{t * (-cm + epsilon) + dx, -inner_offset - dx};
    if (!left.empty()) parts.push_back(left);
    if (!right.empty()) parts.push_back(right);
    return parts;
  };
  auto target = [=](double, double x, int k) { return x >= 0.0 ? up[k] : um[k]; };

  std::string desc = "x in [" + fmt(inner_offset) + ", t*" + fmt(cp - epsilon) + "] U [t*" +
                     fmt(-cm + epsilon) + ", " + fmt(-inner_offset) + "]";
  return region_verdict(traj, "spreading", regions, target, t_min, tol, false, desc);
}

Verdict annihilation_verdict_rates(const Trajectory& traj, double rate_right,
                                   double rate_left, double t_min, double tol) {
  const Grid1D& g = traj.snapshots.front().grid;
  const double dx = g.dx;

  bool clipped = false;
  auto regions = [&clipped, g, dx, rate_right, rate_left](double t) {
    std::vector<Interval> parts;
    Interval right{t * rate_right + dx, g.x_max};
    Interval left{g.x_min, -t * rate_left - dx};
    if (t * rate_right > g.x_max || -t * rate_left < g.x_min) clipped = true;
    if (!right.empty()) parts.push_back(right);
    if (!left.empty()) parts.push_back(left);
    return parts;
  };
  auto target = [](double, double, int) { return 0.0; };

  std::string desc =
      "x >= t*" + fmt(rate_right) + " or x <= -t*" + fmt(rate_left) + " (domain-clipped)";
  Verdict v =
      region_verdict(traj, "annihilation", regions, target, t_min, tol, true, desc);
  if (clipped) v.note = "region extends past the truncated domain; evaluated on the intersection";
  return v;
}

Verdict annihilation_verdict(const Trajectory& traj, const ScalarShiftModel& model,
                             const SpeedReport& plus, const SpeedReport& minus,
                             double epsilon, double t_min, double tol) {
  return annihilation_verdict_rates(traj, std::max(model.c, plus.c_star) + epsilon,
                                    minus.c_star + epsilon, t_min, tol);
}

Verdict annihilation_verdict(const Trajectory& traj, const CooperativeModel&,
                             const SpeedReport& plus, const SpeedReport& minus,
                             double epsilon, double t_min, double tol) {
  return annihilation_verdict_rates(traj, plus.c_star + epsilon, minus.c_star + epsilon,
                                    t_min, tol);
}

namespace {

Verdict attractivity_impl(const Trajectory& traj, const WaveProfile& wave, double c,
                          double cp, double cm, double epsilon, double t_min, double tol) {
  const double dx = traj.snapshots.front().grid.dx;
  auto regions = [=](double t) {
    std::vector<Interval> parts;
    Interval cone{t * (-cm + epsilon) + dx, t * (cp - epsilon) - dx};
    if (!cone.empty()) parts.push_back(cone);
    return parts;
  };
  const Field& w = wave.w;
  auto target = [&w, c](double t, double x, int k) { return eval_at(w, k, x - c * t); };

  std::string desc = "t*" + fmt(-cm + epsilon) + " <= x <= t*" + fmt(cp - epsilon) +
                     ", compared against W(x - c t)";
  return region_verdict(traj, "attractivity", regions, target, t_min, tol, false, desc);
}

}  // namespace

Verdict attractivity_verdict(const Trajectory& traj, const ScalarShiftModel& model,
                             const WaveProfile& wave, const SpeedReport& plus,
                             const SpeedReport& minus, double epsilon, double t_min,
                             double tol) {
  if (!(model.monotone_in_u && model.subhomogeneous))
    throw ConfigError(
        "attractivity_verdict: theorem hypotheses unmet (f must be nondecreasing and "
        "subhomogeneous in u)");
  Verdict v = attractivity_impl(traj, wave, model.c, plus.c_star, minus.c_star, epsilon,
                                t_min, tol);
  // c < min c* is the theorem's sufficient hypothesis; the measured verdict is
  // still well defined outside it, so record instead of refusing
  if (!(model.c < std::min(plus.c_star, minus.c_star)))
    v.note = "outside the sufficient hypothesis c < min{c*(inf), c*(-inf)}";
  return v;
}

Verdict attractivity_verdict(const Trajectory& traj, const CooperativeModel&,
                             const WaveProfile& wave, const SpeedReport& plus,
                             const SpeedReport& minus, double epsilon, double t_min,
                             double tol) {
  return attractivity_impl(traj, wave, 0.0, plus.c_star, minus.c_star, epsilon, t_min, tol);
}

MinorantSpec build_minorant(const ScalarShiftModel& model, double u_star_star, double gamma) {
  const double b = limit_derivative(model, Side::plus);  // f'_+(0)
  if (!(gamma > 0.0 && gamma < b - 1.0))
    throw ConfigError("build_minorant: need 0 < gamma < f'_+(0) - 1");
  if (!(u_star_star >= model.u_star_plus))
    throw ConfigError("build_minorant: need u** >= u*_+");

  const double w = model.transition_width;
  const double h = 1e-7 * std::max(1.0, u_star_star);
  auto dfu = [&](double s, double u) {
    return (model.f(s, u + h) - model.f(s, u - h)) / (2.0 * h);
  };
  auto dfu_plus = [&](double u) {
    return (model.f_plus(u + h) - model.f_plus(u - h)) / (2.0 * h);
  };

  // delta_1: largest u with (f_+^inf)'(v) > b - gamma/3 on [0, u]
  const int nu_scan = 2000;
  double delta1 = 0.0;
  for (int i = 1; i <= nu_scan; ++i) {
    const double u = u_star_star * i / nu_scan;
    if (dfu_plus(u) > b - gamma / 3.0)
      delta1 = u;
    else
      break;
  }
  if (delta1 <= 0.0) throw NumericError("build_minorant: no delta_1 found ((B+) fails?)");
  delta1 *= 0.95;

  // s_frak: smallest scanned s beyond which d_u f(s, .) > b - 2 gamma/3 on [0, delta_1]
  const double s_hi = 60.0 * w, s_step = 0.02 * w;
  auto cond = [&](double s) {
    for (int j = 0; j <= 24; ++j)
      if (!(dfu(s, delta1 * j / 24.0) > b - 2.0 * gamma / 3.0)) return false;
    return true;
  };
  if (!cond(s_hi)) throw NumericError("build_minorant: derivative condition fails at s -> inf");
  double s_frak = s_hi;
  for (double s = s_hi; s >= -s_hi; s -= s_step) {
    if (cond(s))
      s_frak = s;
    else
      break;
  }
  s_frak += s_step;  // one scan step of safety

  // f_* = inf f over [s_frak, s_frak + 50 w] x [delta_1, u**] (monotone tails
  // beyond the transition make the truncation harmless)
  double f_star = 1e300;
  for (int is = 0; is <= 200; ++is) {
    const double s = s_frak + 50.0 * w * is / 200.0;
    for (int iu = 0; iu <= 100; ++iu) {
      const double u = delta1 + (u_star_star - delta1) * iu / 100.0;
      f_star = std::min(f_star, model.f(s, u));
    }
  }
  if (!(f_star > 0.0)) throw NumericError("build_minorant: (B+) positivity fails (f_* <= 0)");

  MinorantSpec spec;
  spec.u_star_star = u_star_star;
  spec.gamma = gamma;
  spec.delta_1 = delta1;
  spec.s_frak = s_frak;
  spec.f_star = f_star;
  const double K = b * b / (4.0 * f_star);
  spec.big_k = K;
  spec.r_minus_inf = -1.0 / K;
  spec.r_inf = (b - 1.0 - gamma) / K;

  const double sf = s_frak;
  spec.r = [K, b, gamma, sf](double s) {
    if (s >= sf + 1.0) return (b - 1.0 - gamma) / K;
    if (s <= sf) return -1.0 / K;
    return ((b - gamma) * (s - sf) - 1.0) / K;
  };
  auto rfn = spec.r;
  spec.f_min = [K, rfn](double s, double u) {
    const double r = rfn(s);
    const double vertex = (1.0 + K * r) / (2.0 * K);
    if (u >= vertex) return (1.0 + K * r) * (1.0 + K * r) / (4.0 * K);
    return u + K * u * (r - u);
  };

  spec.u_inf = spec.r_inf * K > 1.0
                   ? (1.0 + K * spec.r_inf) * (1.0 + K * spec.r_inf) / (4.0 * K)
                   : spec.r_inf;

  // validate the construction on a 200 x 200 sample grid
  const double s_lo_v = -s_hi, s_hi_v = s_hi;
  for (int is = 0; is <= 200; ++is) {
    const double s = s_lo_v + (s_hi_v - s_lo_v) * is / 200.0;
    double prev_u = spec.f_min(s, 0.0);
    for (int iu = 0; iu <= 200; ++iu) {
      const double u = u_star_star * iu / 200.0;
      const double fm = spec.f_min(s, u);
      if (fm > model.f(s, u) + 1e-12)
        throw NumericError("build_minorant: f_min > f at s=" + fmt(s) + ", u=" + fmt(u));
      if (fm < prev_u - 1e-12)
        throw NumericError("build_minorant: f_min not nondecreasing in u");
      prev_u = fm;
      if (is > 0) {
        const double s_prev = s_lo_v + (s_hi_v - s_lo_v) * (is - 1) / 200.0;
        if (fm < spec.f_min(s_prev, u) - 1e-12)
          throw NumericError("build_minorant: f_min not nondecreasing in s");
      }
      for (double a : {0.25, 0.5, 0.75}) {
        if (spec.f_min(s, a * u) < a * fm - 1e-12)
          throw NumericError("build_minorant: f_min not subhomogeneous");
      }
    }
  }
  return spec;
}

MajorantSpec build_majorant(const ScalarShiftModel& model, double u_star_star, double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("build_majorant: need gamma > 0");
  const double b = limit_derivative(model, Side::plus);
  const double w = model.transition_width;
  const double s_hi = 60.0 * w;
  const int ns = 1200;

  MajorantSpec spec;
  spec.r_inf = gamma + b;
  spec.s_samples.resize(ns + 1);
  spec.r_values.resize(ns + 1);

  // pointwise bound m(s) = max(gamma + b, sup_u f(s,u)/u) on a log-dense u
  // sample, the u -> 0 end taken from the derivative
  const double h = 1e-7 * std::max(1.0, u_star_star);
  for (int i = 0; i <= ns; ++i) {
    const double s = -s_hi + 2.0 * s_hi * i / ns;
    double m = gamma + b;
    m = std::max(m, (model.f(s, h) - model.f(s, -h)) / (2.0 * h));
    for (int j = 0; j <= 60; ++j) {
      const double u = u_star_star * std::pow(10.0, -6.0 + 6.0 * j / 60.0);
      const double q = model.f(s, u) / u;
      if (!std::isfinite(q)) throw NumericError("build_majorant: f(s,u)/u unbounded");
      m = std::max(m, q);
    }
    spec.s_samples[i] = s;
    spec.r_values[i] = m;
  }
  // nonincreasing envelope from the right
  for (int i = ns - 1; i >= 0; --i)
    spec.r_values[i] = std::max(spec.r_values[i], spec.r_values[i + 1]);

  auto ss = spec.s_samples;
  auto rv = spec.r_values;
  spec.r_bar = [ss, rv](double s) {
    if (s <= ss.front()) return rv.front();
    if (s >= ss.back()) return rv.back();
    const size_t j = static_cast<size_t>(std::upper_bound(ss.begin(), ss.end(), s) -
                                         ss.begin()) - 1;
    const double t = (s - ss[j]) / (ss[j + 1] - ss[j]);
    return (1.0 - t) * rv[j] + t * rv[j + 1];
  };

  // validate f <= R u on a sample grid
  for (int is = 0; is <= 200; ++is) {
    const double s = -s_hi + 2.0 * s_hi * is / 200.0;
    const double rb = spec.r_bar(s);
    for (int iu = 1; iu <= 200; ++iu) {
      const double u = u_star_star * iu / 200.0;
      if (model.f(s, u) > rb * u + 1e-12)
        throw NumericError("build_majorant: f > R u at s=" + fmt(s) + ", u=" + fmt(u));
    }
  }
  return spec;
}

Verdict sandwich_check(const ScalarShiftModel& model, const Field& ic, double t_end,
                       double tol) {
  const double b = limit_derivative(model, Side::plus);
  const double gamma = 0.5 * (b - 1.0);
  const double u_ss = std::max(model.cap, 1.05 * model.u_star_plus);

  MinorantSpec minor = build_minorant(model, u_ss, gamma);
  MajorantSpec major = build_majorant(model, u_ss, gamma);

  ScalarShiftModel m_min = model;
  m_min.f = minor.f_min;
  m_min.f_plus = [fm = minor.f_min, sf = minor.s_frak](double u) { return fm(sf + 2.0, u); };
  m_min.f_minus = [fm = minor.f_min](double u) { return fm(-1e9, u); };
  m_min.monotone_in_u = true;
  m_min.subhomogeneous = true;
  m_min.analytic_limits = false;
  m_min.id = model.id + "+minorant";

  ScalarShiftModel m_lin = model;
  m_lin.f = [rb = major.r_bar](double s, double u) { return rb(s) * u; };
  m_lin.f_plus = [r = major.r_values.back()](double u) { return r * u; };
  m_lin.f_minus = [r = major.r_values.front()](double u) { return r * u; };
  m_lin.monotone_in_u = true;
  m_lin.subhomogeneous = true;
  m_lin.analytic_limits = false;
  m_lin.id = model.id + "+linear-majorant";

  // shared step size: stiffest reaction wins, monotone CN substep range,
  // then tau divisibility
  const double lip =
      model.mu * std::max({b, major.r_values.front(), 2.0 + minor.big_k * minor.r_inf});
  const double dx = ic.grid.dx;
  double dt = std::min({0.025, 0.1 / lip, 2.0 * dx * dx / model.d});
  if (model.tau > 0.0) {
    const int m = std::max(1, static_cast<int>(std::ceil(model.tau / dt - 1e-12)));
    dt = model.tau / m;
  }

  SimConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.frame = Frame::lab;
  cfg.snapshot_stride = std::max(1, static_cast<int>(std::lround(0.5 / dt)));
  cfg.blowup_guard = 1e30;  // the linear majorant grows exponentially

  auto fut_min = std::async(std::launch::async, [&] { return run(m_min, ic, cfg); });
  auto fut_lin = std::async(std::launch::async, [&] { return run(m_lin, ic, cfg); });
  Trajectory tr_mid = run(model, ic, cfg);
  Trajectory tr_min = fut_min.get();
  Trajectory tr_lin = fut_lin.get();

  Verdict v;
  v.clause = "sandwich";
  v.region = "pointwise u_min <= u <= u_lin + tol on the full domain";
  v.tolerance = tol;
  double worst = 0.0;
  double worst_t = 0.0, worst_x = 0.0;
  for (size_t s = 0; s < tr_mid.snapshots.size(); ++s) {
    const Field& fmn = tr_min.snapshots[s];
    const Field& fmd = tr_mid.snapshots[s];
    const Field& fln = tr_lin.snapshots[s];
    double sup = 0.0;
    for (int i = 0; i < fmd.grid.n; ++i) {
      const double lo_gap = fmn.at(0, i) - fmd.at(0, i);       // should be <= 0
      const double hi_gap = fmd.at(0, i) - fln.at(0, i);       // should be <= 0
      const double viol = std::max(0.0, std::max(lo_gap, hi_gap));
      if (viol > worst) {
        worst = viol;
        worst_t = tr_mid.times[s];
        worst_x = fmd.grid.x(i);
      }
      sup = std::max(sup, viol);
    }
    v.times.push_back(tr_mid.times[s]);
    v.sup_curve.push_back(sup);
  }
  v.sup_error = worst;
  v.pass = worst <= tol;
  if (!v.pass)
    v.note = "worst violation at t=" + fmt(worst_t) + ", x=" + fmt(worst_x);
  return v;
}

ProbeReport propagation_probe(const ScalarShiftModel& model, const SpeedReport& plus,
                              double epsilon, const std::vector<int>& n_grid,
                              const std::vector<double>& y_grid, const Grid1D& grid) {
  // comoving-frame spreading speeds of the + limiting system
  const double c_plus = plus.c_star - model.c;   // rightward
  const double c_minus = plus.c_star + model.c;  // leftward
  const double clo = -c_minus + 2.0 * epsilon / 3.0;
  const double chi = c_plus - 2.0 * epsilon / 3.0;
  if (!(clo < chi))
    throw ConfigError("propagation_probe: admissible speed interval empty for this epsilon");

  ProbeReport rep;
  for (int i = 0; i < 5; ++i) rep.c_samples.push_back(clo + (chi - clo) * i / 4.0);

  int n_max = 0;
  for (int n : n_grid) n_max = std::max(n, n_max);
  double y_max = 0.0;
  for (double y : y_grid) y_max = std::max(y, y_max);
  const double reach = y_max + n_max * std::max(std::fabs(clo), std::fabs(chi)) + 2.0;
  if (reach > grid.x_max || grid.x_min > -4.0)
    throw ConfigError("propagation_probe: domain too small for largest y + n*c");

  const double amp = model.u_star_plus / 16.0;
  const double need = model.u_star_plus / 4.0;

  SimConfig cfg;
  cfg.frame = Frame::comoving;
  double lip = model.mu * std::max(model.b_plus, model.b_minus) * 2.0;
  cfg.dt = std::min({0.025, 0.1 / lip, 2.0 * grid.dx * grid.dx / model.d});
  {
    const long per_unit = std::lround(std::ceil(1.0 / cfg.dt));
    cfg.dt = 1.0 / per_unit;  // land on integer times exactly
    if (model.tau > 0.0) {
      // also a divisor of tau: use 1/k with k a multiple of per-unit slots in tau
      long k = per_unit;
      while (std::fabs(model.tau * k - std::lround(model.tau * k)) > 1e-9) {
        ++k;
        if (k > 100000) throw ConfigError("propagation_probe: tau incompatible with unit steps");
      }
      cfg.dt = 1.0 / k;
    }
  }
  cfg.blowup_guard = 1e8;

  for (double y : y_grid) {
    Field ic = make_field(grid, 1);
    for (int i = 0; i < grid.n; ++i) ic.at(0, i) = amp * bump_h(grid.x(i) - y);

    SimState st = make_scalar_state(model, ic, cfg);
    const long per_unit = std::lround(1.0 / cfg.dt);

    int reached = 0;
    std::vector<Field> states_at_n(static_cast<size_t>(n_max) + 1, ic);
    for (int n = 1; n <= n_max; ++n) {
      for (long k = 0; k < per_unit; ++k) step_scalar_delay(st, model, cfg);
      states_at_n[n] = st.current;
      reached = n;
    }
    (void)reached;

    for (int n : n_grid) {
      const Field& u = states_at_n[n];
      for (double c : rep.c_samples) {
        double margin = 1e300;
        const double shift = n * c + y;
        for (int j = 0; j <= 40; ++j) {
          const double x = -2.0 + 4.0 * j / 40.0;
          margin = std::min(margin, eval_at(u, 0, x + shift) - need * bump_h(x));
        }
        ProbeEntry e;
        e.c = c;
        e.n = n;
        e.y = y;
        e.margin = margin;
        e.pass = margin >= 0.0;
        rep.entries.push_back(e);
        rep.any_pass = rep.any_pass || e.pass;
      }
    }
  }

  // empirical frontier: smallest sampled n that passes for all sampled (c, y),
  // and smallest y with some passing n
  for (int n : n_grid) {
    bool all = true;
    for (const auto& e : rep.entries)
      if (e.n == n && !e.pass) all = false;
    if (all && !rep.entries.empty()) {
      rep.n0 = n;
      break;
    }
  }
  for (double y : y_grid) {
    bool any = false;
    for (const auto& e : rep.entries)
      if (e.y == y && e.pass) any = true;
    if (any) {
      rep.y0 = y;
      break;
    }
  }
  return rep;
}

}  // namespace propagate

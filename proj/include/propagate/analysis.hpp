#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "propagate/grid.hpp"
#include "propagate/models.hpp"
#include "propagate/speeds.hpp"
#include "propagate/waves.hpp"

namespace propagate {

enum class FrontDirection { rightmost, leftmost };

struct FrontTrace {
  std::vector<double> times;
  std::vector<double> positions;  // valid where present
  std::vector<char> present;      // absence recorded, never interpolated
  double level = 0.0;
  FrontDirection direction = FrontDirection::rightmost;
  int component = 0;
};

// Outermost level crossing per snapshot, position by linear interpolation.
FrontTrace track_front(const Trajectory& traj, double level, FrontDirection direction,
                       int component = 0);

struct SpeedFit {
  double speed = 0.0;
  double r_squared = 0.0;
};

// Least-squares slope over the final window_fraction of the trace.
SpeedFit estimate_speed(const FrontTrace& trace, double window_fraction);

struct Verdict {
  std::string clause;
  std::string region;
  double sup_error = 0.0;  // at the final evaluated time
  double tolerance = 0.0;
  bool pass = false;
  std::vector<double> times;      // evaluated times
  std::vector<double> sup_curve;  // sup-error per evaluated time
  std::string note;
};

// Scalar spreading clause: sup over x in t*E_{eps,c} of
// |u(t,x) - (u*_+ for x >= ct, u*_- for x < ct)|, where
// E_{eps,c} = [-c*(-inf)+eps, min{c, c*(-inf)}-eps] U [c+eps, c*(inf)-eps].
// An empty sub-interval (e.g. c >= c*(inf)) is skipped; both empty is an error.
// Pass requires sup <= tol at the final time and a nonincreasing tail over the
// last three evaluated times. Region edges are pulled in by one dx.
Verdict spreading_verdict(const Trajectory& traj, const ScalarShiftModel& model,
                          const SpeedReport& plus, const SpeedReport& minus,
                          double epsilon, double t_min, double tol);

// Systems spreading clause: x in [alpha, t(c*(inf)-eps)] U [t(-c*(-inf)+eps), -alpha],
// target u*_+ for x >= 0 and u*_- for x < 0.
Verdict spreading_verdict(const Trajectory& traj, const CooperativeModel& model,
                          const SpeedReport& plus, const SpeedReport& minus,
                          double epsilon, double inner_offset, double t_min, double tol);

// sup of |u| outside x >= t*rate_right, x <= -t*rate_left; pass at final time.
// Regions clipped to the domain are flagged in the note.
Verdict annihilation_verdict_rates(const Trajectory& traj, double rate_right,
                                   double rate_left, double t_min, double tol);
// Theorem rates: right max{c, c*(inf)}+eps, left c*(-inf)+eps.
Verdict annihilation_verdict(const Trajectory& traj, const ScalarShiftModel& model,
                             const SpeedReport& plus, const SpeedReport& minus,
                             double epsilon, double t_min, double tol);
Verdict annihilation_verdict(const Trajectory& traj, const CooperativeModel& model,
                             const SpeedReport& plus, const SpeedReport& minus,
                             double epsilon, double t_min, double tol);

// sup over t(-c*(-inf)+eps) <= x <= t(c*(inf)-eps) of |u(t,x) - W(x-ct)|.
// Requires the monotone + subhomogeneous hypothesis flags on the model.
Verdict attractivity_verdict(const Trajectory& traj, const ScalarShiftModel& model,
                             const WaveProfile& wave, const SpeedReport& plus,
                             const SpeedReport& minus, double epsilon, double t_min,
                             double tol);
// Systems variant: W static (c = 0).
Verdict attractivity_verdict(const Trajectory& traj, const CooperativeModel& model,
                             const WaveProfile& wave, const SpeedReport& plus,
                             const SpeedReport& minus, double epsilon, double t_min,
                             double tol);

// Monotone subhomogeneous lower envelope f_{u**,gamma} <= f with the ramp
// profile r(s) and K = f'_+(0)^2 / (4 f_*).
struct MinorantSpec {
  double u_star_star = 0.0;
  double gamma = 0.0;
  double big_k = 0.0;       // K
  double s_frak = 0.0;      // transition abscissa
  double f_star = 0.0;      // sampled inf of f over [s_frak, inf) x [delta_1, u**]
  double delta_1 = 0.0;
  double r_minus_inf = 0.0; // -1/K
  double r_inf = 0.0;       // (f'_+(0) - 1 - gamma) / K
  double u_inf = 0.0;       // fixed point of f_min(inf, .)
  std::function<double(double)> r;
  std::function<double(double, double)> f_min;
};

MinorantSpec build_minorant(const ScalarShiftModel& model, double u_star_star, double gamma);

// Nonincreasing linear envelope R(s) with f(s,u) <= R(s) u and R(inf) = gamma + f'_+(0).
struct MajorantSpec {
  double r_inf = 0.0;
  std::vector<double> s_samples;
  std::vector<double> r_values;
  std::function<double(double)> r_bar;
};

MajorantSpec build_majorant(const ScalarShiftModel& model, double u_star_star, double gamma);

// Simulates minorant / full / linear-majorant systems from the same ic and
// asserts pointwise u_min <= u <= u_lin + tol at every snapshot up to T.
Verdict sandwich_check(const ScalarShiftModel& model, const Field& ic, double t_end,
                       double tol);

struct ProbeEntry {
  double c = 0.0;
  int n = 0;
  double y = 0.0;
  bool pass = false;
  double margin = 0.0;  // min over [-2,2] of (shifted u - (u*_+/4) h)
};

struct ProbeReport {
  std::vector<ProbeEntry> entries;
  std::vector<double> c_samples;
  int n0 = -1;       // smallest sampled n passing for all sampled (c, y)
  double y0 = std::numeric_limits<double>::quiet_NaN();  // smallest sampled y with a passing n
  bool any_pass = false;
};

// Numeric probe of the compact-bump propagation inequality: run n time-1 maps
// of the comoving system from the bump (u*_+/16) h translated to +y, shift
// back by n*c + y, and test >= (u*_+/4) h on [-2, 2]. c is sampled over the
// comoving admissible interval [-(c*(inf)+c_model)+2eps/3, (c*(inf)-c_model)-2eps/3].
ProbeReport propagation_probe(const ScalarShiftModel& model, const SpeedReport& plus,
                              double epsilon, const std::vector<int>& n_grid,
                              const std::vector<double>& y_grid, const Grid1D& grid);

}  // namespace propagate

#include "propagate/speeds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace propagate {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

double principal_root(const CharacteristicParams& p) {
  if (p.b < 0.0) throw ConfigError("principal_root: b must be nonnegative");
  if (p.b == 0.0) return p.a;
  if (p.tau == 0.0) return p.a + p.b;

  auto g = [&](double z) { return z - p.a - p.b * std::exp(-z * p.tau); };

  // g is strictly increasing; g(a) = -b e^{-a tau} < 0 is always a lower bound
  double lo = p.a;
  double hi = std::max(p.a + p.b, 0.0) + 1.0;
  double grow = 1.0;
  while (g(hi) < 0.0) {
    hi += grow;
    grow *= 2.0;
    if (grow > 1e12) throw NumericError("principal_root: bracket expansion failed");
  }

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * std::max(1.0, std::fabs(mid))) break;
  }
  double z = 0.5 * (lo + hi);
  // Newton polish in case g is steep at the root
  for (int it = 0; it < 8 && std::fabs(g(z)) > 1e-13; ++it) {
    const double dg = 1.0 + p.b * p.tau * std::exp(-z * p.tau);
    z -= g(z) / dg;
  }
  if (std::fabs(g(z)) > 1e-12)
    throw NumericError("principal_root: residual " + fmt(std::fabs(g(z))) + " above 1e-12");
  return z;
}

double lambda_scalar(const ScalarShiftModel& model, Side side, double nu) {
  if (!(nu > 0.0)) throw ConfigError("lambda_scalar: nu must be positive");
  CharacteristicParams p;
  p.a = model.d * nu * nu - model.mu;
  p.b = model.mu * (side == Side::plus ? model.b_plus : model.b_minus);
  p.tau = model.tau;
  return std::exp(principal_root(p));
}

Matrix matrix_exp(const Matrix& a) {
  if (a.rows() != a.cols()) throw ConfigError("matrix_exp: matrix must be square");
  const int n = a.rows();

  // scaling and squaring: bring norm below 1/4, 25 Taylor terms, square back
  int squarings = 0;
  double norm = a.norm_inf();
  while (norm > 0.25) {
    norm *= 0.5;
    ++squarings;
  }
  Matrix b = a * std::pow(0.5, squarings);

  Matrix result = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= 25; ++k) {
    term = term * b * (1.0 / k);
    result = result + term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

PerronResult perron(const Matrix& p) {
  if (p.rows() != p.cols()) throw ConfigError("perron: matrix must be square");
  const int n = p.rows();
  bool all_zero = true;
  for (int i = 0; i < n && all_zero; ++i)
    for (int j = 0; j < n; ++j)
      if (p(i, j) != 0.0) {
        all_zero = false;
        break;
      }
  if (all_zero) throw NumericError("perron: zero matrix");

  std::vector<double> v(n, 1.0);
  double rho = 0.0;
  for (int it = 0; it < 100000; ++it) {
    std::vector<double> w = p * v;
    double wmax = 0.0;
    for (double x : w) wmax = std::max(wmax, std::fabs(x));
    if (wmax == 0.0) throw NumericError("perron: iteration collapsed to zero");
    for (double& x : w) x /= wmax;
    rho = wmax;
    std::vector<double> pw = p * w;
    // Rayleigh quotient tightens rho once the direction settles
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      num += pw[i] * w[i];
      den += w[i] * w[i];
    }
    if (den > 0.0) rho = num / den;
    // residual || P w - rho w ||_inf on the normalized iterate
    double res = 0.0;
    for (int i = 0; i < n; ++i) res = std::max(res, std::fabs(pw[i] - rho * w[i]));
    v = w;
    if (res < 1e-12 * rho) {
      for (double x : v)
        if (!(x > 0.0))
          throw NumericError("perron: eigenvector not strictly positive (matrix irreducible?)");
      PerronResult out;
      out.rho = rho;
      out.v = v;
      return out;
    }
  }
  throw NumericError("perron: no convergence in 1e5 iterations");
}

namespace {

// log of the Perron root of exp(A + nu^2 D), computed on the diagonal-shifted
// matrix so the scan over large nu cannot overflow: exp(M) = e^m exp(M - m I).
double log_lambda_matrix(const CooperativeModel& model, Side side, double nu) {
  const Matrix& a = side == Side::plus ? model.a_plus : model.a_minus;
  Matrix m = a;
  for (int i = 0; i < model.n_components; ++i)
    m(i, i) += nu * nu * model.diffusivities[i];
  double shift = m(0, 0);
  for (int i = 1; i < model.n_components; ++i) shift = std::max(shift, m(i, i));
  for (int i = 0; i < model.n_components; ++i) m(i, i) -= shift;
  return shift + std::log(perron(matrix_exp(m)).rho);
}

}  // namespace

double lambda_matrix(const CooperativeModel& model, Side side, double nu) {
  if (!(nu > 0.0)) throw ConfigError("lambda_matrix: nu must be positive");
  return std::exp(log_lambda_matrix(model, side, nu));
}

namespace {

// Shared scan + golden-section machinery for phi(nu) = log lambda(nu) / nu.
// Works on log lambda so the large-nu scan tail cannot overflow.
SpeedReport minimize_phi(Side side, const std::function<double(double)>& log_lambda_fn) {
  const double nu_lo = 1e-3, nu_hi = 50.0;
  const int n_scan = 200;

  SpeedReport report;
  report.side = side;

  std::vector<double> nus(n_scan), phis(n_scan);
  const double lr = std::log(nu_hi / nu_lo);
  for (int i = 0; i < n_scan; ++i) {
    nus[i] = nu_lo * std::exp(lr * i / (n_scan - 1));
    const double loglam = log_lambda_fn(nus[i]);
    if (!std::isfinite(loglam))
      throw NumericError("spreading_speed: log lambda(nu) not finite");
    phis[i] = loglam / nus[i];
    report.samples.emplace_back(nus[i], std::exp(loglam));
    report.phis.push_back(phis[i]);
  }

  // unimodality: the discrete slope changes sign at most once (- to +)
  int sign_changes = 0;
  int prev_sign = 0;
  for (int i = 1; i < n_scan; ++i) {
    const double diff = phis[i] - phis[i - 1];
    const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
    if (sign != 0) {
      if (prev_sign != 0 && sign != prev_sign) ++sign_changes;
      prev_sign = sign;
    }
  }
  if (sign_changes > 1) throw NumericError("spreading_speed: lambda scan not unimodal");

  int k = 0;
  for (int i = 1; i < n_scan; ++i)
    if (phis[i] < phis[k]) k = i;
  if (k == n_scan - 1)
    throw NumericError("spreading_speed: minimizer outside bracket; extend nu range");
  if (k == 0)
    throw NumericError("spreading_speed: minimizer at the left scan edge; extend nu range");

  // golden-section refinement on [nu_{k-1}, nu_{k+1}]
  auto phi = [&](double nu) { return log_lambda_fn(nu) / nu; };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = nus[k - 1], b = nus[k + 1];
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = phi(x1), f2 = phi(x2);
  while (b - a > 1e-8) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = phi(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = phi(x2);
    }
  }
  report.nu_star = 0.5 * (a + b);
  report.c_star = phi(report.nu_star);
  report.samples.emplace_back(report.nu_star,
                              std::exp(log_lambda_fn(report.nu_star)));
  report.phis.push_back(report.c_star);
  return report;
}

}  // namespace

SpeedReport spreading_speed(const ScalarShiftModel& model, Side side) {
  const double b = side == Side::plus ? model.b_plus : model.b_minus;
  if (!(b > 1.0))
    throw NumericError("spreading_speed: linearization at 0 is not unstable (f'_pm(0) <= 1)");
  return minimize_phi(side, [&](double nu) {
    CharacteristicParams p;
    p.a = model.d * nu * nu - model.mu;
    p.b = model.mu * b;
    p.tau = model.tau;
    return principal_root(p);  // log lambda
  });
}

SpeedReport spreading_speed(const CooperativeModel& model, Side side) {
  const Matrix& a = side == Side::plus ? model.a_plus : model.a_minus;
  const double rho0 = perron(matrix_exp(a)).rho;  // e^{s(A)}
  if (!(rho0 > 1.0 + 1e-14))
    throw NumericError("spreading_speed: s(A) <= 0, limiting system not unstable at 0");
  SpeedReport report =
      minimize_phi(side, [&](double nu) { return log_lambda_matrix(model, side, nu); });
  Matrix m = (side == Side::plus ? model.a_plus : model.a_minus);
  for (int i = 0; i < model.n_components; ++i)
    m(i, i) += report.nu_star * report.nu_star * model.diffusivities[i];
  report.perron_vector = perron(matrix_exp(m)).v;
  return report;
}

FrameSpeeds lab_frame_speeds(const ScalarShiftModel& model, const SpeedReport& plus,
                             const SpeedReport& minus) {
  FrameSpeeds fs;
  fs.lab_right = plus.c_star;
  fs.lab_left = minus.c_star;
  fs.comoving_right = plus.c_star - model.c;
  fs.comoving_left = minus.c_star + model.c;
  return fs;
}

}  // namespace propagate

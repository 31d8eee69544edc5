#include "propagate/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "propagate/io.hpp"
#include "propagate/speeds.hpp"

namespace propagate {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& sec, const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("[" + sec + "] " + key + ": not a number: '" + v + "'");
  }
}

int to_int(const std::string& sec, const std::string& key, const std::string& v) {
  const double d = to_double(sec, key, v);
  const int i = static_cast<int>(std::lround(d));
  if (std::fabs(d - i) > 1e-9) throw ConfigError("[" + sec + "] " + key + ": not an integer");
  return i;
}

std::vector<double> to_list(const std::string& sec, const std::string& key,
                            const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(sec, key, item));
  }
  if (out.empty()) throw ConfigError("[" + sec + "] " + key + ": empty list");
  return out;
}

// Tracks which keys were consumed so unknown keys can be reported by name.
struct Reader {
  const Ini& ini;
  std::set<std::string> used;

  bool has(const std::string& sec, const std::string& key) {
    return ini.has(sec, key);
  }
  std::string str(const std::string& sec, const std::string& key, const std::string& dflt) {
    used.insert(sec + "." + key);
    return ini.has(sec, key) ? ini.get(sec, key) : dflt;
  }
  std::string require(const std::string& sec, const std::string& key) {
    used.insert(sec + "." + key);
    if (!ini.has(sec, key)) throw ConfigError("[" + sec + "] missing required key '" + key + "'");
    return ini.get(sec, key);
  }
  double num(const std::string& sec, const std::string& key, double dflt) {
    used.insert(sec + "." + key);
    return ini.has(sec, key) ? to_double(sec, key, ini.get(sec, key)) : dflt;
  }
  double require_num(const std::string& sec, const std::string& key) {
    return to_double(sec, key, require(sec, key));
  }
  int integer(const std::string& sec, const std::string& key, int dflt) {
    used.insert(sec + "." + key);
    return ini.has(sec, key) ? to_int(sec, key, ini.get(sec, key)) : dflt;
  }

  void check_unknown() const {
    for (const auto& [sec, kv] : ini.sections)
      for (const auto& [key, value] : kv) {
        (void)value;
        if (!used.count(sec + "." + key))
          throw ConfigError("unknown key [" + sec + "] " + key);
      }
  }
};

}  // namespace

bool Ini::has(const std::string& sec, const std::string& key) const {
  auto it = sections.find(sec);
  return it != sections.end() && it->second.count(key) > 0;
}

std::string Ini::get(const std::string& sec, const std::string& key) const {
  return sections.at(sec).at(key);
}

void Ini::set(const std::string& sec, const std::string& key, const std::string& value) {
  if (!sections.count(sec)) {
    section_order.push_back(sec);
    sections[sec] = {};
    key_order[sec] = {};
  }
  if (!sections[sec].count(key)) key_order[sec].push_back(key);
  sections[sec][key] = value;
}

std::string Ini::serialize() const {
  std::ostringstream os;
  for (const std::string& sec : section_order) {
    os << "[" << sec << "]\n";
    for (const std::string& key : key_order.at(sec))
      os << key << " = " << sections.at(sec).at(key) << "\n";
    os << "\n";
  }
  return os.str();
}

Ini parse_ini(const std::string& text) {
  Ini ini;
  std::string current;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
      if (!ini.sections.count(current)) {
        ini.section_order.push_back(current);
        ini.sections[current] = {};
        ini.key_order[current] = {};
      }
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    if (current.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    ini.set(current, key, value);
  }
  return ini;
}

namespace {

TabulatedReaction load_table(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream is(text);
  std::string line;
  std::vector<std::array<double, 3>> rows;
  bool first = true;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (first) {  // header s,u,f
      first = false;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::array<double, 3> row{};
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(ss, cell, ',')) throw ConfigError("reaction table: short row");
      row[k] = to_double("model", "table", trim(cell));
    }
    rows.push_back(row);
  }
  std::set<double> s_set, u_set;
  for (const auto& r : rows) {
    s_set.insert(r[0]);
    u_set.insert(r[1]);
  }
  TabulatedReaction tab;
  tab.s_nodes.assign(s_set.begin(), s_set.end());
  tab.u_nodes.assign(u_set.begin(), u_set.end());
  tab.f.assign(tab.s_nodes.size() * tab.u_nodes.size(),
               std::numeric_limits<double>::quiet_NaN());
  auto index_of = [](const std::vector<double>& v, double x) {
    return static_cast<size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };
  for (const auto& r : rows)
    tab.f[index_of(tab.s_nodes, r[0]) * tab.u_nodes.size() + index_of(tab.u_nodes, r[1])] =
        r[2];
  for (double v : tab.f)
    if (std::isnan(v)) throw ConfigError("reaction table: incomplete rectangular grid");
  return tab;
}

double scalar_reaction_lipschitz(const ScalarShiftModel& m) {
  double lf = 0.0;
  const double span = 20.0 * m.transition_width;
  const double h = 1e-6 * std::max(1.0, m.cap);
  for (int is = 0; is <= 40; ++is) {
    const double s = -span + 2.0 * span * is / 40.0;
    for (int iu = 0; iu <= 40; ++iu) {
      const double u = m.cap * iu / 40.0;
      lf = std::max(lf, std::fabs(m.f(s, u + h) - m.f(s, u)) / h);
    }
  }
  return m.mu * std::max(1.0, lf);
}

double coop_reaction_lipschitz(const CooperativeModel& m) {
  double lf = 0.0;
  const double span = 20.0 * m.transition_width;
  const int n = m.n_components;
  std::vector<double> u(n), fp(n), fm(n);
  for (int is = 0; is <= 30; ++is) {
    const double x = -span + 2.0 * span * is / 30.0;
    for (int iu = 0; iu <= 30; ++iu) {
      for (int k = 0; k < n; ++k) u[k] = m.cap[k] * iu / 30.0;
      for (int col = 0; col < n; ++col) {
        std::vector<double> up(u), um(u);
        up[col] += 1e-6;
        um[col] = std::max(0.0, um[col] - 1e-6);
        m.f(x, up.data(), fp.data());
        m.f(x, um.data(), fm.data());
        double colsum = 0.0;
        for (int r = 0; r < n; ++r) colsum += std::fabs(fp[r] - fm[r]) / (up[col] - um[col]);
        lf = std::max(lf, colsum);
      }
    }
  }
  return std::max(1.0, lf);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  cfg.ini = parse_ini(text);
  Reader r{cfg.ini, {}};

  // ---- model ----
  const std::string kind = r.require("model", "kind");
  cfg.model_kind = kind;
  if (kind == "fisher") {
    cfg.scalar = builtin_fisher();
    // optional overrides of the free knobs
    const double c = r.num("model", "c", 0.0);
    const double tau = r.num("model", "tau", 0.0);
    if (c != 0.0 || tau != 0.0)
      cfg.scalar = builtin_shifted_logistic(1.0, 1.0, 1.0, 1.0, 1.0, tau, c);
  } else if (kind == "shifted_logistic") {
    cfg.scalar = builtin_shifted_logistic(
        r.require_num("model", "beta_minus"), r.require_num("model", "beta_plus"),
        r.num("model", "w", 1.0), r.require_num("model", "mu"), r.num("model", "d", 1.0),
        r.num("model", "tau", 0.0), r.num("model", "c", 0.0));
  } else if (kind == "shifted_ricker") {
    cfg.scalar = builtin_shifted_ricker(
        r.require_num("model", "p_minus"), r.require_num("model", "p_plus"),
        r.num("model", "w", 1.0), r.require_num("model", "mu"), r.num("model", "d", 1.0),
        r.num("model", "tau", 0.0), r.num("model", "c", 0.0));
  } else if (kind == "cooperative_pair") {
    cfg.is_cooperative = true;
    cfg.coop = builtin_cooperative_pair(
        r.require_num("model", "beta1_minus"), r.require_num("model", "beta1_plus"),
        r.require_num("model", "beta2_minus"), r.require_num("model", "beta2_plus"),
        r.require_num("model", "kappa"), r.num("model", "w", 1.0),
        r.num("model", "d1", 1.0), r.num("model", "d2", 1.0));
  } else if (kind == "tabulated") {
    const TabulatedReaction tab = load_table(r.require("model", "table"));
    cfg.scalar = make_tabulated_scalar_model(tab, r.require_num("model", "mu"),
                                             r.num("model", "d", 1.0),
                                             r.num("model", "tau", 0.0),
                                             r.num("model", "c", 0.0));
  } else {
    throw ConfigError("[model] kind: unknown model kind '" + kind + "'");
  }

  // ---- speed predictions (echo metadata + domain margin) ----
  if (cfg.is_cooperative) {
    cfg.c_star_plus_pred = spreading_speed(cfg.coop, Side::plus).c_star;
    cfg.c_star_minus_pred = spreading_speed(cfg.coop, Side::minus).c_star;
  } else {
    cfg.c_star_plus_pred = spreading_speed(cfg.scalar, Side::plus).c_star;
    cfg.c_star_minus_pred = spreading_speed(cfg.scalar, Side::minus).c_star;
  }

  // ---- grid ----
  {
    const double x_min = r.require_num("grid", "x_min");
    const double x_max = r.require_num("grid", "x_max");
    if (!(x_min < x_max)) throw ConfigError("[grid] inverted bounds (x_min >= x_max)");
    int n;
    if (r.has("grid", "n")) {
      n = r.integer("grid", "n", 0);
    } else if (r.has("grid", "dx")) {
      const double dx = r.require_num("grid", "dx");
      if (!(dx > 0.0)) throw ConfigError("[grid] dx must be positive");
      n = static_cast<int>(std::lround((x_max - x_min) / dx)) + 1;
      if (std::fabs((x_max - x_min) / (n - 1) - dx) > 1e-9 * dx)
        cfg.adjustments.push_back("grid dx adjusted to span the domain exactly");
    } else {
      throw ConfigError("[grid] missing required key 'n' or 'dx'");
    }
    cfg.grid = make_grid(x_min, x_max, n);
  }

  // ---- time ----
  cfg.dt_requested = r.require_num("time", "dt");
  if (!(cfg.dt_requested > 0.0)) throw ConfigError("[time] dt must be positive");
  cfg.t_end = r.require_num("time", "t_end");
  if (!(cfg.t_end >= 0.0)) throw ConfigError("[time] t_end must be nonnegative");
  cfg.snapshot_stride = r.integer("time", "snapshot_stride", 1);
  if (cfg.snapshot_stride < 1) throw ConfigError("[time] snapshot_stride must be >= 1");
  const std::string frame = r.str("time", "frame", "lab");
  if (frame == "lab")
    cfg.frame = Frame::lab;
  else if (frame == "comoving")
    cfg.frame = Frame::comoving;
  else
    throw ConfigError("[time] frame must be 'lab' or 'comoving'");
  cfg.blowup_guard = r.num("time", "blowup_guard", 1e8);

  // dt adjustment: reaction bound, CN monotone substep bound, tau divisibility
  {
    double dt = cfg.dt_requested;
    const double lip = cfg.is_cooperative ? coop_reaction_lipschitz(cfg.coop)
                                          : scalar_reaction_lipschitz(cfg.scalar);
    const double bound = 0.1 / lip;
    if (dt > bound * (1.0 + 1e-12)) {
      dt = bound;
      cfg.adjustments.push_back("dt lowered to " + format_g17(dt) +
                                " by the reaction bound 0.1/(mu*max|df/du|)");
    }
    double dmax = cfg.is_cooperative
                      ? *std::max_element(cfg.coop.diffusivities.begin(),
                                          cfg.coop.diffusivities.end())
                      : cfg.scalar.d;
    const double cn_bound = 2.0 * cfg.grid.dx * cfg.grid.dx / dmax;
    if (dt > cn_bound * (1.0 + 1e-12)) {
      dt = cn_bound;
      cfg.adjustments.push_back("dt lowered to " + format_g17(dt) +
                                " to keep the split diffusion steps monotone (dt <= 2 dx^2/d)");
    }
    const double tau = cfg.is_cooperative ? 0.0 : cfg.scalar.tau;
    if (tau > 0.0) {
      const int m = std::max(1, static_cast<int>(std::ceil(tau / dt - 1e-12)));
      const double adjusted = tau / m;
      if (std::fabs(adjusted - dt) > 1e-15) {
        cfg.adjustments.push_back("dt adjusted to " + format_g17(adjusted) +
                                  " so tau is an integer multiple of dt");
      }
      dt = adjusted;
    }
    cfg.dt = dt;
  }

  // domain margin: width >= 2 * (max predicted speed) * t_end + 20
  {
    const double c_model = cfg.is_cooperative ? 0.0 : std::fabs(cfg.scalar.c);
    const double vmax =
        std::max({c_model, cfg.c_star_plus_pred, cfg.c_star_minus_pred});
    const double need = 2.0 * vmax * cfg.t_end + 20.0;
    if (cfg.grid.x_max - cfg.grid.x_min < need) {
      std::ostringstream os;
      os << "domain margin: width " << (cfg.grid.x_max - cfg.grid.x_min)
         << " below 2*(max predicted speed)*t_end + 20 = " << need;
      throw ConfigError(os.str());
    }
  }

  // ---- ic ----
  cfg.ic.kind = r.str("ic", "kind", "bump_h");
  cfg.ic.amplitude = r.num("ic", "amplitude",
                           cfg.is_cooperative ? 1.0 : cfg.scalar.u_star_plus);
  cfg.ic.d = r.num("ic", "d", 1.0);
  cfg.ic.rho = r.num("ic", "rho", 1.0);
  if (r.has("ic", "value"))
    cfg.ic.constant = to_list("ic", "value", r.str("ic", "value", ""));
  if (cfg.ic.kind != "bump_h" && cfg.ic.kind != "xi" && cfg.ic.kind != "xi_tilde" &&
      cfg.ic.kind != "constant")
    throw ConfigError("[ic] kind must be bump_h | xi | xi_tilde | constant");

  // ---- analysis ----
  const double ustar = cfg.is_cooperative
                           ? *std::max_element(cfg.coop.u_star_plus.begin(),
                                               cfg.coop.u_star_plus.end())
                           : cfg.scalar.u_star_plus;
  cfg.analysis.epsilon = r.num("analysis", "epsilon", 0.2);
  cfg.analysis.t_min = r.num("analysis", "t_min", 0.5 * cfg.t_end);
  cfg.analysis.level_fraction = r.num("analysis", "level_fraction", 0.5);
  cfg.analysis.window_fraction = r.num("analysis", "window_fraction", 0.4);
  cfg.analysis.inner_offset = r.num("analysis", "inner_offset", 5.0);
  cfg.analysis.tol_spreading = r.num("analysis", "tol_spreading", 0.05 * ustar);
  cfg.analysis.tol_annihilation = r.num("analysis", "tol_annihilation", 0.01 * ustar);
  cfg.analysis.tol_attractivity = r.num("analysis", "tol_attractivity", 0.05 * ustar);
  cfg.analysis.tol_sandwich = r.num("analysis", "tol_sandwich", 1e-8);
  cfg.analysis.tol_wave_tails = r.num("analysis", "tol_wave_tails", 1e-3);

  // ---- wave ----
  cfg.wave.z_min = r.num("wave", "z_min", -120.0);
  cfg.wave.z_max = r.num("wave", "z_max", 80.0);
  cfg.wave.dz = r.num("wave", "dz", 0.1);
  cfg.wave.tol_steady = r.num("wave", "tol_steady", 1e-8);
  cfg.wave.t_max = r.num("wave", "t_max", 400.0);

  // ---- sweep ----
  if (r.has("sweep", "parameter")) {
    cfg.sweep.parameter = r.str("sweep", "parameter", "");
    cfg.sweep.values = to_list("sweep", "values", r.require("sweep", "values"));
  }

  // ---- output ----
  cfg.out_dir = r.str("output", "dir", "out");

  r.check_unknown();

  // canonical echo: resolved values, sorted sections
  {
    std::ostringstream os;
    os << "model = " << (cfg.is_cooperative ? cfg.coop.id : cfg.scalar.id) << "\n";
    os << "grid = [" << format_g17(cfg.grid.x_min) << "," << format_g17(cfg.grid.x_max)
       << "] n=" << cfg.grid.n << " dx=" << format_g17(cfg.grid.dx) << "\n";
    os << "dt_requested = " << format_g17(cfg.dt_requested) << "\n";
    os << "dt = " << format_g17(cfg.dt) << "\n";
    os << "t_end = " << format_g17(cfg.t_end) << "\n";
    os << "frame = " << (cfg.frame == Frame::lab ? "lab" : "comoving") << "\n";
    os << "snapshot_stride = " << cfg.snapshot_stride << "\n";
    os << "ic = " << cfg.ic.kind << " amplitude=" << format_g17(cfg.ic.amplitude) << "\n";
    os << "c_star_prediction_plus = " << format_g17(cfg.c_star_plus_pred) << "\n";
    os << "c_star_prediction_minus = " << format_g17(cfg.c_star_minus_pred) << "\n";
    for (const std::string& a : cfg.adjustments) os << "adjusted: " << a << "\n";
    cfg.echo_text = os.str();
    cfg.hash = hash_hex(cfg.echo_text);
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  return parse_config(read_text_file(path));
}

Field build_ic(const RunConfig& cfg) {
  const int nc = cfg.is_cooperative ? cfg.coop.n_components : 1;
  if (cfg.ic.kind == "bump_h") return ic_bump_h(cfg.grid, cfg.ic.amplitude, nc);
  if (cfg.ic.kind == "xi") return ic_xi(cfg.grid, cfg.ic.d, nc);
  if (cfg.ic.kind == "xi_tilde") return ic_xi_tilde(cfg.grid, cfg.ic.d, cfg.ic.rho, nc);
  if (cfg.ic.kind == "constant") {
    std::vector<double> v = cfg.ic.constant;
    if (v.empty()) v.assign(nc, cfg.ic.amplitude);
    if (static_cast<int>(v.size()) != nc)
      throw ConfigError("[ic] value: expected " + std::to_string(nc) + " components");
    return ic_constant(cfg.grid, v);
  }
  throw ConfigError("[ic] kind: unknown ic kind");
}

SimConfig sim_config(const RunConfig& cfg) {
  SimConfig sc;
  sc.dt = cfg.dt;
  sc.t_end = cfg.t_end;
  sc.frame = cfg.frame;
  sc.snapshot_stride = cfg.snapshot_stride;
  sc.blowup_guard = cfg.blowup_guard;
  return sc;
}

}  // namespace propagate

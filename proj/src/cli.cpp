#include "propagate/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "propagate/analysis.hpp"
#include "propagate/io.hpp"
#include "propagate/sim.hpp"
#include "propagate/speeds.hpp"
#include "propagate/waves.hpp"

namespace propagate {

namespace {

using nlohmann::json;

json grid_json(const Grid1D& g) {
  return json{{"x_min", g.x_min}, {"x_max", g.x_max}, {"n", g.n}, {"dx", g.dx}};
}

json verdict_json(const Verdict& v) {
  return json{{"clause", v.clause},       {"region", v.region},
              {"sup_error", v.sup_error}, {"tolerance", v.tolerance},
              {"pass", v.pass},           {"times", v.times},
              {"sup_curve", v.sup_curve}, {"note", v.note}};
}

json meta_json(const RunConfig& cfg, const Trajectory& traj) {
  json j;
  j["config_hash"] = cfg.hash;
  j["config_echo"] = cfg.echo_text;
  j["grid"] = grid_json(cfg.grid);
  j["dt_requested"] = cfg.dt_requested;
  j["dt"] = cfg.dt;
  j["t_end"] = cfg.t_end;
  j["frame"] = cfg.frame == Frame::lab ? "lab" : "comoving";
  j["model"] = cfg.is_cooperative ? cfg.coop.id : cfg.scalar.id;
  j["adjustments"] = cfg.adjustments;
  j["invariants"] = json{{"min_value", traj.min_value},
                         {"max_value", traj.max_value},
                         {"boundary_activity", traj.boundary_activity}};
  return j;
}

Trajectory simulate(const RunConfig& cfg) {
  const Field ic = build_ic(cfg);
  const SimConfig sc = sim_config(cfg);
  return cfg.is_cooperative ? run(cfg.coop, ic, sc) : run(cfg.scalar, ic, sc);
}

WaveProfile solve_wave(const RunConfig& cfg) {
  const int n = static_cast<int>(std::lround((cfg.wave.z_max - cfg.wave.z_min) / cfg.wave.dz)) + 1;
  const Grid1D wg = make_grid(cfg.wave.z_min, cfg.wave.z_max, n);
  return cfg.is_cooperative
             ? solve_steady_state(cfg.coop, wg, cfg.wave.tol_steady, cfg.wave.t_max)
             : solve_forced_wave(cfg.scalar, wg, cfg.wave.tol_steady, cfg.wave.t_max);
}

json wave_json(const RunConfig& cfg, const WaveProfile& wp) {
  json j;
  j["config_hash"] = cfg.hash;
  j["speed"] = wp.speed;
  j["residual_sup"] = wp.residual_sup;
  j["tail_plus"] = wp.tail_plus;
  j["tail_minus"] = wp.tail_minus;
  j["converged"] = wp.converged;
  j["oscillating"] = wp.oscillating;
  j["time_used"] = wp.time_used;
  return j;
}

}  // namespace

int cmd_speed(const RunConfig& cfg, Side side, const std::string& out_dir) {
  const SpeedReport report = cfg.is_cooperative ? spreading_speed(cfg.coop, side)
                                                : spreading_speed(cfg.scalar, side);
  std::printf("c_star=%.6f, nu_star=%.6f\n", report.c_star, report.nu_star);
  ensure_dir(out_dir);
  const std::string name = side == Side::plus ? "speed_plus.csv" : "speed_minus.csv";
  write_text_file(out_dir + "/" + name, speed_samples_csv(report));
  json j;
  j["config_hash"] = cfg.hash;
  j["side"] = side == Side::plus ? "plus" : "minus";
  j["c_star"] = report.c_star;
  j["nu_star"] = report.nu_star;
  if (!report.perron_vector.empty()) j["perron_vector"] = report.perron_vector;
  write_text_file(out_dir + "/" + (side == Side::plus ? "speed_plus.json" : "speed_minus.json"),
                  j.dump(2) + "\n");
  return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
  const Trajectory traj = simulate(cfg);
  ensure_dir(out_dir);
  write_text_file(out_dir + "/trajectory.csv", trajectory_csv(traj));
  write_text_file(out_dir + "/meta.json", meta_json(cfg, traj).dump(2) + "\n");
  return 0;
}

int cmd_wave(const RunConfig& cfg, const std::string& out_dir) {
  const WaveProfile wp = solve_wave(cfg);
  ensure_dir(out_dir);
  // comoving coordinate and profile columns: z,W1[,W2,...]
  std::ostringstream csv;
  csv << "z";
  for (int k = 0; k < wp.w.n_components; ++k) csv << ",W" << (k + 1);
  csv << "\n";
  for (int i = 0; i < wp.w.grid.n; ++i) {
    csv << format_g17(wp.w.grid.x(i));
    for (int k = 0; k < wp.w.n_components; ++k) csv << "," << format_g17(wp.w.at(k, i));
    csv << "\n";
  }
  write_text_file(out_dir + "/wave.csv", csv.str());
  write_text_file(out_dir + "/wave_report.json", wave_json(cfg, wp).dump(2) + "\n");
  return 0;
}

int cmd_verify(const RunConfig& cfg, const std::vector<std::string>& clauses, bool strict,
               const std::string& out_dir) {
  const bool want_all = clauses.empty();
  auto wanted = [&](const std::string& c) {
    return want_all || std::find(clauses.begin(), clauses.end(), c) != clauses.end();
  };
  for (const std::string& c : clauses)
    if (c != "spreading" && c != "annihilation" && c != "wave" && c != "attractivity")
      throw ConfigError("verify: unknown clause '" + c + "'");

  const Trajectory traj = simulate(cfg);

  SpeedReport plus, minus;
  if (cfg.is_cooperative) {
    plus = spreading_speed(cfg.coop, Side::plus);
    minus = spreading_speed(cfg.coop, Side::minus);
  } else {
    plus = spreading_speed(cfg.scalar, Side::plus);
    minus = spreading_speed(cfg.scalar, Side::minus);
  }

  const AnalysisSpec& an = cfg.analysis;
  std::vector<Verdict> verdicts;

  if (wanted("spreading")) {
    verdicts.push_back(
        cfg.is_cooperative
            ? spreading_verdict(traj, cfg.coop, plus, minus, an.epsilon, an.inner_offset,
                                an.t_min, an.tol_spreading)
            : spreading_verdict(traj, cfg.scalar, plus, minus, an.epsilon, an.t_min,
                                an.tol_spreading));
  }
  if (wanted("annihilation")) {
    verdicts.push_back(cfg.is_cooperative
                           ? annihilation_verdict(traj, cfg.coop, plus, minus, an.epsilon,
                                                  an.t_min, an.tol_annihilation)
                           : annihilation_verdict(traj, cfg.scalar, plus, minus, an.epsilon,
                                                  an.t_min, an.tol_annihilation));
  }

  WaveProfile wp;
  bool have_wave = false;
  if (wanted("wave") || wanted("attractivity")) {
    wp = solve_wave(cfg);
    have_wave = true;
  }
  if (wanted("wave")) {
    Verdict v;
    v.clause = "wave-tails";
    v.region = "tail windows (outer 5% of interior cells, 10 boundary cells excluded)";
    v.tolerance = an.tol_wave_tails;
    double err = 0.0;
    if (cfg.is_cooperative) {
      for (int k = 0; k < cfg.coop.n_components; ++k) {
        err = std::max(err, std::fabs(wp.tail_plus[k] - cfg.coop.u_star_plus[k]));
        err = std::max(err, std::fabs(wp.tail_minus[k] - cfg.coop.u_star_minus[k]));
      }
    } else {
      err = std::max(std::fabs(wp.tail_plus[0] - cfg.scalar.u_star_plus),
                     std::fabs(wp.tail_minus[0] - cfg.scalar.u_star_minus));
    }
    v.sup_error = err;
    v.pass = wp.converged && err <= v.tolerance;
    if (!wp.converged) v.note = "relaxation did not reach tol_steady by t_max";
    verdicts.push_back(v);
  }
  if (wanted("attractivity")) {
    verdicts.push_back(cfg.is_cooperative
                           ? attractivity_verdict(traj, cfg.coop, wp, plus, minus,
                                                  an.epsilon, an.t_min, an.tol_attractivity)
                           : attractivity_verdict(traj, cfg.scalar, wp, plus, minus,
                                                  an.epsilon, an.t_min, an.tol_attractivity));
  }

  ensure_dir(out_dir);

  const double ustar = cfg.is_cooperative
                           ? *std::max_element(cfg.coop.u_star_plus.begin(),
                                               cfg.coop.u_star_plus.end())
                           : cfg.scalar.u_star_plus;
  const double level = an.level_fraction * ustar;
  const FrontTrace right = track_front(traj, level, FrontDirection::rightmost, 0);
  const FrontTrace left = track_front(traj, level, FrontDirection::leftmost, 0);
  write_text_file(out_dir + "/fronts.csv", front_csv(right, left));

  json j;
  j["config_hash"] = cfg.hash;
  j["speeds"] = json{{"c_star_plus", plus.c_star},
                     {"nu_star_plus", plus.nu_star},
                     {"c_star_minus", minus.c_star},
                     {"nu_star_minus", minus.nu_star}};
  j["clauses"] = json::array();
  for (const Verdict& v : verdicts) j["clauses"].push_back(verdict_json(v));
  if (have_wave) j["wave"] = wave_json(cfg, wp);
  write_text_file(out_dir + "/verdicts.json", j.dump(2) + "\n");

  bool all_pass = true;
  for (const Verdict& v : verdicts) {
    std::printf("%-14s %s  sup_error=%.6g  tol=%.6g\n", v.clause.c_str(),
                v.pass ? "PASS" : "FAIL", v.sup_error, v.tolerance);
    all_pass = all_pass && v.pass;
  }
  return (strict && !all_pass) ? 4 : 0;
}

int cmd_sweep(const RunConfig& cfg, int jobs, const std::string& out_dir) {
  if (cfg.sweep.parameter.empty())
    throw ConfigError("sweep: config needs a [sweep] section with parameter and values");
  const size_t dot = cfg.sweep.parameter.find('.');
  if (dot == std::string::npos)
    throw ConfigError("sweep: parameter must be 'section.key'");
  const std::string sec = cfg.sweep.parameter.substr(0, dot);
  const std::string key = cfg.sweep.parameter.substr(dot + 1);

  struct Row {
    double value = 0.0;
    double speed = 0.0;
    double r_squared = 0.0;
    bool ok = false;
    std::string error;
  };
  std::vector<Row> rows(cfg.sweep.values.size());

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= cfg.sweep.values.size()) return;
      Row& row = rows[i];
      row.value = cfg.sweep.values[i];
      try {
        Ini ini = cfg.ini;
        ini.set(sec, key, format_g17(row.value));
        ini.sections.erase("sweep");  // avoid recursion in the echo
        auto it = std::find(ini.section_order.begin(), ini.section_order.end(), "sweep");
        if (it != ini.section_order.end()) ini.section_order.erase(it);
        const RunConfig sub = parse_config(ini.serialize());
        const Trajectory traj = simulate(sub);
        const double ustar = sub.is_cooperative
                                 ? *std::max_element(sub.coop.u_star_plus.begin(),
                                                     sub.coop.u_star_plus.end())
                                 : sub.scalar.u_star_plus;
        const FrontTrace tr = track_front(traj, sub.analysis.level_fraction * ustar,
                                          FrontDirection::rightmost, 0);
        const SpeedFit fit = estimate_speed(tr, sub.analysis.window_fraction);
        row.speed = fit.speed;
        row.r_squared = fit.r_squared;
        row.ok = true;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };

  const int n_workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(cfg.sweep.values.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::ostringstream os;
  os << "value,front_speed,r_squared,status\n";
  for (const Row& row : rows) {
    os << format_g17(row.value) << ",";
    if (row.ok)
      os << format_g17(row.speed) << "," << format_g17(row.r_squared) << ",ok\n";
    else
      os << ",,error\n";
  }
  ensure_dir(out_dir);
  write_text_file(out_dir + "/sweep.csv", os.str());
  json j;
  j["config_hash"] = cfg.hash;
  j["parameter"] = cfg.sweep.parameter;
  j["values"] = cfg.sweep.values;
  j["errors"] = json::array();
  for (const Row& row : rows)
    if (!row.ok) j["errors"].push_back(json{{"value", row.value}, {"message", row.error}});
  write_text_file(out_dir + "/sweep.json", j.dump(2) + "\n");

  for (const Row& row : rows)
    if (!row.ok) throw NumericError("sweep value " + format_g17(row.value) + ": " + row.error);
  return 0;
}

}  // namespace propagate

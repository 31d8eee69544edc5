#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "propagate/cli.hpp"
#include "propagate/errors.hpp"
#include "propagate/io.hpp"

namespace {

int default_jobs() {
  if (const char* env = std::getenv("PROPAGATE_JOBS")) {
    const int j = std::atoi(env);
    if (j >= 1) return j;
  }
  return 1;
}

void emit_error(const std::string& kind, const std::string& message) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  std::fprintf(stderr, "%s\n", j.dump().c_str());
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"propagate: spreading speeds, forced waves and propagation verdicts for "
               "reaction-diffusion models with shifting or asymptotically homogeneous "
               "habitats"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::string side_str = "plus";
  std::string clause_list;
  bool strict = false;
  int jobs = default_jobs();

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file")->required();
    sub->add_option("--out", out_override, "output directory (overrides [output] dir)");
  };

  CLI::App* speed = app.add_subcommand("speed", "spreading speed of a limiting system");
  add_common(speed);
  speed->add_option("--side", side_str, "plus | minus")->check(CLI::IsMember({"plus", "minus"}));

  CLI::App* simulate = app.add_subcommand("simulate", "time integration, trajectory.csv + meta.json");
  add_common(simulate);

  CLI::App* wave = app.add_subcommand("wave", "forced traveling wave / steady state");
  add_common(wave);

  CLI::App* verify = app.add_subcommand("verify", "theorem-clause verdicts");
  add_common(verify);
  verify->add_option("--clauses", clause_list,
                     "comma list: spreading,annihilation,wave,attractivity (default all)");
  verify->add_flag("--strict", strict, "exit 4 when a verdict fails");

  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep, combined sweep.csv");
  add_common(sweep);
  sweep->add_option("--jobs", jobs, "concurrent runs (default $PROPAGATE_JOBS or 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    const propagate::RunConfig cfg = propagate::load_config_file(config_path);
    const std::string out = out_override.empty() ? cfg.out_dir : out_override;
    if (speed->parsed())
      return propagate::cmd_speed(
          cfg, side_str == "plus" ? propagate::Side::plus : propagate::Side::minus, out);
    if (simulate->parsed()) return propagate::cmd_simulate(cfg, out);
    if (wave->parsed()) return propagate::cmd_wave(cfg, out);
    if (verify->parsed())
      return propagate::cmd_verify(cfg, split_list(clause_list), strict, out);
    if (sweep->parsed()) return propagate::cmd_sweep(cfg, jobs, out);
  } catch (const propagate::ConfigError& e) {
    emit_error("config", e.what());
    return 2;
  } catch (const propagate::NumericError& e) {
    emit_error("numeric", e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 3;
  }
  return 0;
}

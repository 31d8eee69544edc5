#pragma once

#include <string>
#include <vector>

#include "propagate/config.hpp"

namespace propagate {

// Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 verdict fail (verify --strict).
int cmd_speed(const RunConfig& cfg, Side side, const std::string& out_dir);
int cmd_simulate(const RunConfig& cfg, const std::string& out_dir);
int cmd_wave(const RunConfig& cfg, const std::string& out_dir);
int cmd_verify(const RunConfig& cfg, const std::vector<std::string>& clauses, bool strict,
               const std::string& out_dir);
int cmd_sweep(const RunConfig& cfg, int jobs, const std::string& out_dir);

}  // namespace propagate

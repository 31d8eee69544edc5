#pragma once

#include <cstdint>
#include <string>

#include "propagate/analysis.hpp"
#include "propagate/grid.hpp"
#include "propagate/waves.hpp"

namespace propagate {

// 17-significant-digit decimal text; round-trips doubles exactly.
std::string format_g17(double v);

uint64_t fnv1a64(const std::string& s);
std::string hash_hex(const std::string& s);

void ensure_dir(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// header x,u1[,u2,...], one row per grid node
std::string field_csv(const Field& f);
// long format t,x,u1[,u2,...]
std::string trajectory_csv(const Trajectory& traj);
std::string speed_samples_csv(const SpeedReport& report);
std::string front_csv(const FrontTrace& right, const FrontTrace& left);

}  // namespace propagate

#include "propagate/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace propagate {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const std::string& s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(s)));
  return buf;
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw ConfigError("cannot create output directory " + path + ": " + ec.message());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string field_csv(const Field& f) {
  std::ostringstream os;
  os << "x";
  for (int k = 0; k < f.n_components; ++k) os << ",u" << (k + 1);
  os << "\n";
  for (int i = 0; i < f.grid.n; ++i) {
    os << format_g17(f.grid.x(i));
    for (int k = 0; k < f.n_components; ++k) os << "," << format_g17(f.at(k, i));
    os << "\n";
  }
  return os.str();
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  const int nc = traj.snapshots.empty() ? 1 : traj.snapshots.front().n_components;
  os << "t,x";
  for (int k = 0; k < nc; ++k) os << ",u" << (k + 1);
  os << "\n";
  for (size_t s = 0; s < traj.snapshots.size(); ++s) {
    const Field& f = traj.snapshots[s];
    for (int i = 0; i < f.grid.n; ++i) {
      os << format_g17(traj.times[s]) << "," << format_g17(f.grid.x(i));
      for (int k = 0; k < nc; ++k) os << "," << format_g17(f.at(k, i));
      os << "\n";
    }
  }
  return os.str();
}

std::string speed_samples_csv(const SpeedReport& report) {
  std::ostringstream os;
  os << "nu,lambda,phi\n";
  for (size_t i = 0; i < report.samples.size(); ++i)
    os << format_g17(report.samples[i].first) << ","
       << format_g17(report.samples[i].second) << "," << format_g17(report.phis[i])
       << "\n";
  return os.str();
}

std::string front_csv(const FrontTrace& right, const FrontTrace& left) {
  std::ostringstream os;
  os << "t,right,left\n";
  for (size_t i = 0; i < right.times.size(); ++i) {
    os << format_g17(right.times[i]) << ",";
    if (right.present[i]) os << format_g17(right.positions[i]);
    os << ",";
    if (i < left.times.size() && left.present[i]) os << format_g17(left.positions[i]);
    os << "\n";
  }
  return os.str();
}

}  // namespace propagate

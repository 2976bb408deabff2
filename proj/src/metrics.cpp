#include "vbcsim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "vbcsim/errors.hpp"

namespace vbcsim::harness {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

std::string to_csv(const std::vector<MetricRecord>& records) {
  std::string out =
      "experiment,config_hash,seed,x_name,x_value,system,metric,value,stderr,"
      "n_trials\n";
  for (const auto& r : records) {
    out += r.experiment;
    out += ',';
    out += r.config_hash;
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += r.x_name;
    out += ',';
    out += format_double(r.x_value);
    out += ',';
    out += r.system;
    out += ',';
    out += r.metric;
    out += ',';
    out += format_double(r.value);
    out += ',';
    out += format_double(r.stderr_value);
    out += ',';
    out += std::to_string(r.n_trials);
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<MetricRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot write '" + path + "'");
  }
  out << to_csv(records);
}

void write_manifest(const std::string& path, const std::string& config_json,
                    std::uint64_t seed, const std::string& config_hash,
                    double wall_seconds) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(config_json);
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  j["wall_seconds"] = wall_seconds;
  j["version"] = "1.0";
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot write '" + path + "'");
  }
  out << j.dump(2) << "\n";
}

MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr ms;
  const std::size_t n = xs.size();
  if (n == 0) return ms;
  double sum = 0.0;
  for (double x : xs) sum += x;
  ms.mean = sum / static_cast<double>(n);
  if (n < 2) return ms;
  double ss = 0.0;
  for (double x : xs) ss += (x - ms.mean) * (x - ms.mean);
  ms.stderr_value = std::sqrt(ss / (static_cast<double>(n) * (static_cast<double>(n) - 1.0)));
  return ms;
}

}  // namespace vbcsim::harness

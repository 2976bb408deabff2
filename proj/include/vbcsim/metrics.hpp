// Result records and their serialization. The CSV layout is the stable
// contract consumed by plotting scripts; the JSON manifest captures the
// exact configuration and environment of a run.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vbcsim::harness {

struct MetricRecord {
  std::string experiment;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string x_name;   // grid axis, e.g. "snr_db", "k_tilde", "block_len"
  double x_value = 0.0;
  std::string system;   // e.g. "data_dependent/soft"
  std::string metric;   // e.g. "ber", "energy_per_user", "sum_rate"
  double value = 0.0;
  double stderr_value = 0.0;
  std::uint64_t n_trials = 0;
};

// Stable scalar formatting shared by the CSV writer and the tests.
std::string format_double(double v);

// Header: experiment,config_hash,seed,x_name,x_value,system,metric,value,stderr,n_trials
std::string to_csv(const std::vector<MetricRecord>& records);

void write_csv(const std::string& path, const std::vector<MetricRecord>& records);

// Full config echo plus seed, hash, wall time and library version.
void write_manifest(const std::string& path, const std::string& config_json,
                    std::uint64_t seed, const std::string& config_hash,
                    double wall_seconds);

// Mean and standard error of the mean; n = 0 or 1 gives stderr 0.
struct MeanStderr {
  double mean = 0.0;
  double stderr_value = 0.0;
};
MeanStderr mean_stderr(const std::vector<double>& xs);

}  // namespace vbcsim::harness

// Experiment configuration: one plain struct mirrored one-to-one by the
// JSON config file, plus validation that reports every violated constraint
// at once and the named presets for the standard experiment scales.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vbcsim::harness {

struct SimConfig {
  std::string experiment = "ber";  // energy_vs_ktilde | energy_vs_B | ber | sumrate

  int users = 8;            // K
  int antennas = 4;         // N
  int selected_users = 4;   // scheduled per block
  int block_len = 4;        // selection block length B (slots)
  int coherence_time = 4;   // fading block length T_c (slots)
  // Block length used by the data-independent strategy in BER runs; 0 means
  // same as block_len. Channel-only selection is naturally re-run once per
  // coherence interval, which this knob expresses.
  int indep_block_len = 0;

  int info_len = 512;       // L info bits per user frame
  int rate_inv = 4;         // repetitions per info bit (rate 1/rate_inv)
  int iterations = 20;      // receiver iterations

  std::vector<std::string> demods = {"genie", "soft", "hard"};
  std::vector<std::string> strategies = {"data_dependent", "data_independent"};

  std::vector<double> snr_db;         // per-info-bit SNR grid (ber)
  std::vector<double> snr_inv_n0_db;  // 1/N0 grid in dB (sumrate)
  std::vector<int> ktilde_grid;       // energy_vs_ktilde, sumrate
  std::vector<int> block_len_grid;    // energy_vs_B

  int frames_per_point = 2000;   // decoded user frames per SNR point (ber)
  int blocks_per_point = 10000;  // sampled US blocks per grid point (energy)
  std::uint64_t exhaustive_cap = 1000000;
  int sigma2_samples = 100000;   // Monte Carlo size for the interference power

  std::uint64_t seed = 1;
  int threads = 1;
  std::string output_dir = ".";

  // Every violated constraint, empty when the config is runnable.
  std::vector<std::string> validate() const;
  // Throws ConfigError listing all violations.
  void validate_or_throw() const;

  // Noise variance at a per-info-bit SNR of `snr_db` dB: the transmit SNR
  // per information bit is 1 / (2 r K N0) with r = 1 / rate_inv.
  double n0_from_snr_db(double db) const;

  std::string to_json() const;       // pretty, key-sorted
  static SimConfig from_json(const std::string& text);
  static SimConfig load(const std::string& path);

  // FNV-1a over the canonical JSON, excluding fields that do not affect
  // results (threads, output_dir). Hex string.
  std::string hash() const;
};

// desk | paper-fig3 | paper-fig4 | paper-fig5 | paper-fig6 | paper-fig7 |
// paper-fig8. Throws ConfigError on unknown names.
SimConfig preset(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace vbcsim::harness

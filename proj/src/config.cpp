#include "vbcsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vbcsim/demod.hpp"
#include "vbcsim/errors.hpp"
#include "vbcsim/selection.hpp"

namespace vbcsim::harness {

namespace {

using nlohmann::json;

json config_to_json(const SimConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["users"] = c.users;
  j["antennas"] = c.antennas;
  j["selected_users"] = c.selected_users;
  j["block_len"] = c.block_len;
  j["coherence_time"] = c.coherence_time;
  j["indep_block_len"] = c.indep_block_len;
  j["info_len"] = c.info_len;
  j["rate_inv"] = c.rate_inv;
  j["iterations"] = c.iterations;
  j["demods"] = c.demods;
  j["strategies"] = c.strategies;
  j["snr_db"] = c.snr_db;
  j["snr_inv_n0_db"] = c.snr_inv_n0_db;
  j["ktilde_grid"] = c.ktilde_grid;
  j["block_len_grid"] = c.block_len_grid;
  j["frames_per_point"] = c.frames_per_point;
  j["blocks_per_point"] = c.blocks_per_point;
  j["exhaustive_cap"] = c.exhaustive_cap;
  j["sigma2_samples"] = c.sigma2_samples;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  return j;
}

template <typename T>
void read_field(const json& j, const char* key, T* out) {
  const auto it = j.find(key);
  if (it != j.end()) {
    *out = it->get<T>();
  }
}

SimConfig config_from_json(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("config: top level must be an object");
  }
  static const char* known[] = {
      "experiment",     "users",          "antennas",       "selected_users",
      "block_len",      "coherence_time", "indep_block_len", "info_len",
      "rate_inv",       "iterations",     "demods",         "strategies",
      "snr_db",         "snr_inv_n0_db",  "ktilde_grid",    "block_len_grid",
      "frames_per_point", "blocks_per_point", "exhaustive_cap",
      "sigma2_samples", "seed",           "threads",        "output_dir"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (item.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ConfigError("config: unknown field '" + item.key() + "'");
    }
  }

  SimConfig c;
  read_field(j, "experiment", &c.experiment);
  read_field(j, "users", &c.users);
  read_field(j, "antennas", &c.antennas);
  read_field(j, "selected_users", &c.selected_users);
  read_field(j, "block_len", &c.block_len);
  read_field(j, "coherence_time", &c.coherence_time);
  read_field(j, "indep_block_len", &c.indep_block_len);
  read_field(j, "info_len", &c.info_len);
  read_field(j, "rate_inv", &c.rate_inv);
  read_field(j, "iterations", &c.iterations);
  read_field(j, "demods", &c.demods);
  read_field(j, "strategies", &c.strategies);
  read_field(j, "snr_db", &c.snr_db);
  read_field(j, "snr_inv_n0_db", &c.snr_inv_n0_db);
  read_field(j, "ktilde_grid", &c.ktilde_grid);
  read_field(j, "block_len_grid", &c.block_len_grid);
  read_field(j, "frames_per_point", &c.frames_per_point);
  read_field(j, "blocks_per_point", &c.blocks_per_point);
  read_field(j, "exhaustive_cap", &c.exhaustive_cap);
  read_field(j, "sigma2_samples", &c.sigma2_samples);
  read_field(j, "seed", &c.seed);
  read_field(j, "threads", &c.threads);
  read_field(j, "output_dir", &c.output_dir);
  return c;
}

bool is_energy(const std::string& e) {
  return e == "energy_vs_ktilde" || e == "energy_vs_B";
}

}  // namespace

std::vector<std::string> SimConfig::validate() const {
  std::vector<std::string> bad;
  const auto complain = [&bad](const std::string& s) { bad.push_back(s); };

  if (experiment != "ber" && experiment != "sumrate" && !is_energy(experiment)) {
    complain("experiment must be one of energy_vs_ktilde, energy_vs_B, ber, sumrate");
  }
  if (users < 1) complain("users must be >= 1");
  if (antennas < 1) complain("antennas must be >= 1");
  if (users < antennas) complain("users must be >= antennas (over-loaded operation)");
  if (threads < 0) complain("threads must be >= 0 (0 = hardware count)");

  const int max_sel = std::min(users, antennas);
  if (experiment != "energy_vs_ktilde" && experiment != "sumrate") {
    if (selected_users < 1 || selected_users > max_sel) {
      complain("selected_users must be in [1, min(users, antennas)]");
    }
  }

  for (const auto& s : strategies) {
    try {
      selection::strategy_from_string(s);
    } catch (const ConfigError&) {
      complain("unknown strategy '" + s + "'");
    }
  }
  if (strategies.empty()) complain("strategies must not be empty");

  if (experiment == "ber") {
    for (const auto& d : demods) {
      try {
        demod::demod_kind_from_string(d);
      } catch (const ConfigError&) {
        complain("unknown demod '" + d + "'");
      }
    }
    if (demods.empty()) complain("demods must not be empty");
    if (info_len < 1) complain("info_len must be >= 1");
    if (rate_inv < 1) complain("rate_inv must be >= 1");
    if (iterations < 1) complain("iterations must be >= 1");
    if (frames_per_point < 1) complain("frames_per_point must be >= 1");
    if (snr_db.empty()) complain("snr_db grid must not be empty");
    if (sigma2_samples < 1) complain("sigma2_samples must be >= 1");
    if (block_len < 1) complain("block_len must be >= 1");
    if (coherence_time < 1) complain("coherence_time must be >= 1");
    if (block_len > coherence_time) {
      complain("block_len must be <= coherence_time");
    } else if (coherence_time % block_len != 0) {
      complain("coherence_time must be a multiple of block_len");
    }
    if (indep_block_len < 0) complain("indep_block_len must be >= 0");
    if (indep_block_len > 0) {
      if (indep_block_len > coherence_time) {
        complain("indep_block_len must be <= coherence_time");
      } else if (coherence_time % indep_block_len != 0) {
        complain("coherence_time must be a multiple of indep_block_len");
      }
    }
    if (info_len >= 1 && rate_inv >= 1) {
      const long long coded = static_cast<long long>(info_len) * rate_inv;
      if (coded % 2 != 0) {
        complain("info_len * rate_inv must be even (QPSK pairs)");
      } else {
        const long long slots = coded / 2;
        if (coherence_time >= 1 && slots % coherence_time != 0) {
          complain("frame slot count must be a multiple of coherence_time");
        }
      }
    }
  }

  if (is_energy(experiment) || experiment == "sumrate") {
    if (blocks_per_point < 1) complain("blocks_per_point must be >= 1");
  }
  if (experiment == "energy_vs_ktilde" || experiment == "sumrate") {
    if (ktilde_grid.empty()) complain("ktilde_grid must not be empty");
    for (int k : ktilde_grid) {
      if (k < 1 || k > max_sel) {
        complain("ktilde_grid entries must be in [1, min(users, antennas)]");
        break;
      }
    }
  }
  if (experiment == "energy_vs_ktilde") {
    if (block_len < 1) complain("block_len must be >= 1");
  }
  if (experiment == "energy_vs_B") {
    if (block_len_grid.empty()) complain("block_len_grid must not be empty");
    for (int b : block_len_grid) {
      if (b < 1) {
        complain("block_len_grid entries must be >= 1");
        break;
      }
    }
  }
  if (experiment == "sumrate") {
    if (snr_inv_n0_db.empty()) complain("snr_inv_n0_db grid must not be empty");
    if (block_len < 1) complain("block_len must be >= 1");
  }
  return bad;
}

void SimConfig::validate_or_throw() const {
  const auto bad = validate();
  if (bad.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& b : bad) msg += "\n  - " + b;
  throw ConfigError(msg);
}

double SimConfig::n0_from_snr_db(double db) const {
  const double snr = std::pow(10.0, db / 10.0);
  const double r = 1.0 / static_cast<double>(rate_inv);
  return 1.0 / (2.0 * r * static_cast<double>(users) * snr);
}

std::string SimConfig::to_json() const { return config_to_json(*this).dump(2); }

SimConfig SimConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  return config_from_json(j);
}

SimConfig SimConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string SimConfig::hash() const {
  json j = config_to_json(*this);
  j.erase("threads");
  j.erase("output_dir");
  const std::string canon = j.dump();
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

SimConfig preset(const std::string& name) {
  SimConfig c;
  if (name == "desk") {
    c.experiment = "ber";
    c.users = 8;
    c.antennas = 4;
    c.selected_users = 4;
    c.block_len = 4;
    c.coherence_time = 4;
    c.info_len = 512;
    c.rate_inv = 4;
    c.iterations = 20;
    c.demods = {"genie", "soft", "hard"};
    c.strategies = {"data_dependent", "data_independent"};
    c.snr_db = {3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
    c.frames_per_point = 2000;
    c.ktilde_grid = {1, 2, 3, 4};
    c.block_len_grid = {1, 2, 4, 8, 16};
    c.blocks_per_point = 10000;
    return c;
  }
  if (name == "paper-fig3") {
    c.experiment = "energy_vs_ktilde";
    c.users = 12;
    c.antennas = 8;
    c.block_len = 16;
    c.ktilde_grid = {1, 2, 3, 4, 5, 6, 7, 8};
    c.blocks_per_point = 20000;
    c.strategies = {"data_dependent", "data_independent", "exhaustive"};
    return c;
  }
  if (name == "paper-fig4") {
    c.experiment = "energy_vs_B";
    c.users = 32;
    c.antennas = 16;
    c.selected_users = 16;
    c.block_len_grid = {1, 2, 4, 8, 16, 32, 64, 128, 256};
    c.blocks_per_point = 2000;
    c.strategies = {"data_dependent", "data_independent"};
    return c;
  }
  if (name == "paper-fig5") {
    c.experiment = "ber";
    c.users = 32;
    c.antennas = 16;
    c.selected_users = 16;
    c.block_len = 16;
    c.coherence_time = 16;
    c.info_len = 4000;
    c.rate_inv = 4;
    c.iterations = 40;
    c.demods = {"genie", "soft", "hard"};
    c.strategies = {"data_dependent", "data_independent"};
    c.snr_db = {4.0, 4.5, 5.0, 5.5, 6.0, 6.5};
    c.frames_per_point = 3200;
    return c;
  }
  if (name == "paper-fig6") {
    c.experiment = "ber";
    c.users = 32;
    c.antennas = 16;
    c.selected_users = 16;
    c.block_len = 16;
    c.coherence_time = 32;
    c.indep_block_len = 32;
    c.info_len = 4000;
    c.rate_inv = 4;
    c.iterations = 40;
    c.demods = {"genie", "soft"};
    c.strategies = {"data_dependent", "data_independent"};
    c.snr_db = {4.0, 5.0, 6.0, 7.0};
    c.frames_per_point = 3200;
    return c;
  }
  if (name == "paper-fig7") {
    c.experiment = "ber";
    c.users = 32;
    c.antennas = 16;
    c.selected_users = 8;
    c.block_len = 16;
    c.coherence_time = 16;
    c.info_len = 4000;
    c.rate_inv = 8;
    c.iterations = 40;
    c.demods = {"genie", "soft", "hard"};
    c.strategies = {"data_dependent", "data_independent"};
    c.snr_db = {2.0, 3.0, 4.0, 5.0};
    c.frames_per_point = 3200;
    return c;
  }
  if (name == "paper-fig8") {
    c.experiment = "sumrate";
    c.users = 32;
    c.antennas = 16;
    c.block_len = 16;
    c.ktilde_grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
    c.snr_inv_n0_db = {0.0, 10.0};
    c.blocks_per_point = 10000;
    c.strategies = {"data_dependent", "data_independent"};
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"desk",       "paper-fig3", "paper-fig4", "paper-fig5",
          "paper-fig6", "paper-fig7", "paper-fig8"};
}

}  // namespace vbcsim::harness

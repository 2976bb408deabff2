// Command line front end: energy / ber / sumrate experiment runners plus
// config validation and a built-in oracle selftest. Results land in
// <out>/results.csv with a manifest.json next to it.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vbcsim/channel.hpp"
#include "vbcsim/coding.hpp"
#include "vbcsim/config.hpp"
#include "vbcsim/errors.hpp"
#include "vbcsim/experiments.hpp"
#include "vbcsim/linalg.hpp"
#include "vbcsim/metrics.hpp"
#include "vbcsim/rng.hpp"
#include "vbcsim/selection.hpp"

namespace {

using vbcsim::harness::SimConfig;

struct CommonOpts {
  std::string config_path;
  std::string preset_name;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
  std::string axis;  // energy only: k_tilde | block_len

  int users = 0, antennas = 0, selected_users = 0;
  int block_len = 0, coherence_time = 0, indep_block_len = -1;
  int info_len = 0, rate_inv = 0, iterations = 0;
  int frames_per_point = 0, blocks_per_point = 0, sigma2_samples = 0;
  std::vector<double> snr_db, snr_inv_n0_db;
  std::vector<int> ktilde_grid, block_len_grid;
  std::vector<std::string> demods, strategies;
};

void add_common_options(CLI::App* sub, CommonOpts& o, bool energy_axis) {
  auto* cfg = sub->add_option("--config", o.config_path, "JSON config file")
                  ->check(CLI::ExistingFile);
  sub->add_option("--preset", o.preset_name, "named preset")
      ->check(CLI::IsMember(vbcsim::harness::preset_names()))
      ->excludes(cfg);
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  sub->add_option("--out", o.out, "output directory");
  if (energy_axis) {
    sub->add_option("--axis", o.axis, "grid axis")
        ->check(CLI::IsMember({"k_tilde", "block_len"}));
  }
  sub->add_option("--users", o.users);
  sub->add_option("--antennas", o.antennas);
  sub->add_option("--selected-users", o.selected_users);
  sub->add_option("--block-len", o.block_len);
  sub->add_option("--coherence-time", o.coherence_time);
  sub->add_option("--indep-block-len", o.indep_block_len);
  sub->add_option("--info-len", o.info_len);
  sub->add_option("--rate-inv", o.rate_inv);
  sub->add_option("--iterations", o.iterations);
  sub->add_option("--frames-per-point", o.frames_per_point);
  sub->add_option("--blocks-per-point", o.blocks_per_point);
  sub->add_option("--sigma2-samples", o.sigma2_samples);
  sub->add_option("--snr-db", o.snr_db)->expected(-1);
  sub->add_option("--snr-inv-n0-db", o.snr_inv_n0_db)->expected(-1);
  sub->add_option("--ktilde-grid", o.ktilde_grid)->expected(-1);
  sub->add_option("--block-len-grid", o.block_len_grid)->expected(-1);
  sub->add_option("--demods", o.demods)->expected(-1);
  sub->add_option("--strategies", o.strategies)->expected(-1);
}

SimConfig build_config(const CLI::App* sub, const CommonOpts& o) {
  SimConfig cfg;
  if (!o.preset_name.empty()) {
    cfg = vbcsim::harness::preset(o.preset_name);
  } else if (!o.config_path.empty()) {
    cfg = SimConfig::load(o.config_path);
  }

  const auto given = [sub](const std::string& name) {
    return sub->count(name) > 0;
  };
  if (given("--seed")) cfg.seed = o.seed;
  if (given("--out")) cfg.output_dir = o.out;
  if (given("--users")) cfg.users = o.users;
  if (given("--antennas")) cfg.antennas = o.antennas;
  if (given("--selected-users")) cfg.selected_users = o.selected_users;
  if (given("--block-len")) cfg.block_len = o.block_len;
  if (given("--coherence-time")) cfg.coherence_time = o.coherence_time;
  if (given("--indep-block-len")) cfg.indep_block_len = o.indep_block_len;
  if (given("--info-len")) cfg.info_len = o.info_len;
  if (given("--rate-inv")) cfg.rate_inv = o.rate_inv;
  if (given("--iterations")) cfg.iterations = o.iterations;
  if (given("--frames-per-point")) cfg.frames_per_point = o.frames_per_point;
  if (given("--blocks-per-point")) cfg.blocks_per_point = o.blocks_per_point;
  if (given("--sigma2-samples")) cfg.sigma2_samples = o.sigma2_samples;
  if (given("--snr-db")) cfg.snr_db = o.snr_db;
  if (given("--snr-inv-n0-db")) cfg.snr_inv_n0_db = o.snr_inv_n0_db;
  if (given("--ktilde-grid")) cfg.ktilde_grid = o.ktilde_grid;
  if (given("--block-len-grid")) cfg.block_len_grid = o.block_len_grid;
  if (given("--demods")) cfg.demods = o.demods;
  if (given("--strategies")) cfg.strategies = o.strategies;

  // Thread precedence: explicit flag, then VBC_SIM_THREADS, then config.
  if (given("--threads")) {
    cfg.threads = o.threads;
  } else if (const char* env = std::getenv("VBC_SIM_THREADS")) {
    try {
      cfg.threads = std::stoi(env);
    } catch (const std::exception&) {
      throw vbcsim::ConfigError(std::string("VBC_SIM_THREADS is not an integer: ") + env);
    }
  }
  return cfg;
}

int run_and_write(const SimConfig& cfg) {
  cfg.validate_or_throw();
  const auto t0 = std::chrono::steady_clock::now();
  const auto records = vbcsim::harness::run_experiment(cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::filesystem::create_directories(cfg.output_dir);
  const std::string csv_path =
      (std::filesystem::path(cfg.output_dir) / "results.csv").string();
  const std::string manifest_path =
      (std::filesystem::path(cfg.output_dir) / "manifest.json").string();
  vbcsim::harness::write_csv(csv_path, records);
  vbcsim::harness::write_manifest(manifest_path, cfg.to_json(), cfg.seed,
                                  cfg.hash(), wall);

  std::cout << cfg.experiment << ": " << records.size() << " records in "
            << csv_path << " (" << wall << " s, config " << cfg.hash() << ")\n";
  return 0;
}

// --- selftest oracles ------------------------------------------------------

bool selftest_linalg(std::ostream& os) {
  using namespace vbcsim;
  double worst = 0.0;
  Rng rng(20240817);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(4));   // antennas
    const int rows = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    CMatrix h(rows, n);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < n; ++c) h(r, c) = rng.complex_gaussian(1.0);

    CMatrix hsel = h.topRows(1);
    CMatrix pinv = linalg::pseudo_inverse(hsel);
    CMatrix gram_inv = (hsel * hsel.adjoint()).inverse();
    for (int r = 1; r < rows; ++r) {
      const CMatrix p = linalg::projection_complement(pinv, hsel);
      gram_inv = linalg::block_gram_inverse(gram_inv, pinv, p, h.row(r));
      pinv = linalg::pinv_append(pinv, p, h.row(r));
      hsel.conservativeResize(hsel.rows() + 1, Eigen::NoChange);
      hsel.row(hsel.rows() - 1) = h.row(r);
    }
    const double dev_pinv =
        (pinv - linalg::pseudo_inverse(hsel)).cwiseAbs().maxCoeff();
    const CMatrix direct_gram_inv = (hsel * hsel.adjoint()).inverse();
    const double dev_gram = (gram_inv - direct_gram_inv).cwiseAbs().maxCoeff();
    worst = std::max(worst, std::max(dev_pinv, dev_gram));
  }
  const bool ok = worst < 1e-8;
  os << "selftest linalg recursions: " << (ok ? "pass" : "FAIL")
     << " (max deviation " << worst << ")\n";
  return ok;
}

bool selftest_selection(std::ostream& os) {
  using namespace vbcsim;
  double worst = 0.0;
  Rng rng(20240818);
  for (int trial = 0; trial < 50; ++trial) {
    const int users = 5, antennas = 3, block = 3;
    CMatrix h(users, antennas), x(users, block);
    for (int k = 0; k < users; ++k) {
      for (int c = 0; c < antennas; ++c)
        h(k, c) = rng.complex_gaussian(1.0 / antennas);
      for (int t = 0; t < block; ++t)
        x(k, t) = qpsk_symbol(static_cast<int>(rng.below(kQpskPoints)));
    }
    for (int k_tilde = 1; k_tilde <= antennas; ++k_tilde) {
      const auto exh = selection::exhaustive_search(h, x, k_tilde);
      const auto dep = selection::greedy_data_dependent(h, x, k_tilde);
      const auto indep = selection::greedy_data_independent(h, k_tilde, &x);
      const double e_exh = exh.block_energy;
      const double e_dep = dep.block_energy;
      const double e_indep = selection::block_energy_direct(indep.h_sel,
          [&] {
            CMatrix xs(k_tilde, block);
            for (int i = 0; i < k_tilde; ++i)
              xs.row(i) = x.row(indep.order[static_cast<std::size_t>(i)]);
            return xs;
          }());
      worst = std::max(worst, std::max(e_exh - e_dep, e_exh - e_indep));
    }
  }
  const bool ok = worst < 1e-9;
  os << "selftest greedy vs exhaustive: " << (ok ? "pass" : "FAIL")
     << " (max optimality violation " << worst << ")\n";
  return ok;
}

bool selftest_decoder(std::ostream& os) {
  using namespace vbcsim;
  Rng rng(20240819);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 8;
    std::vector<double> llr_c(n), llr_b(n);
    for (int i = 0; i < n; ++i) {
      llr_c[static_cast<std::size_t>(i)] = 4.0 * (rng.uniform() - 0.5);
      llr_b[static_cast<std::size_t>(i)] = 4.0 * (rng.uniform() - 0.5);
    }
    // Exact bitwise marginals by enumerating all 2^n accumulator inputs.
    std::vector<double> pb1(static_cast<std::size_t>(n), 0.0);
    std::vector<double> pc1(static_cast<std::size_t>(n), 0.0);
    double total = 0.0;
    for (int word = 0; word < (1 << n); ++word) {
      double w = 1.0;
      int state = 0;
      std::vector<int> c(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const int bi = (word >> i) & 1;
        state ^= bi;
        c[static_cast<std::size_t>(i)] = state;
        const double lb = llr_b[static_cast<std::size_t>(i)];
        const double lc = llr_c[static_cast<std::size_t>(i)];
        w *= bi ? 1.0 / (1.0 + std::exp(lb)) : 1.0 / (1.0 + std::exp(-lb));
        w *= state ? 1.0 / (1.0 + std::exp(lc)) : 1.0 / (1.0 + std::exp(-lc));
      }
      total += w;
      for (int i = 0; i < n; ++i) {
        if ((word >> i) & 1) pb1[static_cast<std::size_t>(i)] += w;
        if (c[static_cast<std::size_t>(i)]) pc1[static_cast<std::size_t>(i)] += w;
      }
    }
    std::vector<double> ext_c, ext_b;
    coding::siso_accumulator_decode(llr_c, llr_b, &ext_c, &ext_b);
    for (int i = 0; i < n; ++i) {
      const double post_b = std::log((total - pb1[static_cast<std::size_t>(i)]) /
                                     pb1[static_cast<std::size_t>(i)]);
      const double post_c = std::log((total - pc1[static_cast<std::size_t>(i)]) /
                                     pc1[static_cast<std::size_t>(i)]);
      worst = std::max(worst,
                       std::abs(post_b - (ext_b[static_cast<std::size_t>(i)] +
                                          llr_b[static_cast<std::size_t>(i)])));
      worst = std::max(worst,
                       std::abs(post_c - (ext_c[static_cast<std::size_t>(i)] +
                                          llr_c[static_cast<std::size_t>(i)])));
    }
  }
  const bool ok = worst < 1e-10;
  os << "selftest decoder enumeration: " << (ok ? "pass" : "FAIL")
     << " (max deviation " << worst << ")\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vector broadcast scheduling and iterative detection simulator"};
  app.require_subcommand(1);

  CommonOpts energy_opts, ber_opts, sumrate_opts, validate_opts;
  CLI::App* energy = app.add_subcommand("energy", "energy penalty experiments");
  add_common_options(energy, energy_opts, true);
  CLI::App* ber = app.add_subcommand("ber", "coded BER experiments");
  add_common_options(ber, ber_opts, false);
  CLI::App* sumrate = app.add_subcommand("sumrate", "sum-rate experiments");
  add_common_options(sumrate, sumrate_opts, false);
  CLI::App* validate = app.add_subcommand("validate-config", "check a config");
  add_common_options(validate, validate_opts, true);
  CLI::App* selftest = app.add_subcommand("selftest", "run built-in oracles");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(selftest)) {
      const bool ok = selftest_linalg(std::cout) & selftest_selection(std::cout) &
                      selftest_decoder(std::cout);
      std::cout << (ok ? "selftest: all pass\n" : "selftest: FAILURES\n");
      return ok ? 0 : 1;
    }
    if (app.got_subcommand(validate)) {
      SimConfig cfg = build_config(validate, validate_opts);
      if (!validate_opts.axis.empty()) {
        cfg.experiment = validate_opts.axis == "block_len" ? "energy_vs_B"
                                                           : "energy_vs_ktilde";
      }
      const auto problems = cfg.validate();
      if (problems.empty()) {
        std::cout << "ok (config " << cfg.hash() << ")\n" << cfg.to_json() << "\n";
        return 0;
      }
      for (const auto& p : problems) std::cerr << "invalid: " << p << "\n";
      return 1;
    }
    if (app.got_subcommand(energy)) {
      SimConfig cfg = build_config(energy, energy_opts);
      if (!energy_opts.axis.empty()) {
        cfg.experiment = energy_opts.axis == "block_len" ? "energy_vs_B"
                                                         : "energy_vs_ktilde";
      } else if (cfg.experiment != "energy_vs_ktilde" &&
                 cfg.experiment != "energy_vs_B") {
        cfg.experiment = "energy_vs_ktilde";
      }
      return run_and_write(cfg);
    }
    if (app.got_subcommand(ber)) {
      SimConfig cfg = build_config(ber, ber_opts);
      cfg.experiment = "ber";
      return run_and_write(cfg);
    }
    SimConfig cfg = build_config(sumrate, sumrate_opts);
    cfg.experiment = "sumrate";
    return run_and_write(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

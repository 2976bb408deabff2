#include "vbcsim/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "vbcsim/channel.hpp"
#include "vbcsim/coding.hpp"
#include "vbcsim/demod.hpp"
#include "vbcsim/errors.hpp"
#include "vbcsim/rate.hpp"
#include "vbcsim/receiver.hpp"
#include "vbcsim/rng.hpp"
#include "vbcsim/selection.hpp"

namespace vbcsim::harness {

namespace {

// Seed stream identifiers. Grid streams add the grid index so every grid
// point draws an independent trial sequence.
constexpr std::uint64_t kStreamBits = 1;
constexpr std::uint64_t kStreamRaPerm = 2;
constexpr std::uint64_t kStreamBicm = 3;
constexpr std::uint64_t kStreamChannel = 4;
constexpr std::uint64_t kStreamNoise = 5;
constexpr std::uint64_t kStreamRedraw = 6;
constexpr std::uint64_t kStreamSigma2 = 901;
constexpr std::uint64_t kStreamTrialBase = 1000;

MetricRecord base_record(const SimConfig& cfg) {
  MetricRecord r;
  r.experiment = cfg.experiment;
  r.config_hash = cfg.hash();
  r.seed = cfg.seed;
  return r;
}

double binomial_choose(int n, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) {
    v *= static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return v;
}

void draw_channel_and_symbols(Rng& rng, int users, int antennas, int block_len,
                              CMatrix* h, CMatrix* x) {
  h->resize(users, antennas);
  const double entry_var = 1.0 / static_cast<double>(antennas);
  for (int k = 0; k < users; ++k) {
    for (int n = 0; n < antennas; ++n) {
      (*h)(k, n) = rng.complex_gaussian(entry_var);
    }
  }
  x->resize(users, block_len);
  for (int k = 0; k < users; ++k) {
    for (int t = 0; t < block_len; ++t) {
      (*x)(k, t) = qpsk_symbol(static_cast<int>(rng.below(kQpskPoints)));
    }
  }
}

std::vector<selection::Strategy> parse_strategies(const SimConfig& cfg) {
  std::vector<selection::Strategy> out;
  for (const auto& s : cfg.strategies) {
    out.push_back(selection::strategy_from_string(s));
  }
  return out;
}

std::vector<demod::DemodKind> parse_demods(const SimConfig& cfg) {
  std::vector<demod::DemodKind> out;
  for (const auto& d : cfg.demods) {
    out.push_back(demod::demod_kind_from_string(d));
  }
  return out;
}

}  // namespace

void parallel_for(int n, int threads, const std::function<void(int)>& job) {
  if (n <= 0) return;
  threads = std::min(std::max(threads, 1), n);
  if (threads == 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_error) return;
      }
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

int effective_threads(const SimConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<MetricRecord> run_energy_experiment(const SimConfig& cfg) {
  cfg.validate_or_throw();
  const bool by_ktilde = cfg.experiment == "energy_vs_ktilde";
  if (!by_ktilde && cfg.experiment != "energy_vs_B") {
    throw ConfigError("run_energy_experiment: wrong experiment kind");
  }
  const std::vector<int>& grid = by_ktilde ? cfg.ktilde_grid : cfg.block_len_grid;
  const char* x_name = by_ktilde ? "k_tilde" : "block_len";
  const auto strategies = parse_strategies(cfg);
  const int threads = effective_threads(cfg);
  const int trials = cfg.blocks_per_point;

  std::vector<MetricRecord> records;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const int k_tilde = by_ktilde ? grid[g] : cfg.selected_users;
    const int block_len = by_ktilde ? cfg.block_len : grid[g];

    // Strategies that cannot run at this point are dropped with a warning.
    std::vector<bool> active(strategies.size(), true);
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      if (strategies[s] == selection::Strategy::exhaustive &&
          binomial_choose(cfg.users, k_tilde) >
              static_cast<double>(cfg.exhaustive_cap)) {
        active[s] = false;
        MetricRecord r = base_record(cfg);
        r.x_name = x_name;
        r.x_value = grid[g];
        r.system = cfg.strategies[s];
        r.metric = "warning_cap_exceeded";
        r.value = 1.0;
        records.push_back(r);
      }
    }

    std::vector<std::vector<double>> energy(
        strategies.size(), std::vector<double>(static_cast<std::size_t>(trials)));
    parallel_for(trials, threads, [&](int i) {
      const std::uint64_t tseed =
          derive_seed(cfg.seed, kStreamTrialBase + g, static_cast<std::uint64_t>(i));
      for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(derive_seed(tseed, kStreamRedraw, attempt));
        CMatrix h, x;
        draw_channel_and_symbols(rng, cfg.users, cfg.antennas, block_len, &h, &x);
        bool redraw = false;
        for (std::size_t s = 0; s < strategies.size(); ++s) {
          if (!active[s]) continue;
          try {
            const selection::SelectionResult sel = selection::select(
                strategies[s], h, x, k_tilde, cfg.exhaustive_cap);
            energy[s][static_cast<std::size_t>(i)] =
                channel::energy_penalty(sel.beams) / static_cast<double>(k_tilde);
          } catch (const DegeneracyError&) {
            redraw = true;  // keep all strategies on a common draw
            break;
          }
        }
        if (!redraw) break;
      }
    });

    for (std::size_t s = 0; s < strategies.size(); ++s) {
      if (!active[s]) continue;
      const MeanStderr ms = mean_stderr(energy[s]);
      MetricRecord r = base_record(cfg);
      r.x_name = x_name;
      r.x_value = grid[g];
      r.system = cfg.strategies[s];
      r.metric = "energy_per_user";
      r.value = ms.mean;
      r.stderr_value = ms.stderr_value;
      r.n_trials = static_cast<std::uint64_t>(trials);
      records.push_back(r);
    }
    for (std::size_t a = 0; a < strategies.size(); ++a) {
      for (std::size_t b = a + 1; b < strategies.size(); ++b) {
        if (!active[a] || !active[b]) continue;
        std::vector<double> diff(static_cast<std::size_t>(trials));
        for (int i = 0; i < trials; ++i) {
          diff[static_cast<std::size_t>(i)] =
              energy[a][static_cast<std::size_t>(i)] -
              energy[b][static_cast<std::size_t>(i)];
        }
        const MeanStderr ms = mean_stderr(diff);
        MetricRecord r = base_record(cfg);
        r.x_name = x_name;
        r.x_value = grid[g];
        r.system = cfg.strategies[a] + "-" + cfg.strategies[b];
        r.metric = "energy_per_user_diff";
        r.value = ms.mean;
        r.stderr_value = ms.stderr_value;
        r.n_trials = static_cast<std::uint64_t>(trials);
        records.push_back(r);
      }
    }
  }
  return records;
}

namespace {

// Per-trial accumulation cell for one (strategy, demod, SNR point).
struct BerCell {
  int bit_errors = 0;
  int frame_errors = 0;
  double indicator_abs_err = 0.0;  // summed over user frames
  long long underflow_fallbacks = 0;
};

}  // namespace

std::vector<MetricRecord> run_ber_experiment(const SimConfig& cfg) {
  cfg.validate_or_throw();
  if (cfg.experiment != "ber") {
    throw ConfigError("run_ber_experiment: wrong experiment kind");
  }
  const auto strategies = parse_strategies(cfg);
  const auto demods = parse_demods(cfg);
  const int threads = effective_threads(cfg);

  const int K = cfg.users;
  const int L = cfg.info_len;
  const int T = L * cfg.rate_inv / 2;
  const int trials = (cfg.frames_per_point + K - 1) / K;
  const int S = static_cast<int>(strategies.size());
  const int D = static_cast<int>(demods.size());
  const int P = static_cast<int>(cfg.snr_db.size());

  std::vector<int> block_len_of(strategies.size(), cfg.block_len);
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    if (strategies[s] == selection::Strategy::data_independent &&
        cfg.indep_block_len > 0) {
      block_len_of[s] = cfg.indep_block_len;
    }
  }

  // Interference power per strategy; SNR independent, cached across calls.
  std::vector<double> sigma2(strategies.size(), 0.0);
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    sigma2[s] = demod::interference_power(
        K, cfg.antennas, cfg.selected_users, block_len_of[s], strategies[s],
        cfg.sigma2_samples, derive_seed(cfg.seed, kStreamSigma2));
  }

  std::vector<double> n0(static_cast<std::size_t>(P));
  for (int p = 0; p < P; ++p) {
    n0[static_cast<std::size_t>(p)] =
        cfg.n0_from_snr_db(cfg.snr_db[static_cast<std::size_t>(p)]);
  }
  const double prior = static_cast<double>(cfg.selected_users) / K;

  const auto cell_index = [D, P](int s, int d, int p) {
    return (s * D + d) * P + p;
  };
  std::vector<std::vector<BerCell>> results(
      static_cast<std::size_t>(trials),
      std::vector<BerCell>(static_cast<std::size_t>(S * D * P)));

  parallel_for(trials, threads, [&](int trial) {
    const std::uint64_t tseed =
        derive_seed(cfg.seed, kStreamTrialBase, static_cast<std::uint64_t>(trial));

    std::vector<coding::Frame> frames;
    frames.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      const std::uint64_t uk = static_cast<std::uint64_t>(k);
      frames.push_back(coding::build_frame(
          coding::random_bits(L, derive_seed(tseed, kStreamBits, uk)),
          cfg.rate_inv, derive_seed(tseed, kStreamRaPerm, uk),
          derive_seed(tseed, kStreamBicm, uk)));
    }
    const channel::ChannelRealization chan = channel::sample_block_fading(
        K, cfg.antennas, T, cfg.coherence_time,
        derive_seed(tseed, kStreamChannel));

    // Per strategy: transmit once (SNR-independent), then decode every
    // (SNR, demod) with shared noise realizations.
    CMatrix clean(K, T);
    CMatrix x_block(K, 1);
    for (int s = 0; s < S; ++s) {
      const int B = block_len_of[static_cast<std::size_t>(s)];
      const int num_blocks = T / B;
      std::vector<std::vector<std::uint8_t>> selected(
          static_cast<std::size_t>(K),
          std::vector<std::uint8_t>(static_cast<std::size_t>(num_blocks), 0));
      double energy_sum = 0.0;
      x_block.resize(K, B);
      for (int b = 0; b < num_blocks; ++b) {
        const CMatrix& hb = chan.block_of_slot(b * B);
        for (int k = 0; k < K; ++k) {
          for (int t = 0; t < B; ++t) {
            x_block(k, t) = frames[static_cast<std::size_t>(k)]
                                .symbols[static_cast<std::size_t>(b * B + t)];
          }
        }
        const selection::SelectionResult sel = selection::select(
            strategies[static_cast<std::size_t>(s)], hb, x_block,
            cfg.selected_users, cfg.exhaustive_cap);
        for (int k : sel.order) {
          selected[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)] = 1;
        }
        for (int t = 0; t < B; ++t) {
          const CVector& u = sel.beams[static_cast<std::size_t>(t)];
          energy_sum += u.squaredNorm();
          clean.col(b * B + t) = hb * u;
        }
      }
      const double energy = energy_sum / static_cast<double>(T);
      const double inv_sqrt_e = 1.0 / std::sqrt(energy);

      demod::EquivalentChannelParams params;
      params.energy_penalty = energy;
      params.sigma2 = sigma2[static_cast<std::size_t>(s)];
      params.prior_selected = prior;

      receiver::FrameObservation obs;
      obs.block_len = B;
      obs.y.resize(static_cast<std::size_t>(T));
      for (int p = 0; p < P; ++p) {
        params.n0 = n0[static_cast<std::size_t>(p)];
        const double noise_scale = std::sqrt(params.n0);
        for (int k = 0; k < K; ++k) {
          // Identical noise stream for every strategy and demodulator at
          // one (trial, SNR, user): common random numbers.
          Rng nrng(derive_seed(tseed, kStreamNoise,
                               (static_cast<std::uint64_t>(p) << 32) |
                                   static_cast<std::uint64_t>(k)));
          for (int t = 0; t < T; ++t) {
            obs.y[static_cast<std::size_t>(t)] =
                clean(k, t) * inv_sqrt_e + noise_scale * nrng.complex_gaussian(1.0);
          }
          obs.selected = selected[static_cast<std::size_t>(k)];
          for (int d = 0; d < D; ++d) {
            const receiver::DecodeResult res = receiver::run_iterative_decode(
                frames[static_cast<std::size_t>(k)], obs, params,
                demods[static_cast<std::size_t>(d)], cfg.iterations);
            BerCell& cell = results[static_cast<std::size_t>(trial)]
                                   [static_cast<std::size_t>(cell_index(s, d, p))];
            cell.bit_errors += res.bit_errors;
            cell.frame_errors += res.bit_errors > 0 ? 1 : 0;
            cell.indicator_abs_err +=
                res.per_iteration.back().indicator_abs_err;
            for (const auto& it : res.per_iteration) {
              cell.underflow_fallbacks += it.underflow_fallbacks;
            }
          }
        }
      }
    }
  });

  // Merge. Each trial is one cluster of K user frames; standard errors are
  // computed over per-trial means so intra-trial correlation is respected.
  std::vector<MetricRecord> records;
  const double bits_per_trial = static_cast<double>(K) * L;
  for (int s = 0; s < S; ++s) {
    for (int d = 0; d < D; ++d) {
      for (int p = 0; p < P; ++p) {
        std::vector<double> trial_ber(static_cast<std::size_t>(trials));
        std::vector<double> trial_fer(static_cast<std::size_t>(trials));
        long long total_errors = 0;
        long long total_fallbacks = 0;
        double ind_err = 0.0;
        for (int i = 0; i < trials; ++i) {
          const BerCell& cell = results[static_cast<std::size_t>(i)]
                                       [static_cast<std::size_t>(cell_index(s, d, p))];
          trial_ber[static_cast<std::size_t>(i)] = cell.bit_errors / bits_per_trial;
          trial_fer[static_cast<std::size_t>(i)] =
              static_cast<double>(cell.frame_errors) / K;
          total_errors += cell.bit_errors;
          total_fallbacks += cell.underflow_fallbacks;
          ind_err += cell.indicator_abs_err;
        }
        const std::string system = cfg.strategies[static_cast<std::size_t>(s)] +
                                   "/" + cfg.demods[static_cast<std::size_t>(d)];
        MetricRecord r = base_record(cfg);
        r.x_name = "snr_db";
        r.x_value = cfg.snr_db[static_cast<std::size_t>(p)];
        r.system = system;
        r.n_trials = static_cast<std::uint64_t>(trials);

        const MeanStderr ber = mean_stderr(trial_ber);
        r.metric = "ber";
        r.value = ber.mean;
        r.stderr_value = ber.stderr_value;
        records.push_back(r);

        const MeanStderr fer = mean_stderr(trial_fer);
        r.metric = "fer";
        r.value = fer.mean;
        r.stderr_value = fer.stderr_value;
        records.push_back(r);

        r.metric = "bit_errors";
        r.value = static_cast<double>(total_errors);
        r.stderr_value = 0.0;
        records.push_back(r);

        r.metric = "indicator_abs_err";
        r.value = ind_err / (static_cast<double>(trials) * K);
        records.push_back(r);

        r.metric = "underflow_fallbacks";
        r.value = static_cast<double>(total_fallbacks);
        records.push_back(r);
      }
    }
  }

  // Paired differences: demodulators under one strategy, then strategies
  // under one demodulator. Matched trials make these low-variance.
  const auto emit_diff = [&](int sa, int da, int sb, int db,
                             const std::string& system, int p) {
    std::vector<double> diff(static_cast<std::size_t>(trials));
    for (int i = 0; i < trials; ++i) {
      const BerCell& ca = results[static_cast<std::size_t>(i)]
                                 [static_cast<std::size_t>(cell_index(sa, da, p))];
      const BerCell& cb = results[static_cast<std::size_t>(i)]
                                 [static_cast<std::size_t>(cell_index(sb, db, p))];
      diff[static_cast<std::size_t>(i)] =
          (ca.bit_errors - cb.bit_errors) / bits_per_trial;
    }
    const MeanStderr ms = mean_stderr(diff);
    MetricRecord r = base_record(cfg);
    r.x_name = "snr_db";
    r.x_value = cfg.snr_db[static_cast<std::size_t>(p)];
    r.system = system;
    r.metric = "ber_diff";
    r.value = ms.mean;
    r.stderr_value = ms.stderr_value;
    r.n_trials = static_cast<std::uint64_t>(trials);
    records.push_back(r);
  };

  for (int p = 0; p < P; ++p) {
    for (int s = 0; s < S; ++s) {
      for (int da = 0; da < D; ++da) {
        for (int db = da + 1; db < D; ++db) {
          emit_diff(s, da, s, db,
                    cfg.strategies[static_cast<std::size_t>(s)] + "/" +
                        cfg.demods[static_cast<std::size_t>(da)] + "-" +
                        cfg.demods[static_cast<std::size_t>(db)],
                    p);
        }
      }
    }
    for (int d = 0; d < D; ++d) {
      for (int sa = 0; sa < S; ++sa) {
        for (int sb = sa + 1; sb < S; ++sb) {
          emit_diff(sa, d, sb, d,
                    cfg.strategies[static_cast<std::size_t>(sa)] + "-" +
                        cfg.strategies[static_cast<std::size_t>(sb)] + "/" +
                        cfg.demods[static_cast<std::size_t>(d)],
                    p);
        }
      }
    }
  }
  return records;
}

std::vector<MetricRecord> run_sumrate_experiment(const SimConfig& cfg) {
  cfg.validate_or_throw();
  if (cfg.experiment != "sumrate") {
    throw ConfigError("run_sumrate_experiment: wrong experiment kind");
  }
  const auto strategies = parse_strategies(cfg);
  const int threads = effective_threads(cfg);
  const int trials = cfg.blocks_per_point;

  std::vector<MetricRecord> records;
  for (std::size_t g = 0; g < cfg.ktilde_grid.size(); ++g) {
    const int k_tilde = cfg.ktilde_grid[g];
    std::vector<std::vector<double>> energy(
        strategies.size(), std::vector<double>(static_cast<std::size_t>(trials)));
    parallel_for(trials, threads, [&](int i) {
      const std::uint64_t tseed =
          derive_seed(cfg.seed, kStreamTrialBase + g, static_cast<std::uint64_t>(i));
      for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(derive_seed(tseed, kStreamRedraw, attempt));
        CMatrix h, x;
        draw_channel_and_symbols(rng, cfg.users, cfg.antennas, cfg.block_len,
                                 &h, &x);
        bool redraw = false;
        for (std::size_t s = 0; s < strategies.size(); ++s) {
          try {
            const selection::SelectionResult sel = selection::select(
                strategies[s], h, x, k_tilde, cfg.exhaustive_cap);
            energy[s][static_cast<std::size_t>(i)] =
                channel::energy_penalty(sel.beams);
          } catch (const DegeneracyError&) {
            redraw = true;
            break;
          }
        }
        if (!redraw) break;
      }
    });

    std::vector<MeanStderr> means(strategies.size());
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      means[s] = mean_stderr(energy[s]);
      MetricRecord r = base_record(cfg);
      r.x_name = "k_tilde";
      r.x_value = k_tilde;
      r.system = cfg.strategies[s];
      r.metric = "energy_mean";
      r.value = means[s].mean;
      r.stderr_value = means[s].stderr_value;
      r.n_trials = static_cast<std::uint64_t>(trials);
      records.push_back(r);
    }
    for (std::size_t a = 0; a < strategies.size(); ++a) {
      for (std::size_t b = a + 1; b < strategies.size(); ++b) {
        std::vector<double> diff(static_cast<std::size_t>(trials));
        for (int i = 0; i < trials; ++i) {
          diff[static_cast<std::size_t>(i)] =
              energy[a][static_cast<std::size_t>(i)] -
              energy[b][static_cast<std::size_t>(i)];
        }
        const MeanStderr ms = mean_stderr(diff);
        MetricRecord r = base_record(cfg);
        r.x_name = "k_tilde";
        r.x_value = k_tilde;
        r.system = cfg.strategies[a] + "-" + cfg.strategies[b];
        r.metric = "energy_diff";
        r.value = ms.mean;
        r.stderr_value = ms.stderr_value;
        r.n_trials = static_cast<std::uint64_t>(trials);
        records.push_back(r);
      }
    }

    for (double db : cfg.snr_inv_n0_db) {
      const double n0 = std::pow(10.0, -db / 10.0);
      for (std::size_t s = 0; s < strategies.size(); ++s) {
        const double r_mid =
            rate::sum_rate_lower_bound(k_tilde, means[s].mean, n0);
        // C is decreasing in the energy penalty; half the spread across
        // +-1 SE of the energy estimate is the propagated standard error.
        double spread = 0.0;
        if (means[s].stderr_value > 0.0 &&
            means[s].mean - means[s].stderr_value > 0.0) {
          const double hi = rate::sum_rate_lower_bound(
              k_tilde, means[s].mean - means[s].stderr_value, n0);
          const double lo = rate::sum_rate_lower_bound(
              k_tilde, means[s].mean + means[s].stderr_value, n0);
          spread = (hi - lo) / 2.0;
        }
        MetricRecord r = base_record(cfg);
        r.x_name = "k_tilde";
        r.x_value = k_tilde;
        r.system = cfg.strategies[s] + "@" + format_double(db) + "dB";
        r.metric = "sum_rate";
        r.value = r_mid;
        r.stderr_value = spread;
        r.n_trials = static_cast<std::uint64_t>(trials);
        records.push_back(r);
      }
    }
  }
  return records;
}

std::vector<MetricRecord> run_experiment(const SimConfig& cfg) {
  if (cfg.experiment == "ber") return run_ber_experiment(cfg);
  if (cfg.experiment == "sumrate") return run_sumrate_experiment(cfg);
  return run_energy_experiment(cfg);
}

}  // namespace vbcsim::harness

#include "vbcsim/demod.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "vbcsim/errors.hpp"
#include "vbcsim/rng.hpp"

namespace vbcsim::demod {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Per-slot log evidence difference is clamped here; the indicator posterior
// saturates far earlier, and the clamp keeps block sums finite.
constexpr double kLogEvidenceClamp = 500.0;

inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log f(y | x, a=1) over the constellation and log f(y | a=0).
inline void slot_log_likelihoods(cplx y, const EquivalentChannelParams& p,
                                 std::array<double, kQpskPoints>* log_on,
                                 double* log_off) {
  const double inv_sqrt_e = 1.0 / std::sqrt(p.energy_penalty);
  const double v0 = p.idle_variance();
  for (int m = 0; m < kQpskPoints; ++m) {
    const cplx r = y - qpsk_symbol(m) * inv_sqrt_e;
    (*log_on)[m] = -std::log(kPi * p.n0) - std::norm(r) / p.n0;
  }
  *log_off = -std::log(kPi * v0) - std::norm(y) / v0;
}

// log[ sum_m belief(m) * f(y|x_m, a=1) ] - log f(y|a=0) for one slot,
// computed from the scaled tables. Non-finite when both branches vanished.
inline double slot_evidence(const std::array<double, kQpskPoints>& on,
                            double log_off, const SymbolBelief& belief) {
  double z = 0.0;
  for (int m = 0; m < kQpskPoints; ++m) z += belief[m] * on[m];
  double d = std::log(z) - log_off;
  if (d > kLogEvidenceClamp) d = kLogEvidenceClamp;
  if (d < -kLogEvidenceClamp) d = -kLogEvidenceClamp;
  return d;
}

void check_block_args(const std::vector<cplx>& block_obs,
                      const std::vector<SymbolBelief>& beliefs, int slot,
                      const EquivalentChannelParams& p) {
  p.validate();
  if (block_obs.empty() || beliefs.size() != block_obs.size()) {
    throw ContractViolation("demod: observation/belief length mismatch");
  }
  if (slot < 0 || slot >= static_cast<int>(block_obs.size())) {
    throw ContractViolation("demod: slot index out of range");
  }
}

SymbolBelief mix_belief(const std::array<double, kQpskPoints>& on, double off,
                        double a_hat, int* fallbacks) {
  SymbolBelief q;
  double sum = 0.0;
  for (int m = 0; m < kQpskPoints; ++m) {
    q[m] = a_hat * on[m] + (1.0 - a_hat) * off;
    sum += q[m];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    if (fallbacks) ++(*fallbacks);
    return SymbolBelief::uniform();
  }
  q.normalize();
  return q;
}

}  // namespace

void EquivalentChannelParams::validate() const {
  if (!(energy_penalty > 0.0) || !(n0 > 0.0) || sigma2 < 0.0 ||
      prior_selected < 0.0 || prior_selected > 1.0) {
    throw ContractViolation("EquivalentChannelParams: invalid parameters");
  }
}

const char* to_string(DemodKind k) {
  switch (k) {
    case DemodKind::genie:
      return "genie";
    case DemodKind::hard:
      return "hard";
    case DemodKind::soft:
      return "soft";
  }
  return "?";
}

DemodKind demod_kind_from_string(const std::string& name) {
  if (name == "genie") return DemodKind::genie;
  if (name == "hard") return DemodKind::hard;
  if (name == "soft") return DemodKind::soft;
  throw ConfigError("unknown demodulator '" + name + "'");
}

double slot_likelihood(cplx y, cplx x, int a, const EquivalentChannelParams& p) {
  p.validate();
  if (a == 1) {
    const cplx r = y - x / std::sqrt(p.energy_penalty);
    return std::exp(-std::norm(r) / p.n0) / (kPi * p.n0);
  }
  const double v0 = p.idle_variance();
  return std::exp(-std::norm(y) / v0) / (kPi * v0);
}

IndicatorPosterior indicator_posterior(const std::vector<cplx>& block_obs,
                                       const std::vector<SymbolBelief>& beliefs,
                                       int exclude_slot,
                                       const EquivalentChannelParams& p) {
  check_block_args(block_obs, beliefs, exclude_slot, p);
  IndicatorPosterior out;
  if (p.prior_selected >= 1.0) {
    out.a_hat = 1.0;
    return out;
  }
  if (p.prior_selected <= 0.0) {
    out.a_hat = 0.0;
    return out;
  }

  double log_odds = std::log(p.prior_selected / (1.0 - p.prior_selected));
  for (int t = 0; t < static_cast<int>(block_obs.size()); ++t) {
    if (t == exclude_slot) continue;
    std::array<double, kQpskPoints> log_on;
    double log_off;
    slot_log_likelihoods(block_obs[t], p, &log_on, &log_off);
    double scale = log_off;
    for (double v : log_on) scale = std::max(scale, v);
    std::array<double, kQpskPoints> on;
    for (int m = 0; m < kQpskPoints; ++m) on[m] = std::exp(log_on[m] - scale);
    const double d = slot_evidence(on, log_off - scale, beliefs[static_cast<std::size_t>(t)]);
    if (!std::isfinite(d)) {
      out.underflow = true;  // slot impossible under both states; skip it
      continue;
    }
    log_odds += d;
  }
  out.a_hat = sigmoid(log_odds);
  return out;
}

SymbolBelief soft_demod(const std::vector<cplx>& block_obs,
                        const std::vector<SymbolBelief>& beliefs, int slot,
                        const EquivalentChannelParams& p,
                        IndicatorPosterior* posterior) {
  const IndicatorPosterior post = indicator_posterior(block_obs, beliefs, slot, p);
  if (posterior) *posterior = post;

  std::array<double, kQpskPoints> log_on;
  double log_off;
  slot_log_likelihoods(block_obs[static_cast<std::size_t>(slot)], p, &log_on,
                       &log_off);
  double scale = log_off;
  for (double v : log_on) scale = std::max(scale, v);
  std::array<double, kQpskPoints> on;
  for (int m = 0; m < kQpskPoints; ++m) on[m] = std::exp(log_on[m] - scale);
  return mix_belief(on, std::exp(log_off - scale), post.a_hat, nullptr);
}

SymbolBelief hard_demod(const std::vector<cplx>& block_obs,
                        const std::vector<SymbolBelief>& beliefs, int slot,
                        const EquivalentChannelParams& p,
                        IndicatorPosterior* posterior) {
  IndicatorPosterior post = indicator_posterior(block_obs, beliefs, slot, p);
  post.a_hat = post.a_hat >= 0.5 ? 1.0 : 0.0;  // tie declares selected
  if (posterior) *posterior = post;
  return genie_demod(block_obs[static_cast<std::size_t>(slot)],
                     static_cast<int>(post.a_hat), p);
}

SymbolBelief genie_demod(cplx y, int true_a, const EquivalentChannelParams& p) {
  p.validate();
  if (true_a == 0) {
    return SymbolBelief::uniform();
  }
  std::array<double, kQpskPoints> log_on;
  double log_off;
  slot_log_likelihoods(y, p, &log_on, &log_off);
  double scale = log_on[0];
  for (double v : log_on) scale = std::max(scale, v);
  SymbolBelief q;
  double sum = 0.0;
  for (int m = 0; m < kQpskPoints; ++m) {
    q[m] = std::exp(log_on[m] - scale);
    sum += q[m];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    return SymbolBelief::uniform();
  }
  q.normalize();
  return q;
}

void BlockTables::init(const cplx* obs, int count,
                       const EquivalentChannelParams& p) {
  p.validate();
  on.resize(static_cast<std::size_t>(count));
  off.resize(static_cast<std::size_t>(count));
  log_off.resize(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    std::array<double, kQpskPoints> log_on;
    double lo;
    slot_log_likelihoods(obs[t], p, &log_on, &lo);
    double scale = lo;
    for (double v : log_on) scale = std::max(scale, v);
    for (int m = 0; m < kQpskPoints; ++m) {
      on[static_cast<std::size_t>(t)][m] = std::exp(log_on[m] - scale);
    }
    off[static_cast<std::size_t>(t)] = std::exp(lo - scale);
    log_off[static_cast<std::size_t>(t)] = lo - scale;
  }
}

BlockDemodResult demod_block(const BlockTables& tables,
                             const std::vector<SymbolBelief>& priors,
                             DemodKind kind, int true_a,
                             const EquivalentChannelParams& p) {
  p.validate();
  const int B = tables.slots();
  if (static_cast<int>(priors.size()) != B || B < 1) {
    throw ContractViolation("demod_block: prior count mismatch");
  }

  BlockDemodResult out;
  out.q.resize(static_cast<std::size_t>(B));
  out.a_hat.resize(static_cast<std::size_t>(B));

  if (kind == DemodKind::genie) {
    for (int t = 0; t < B; ++t) {
      const std::size_t st = static_cast<std::size_t>(t);
      out.a_hat[st] = static_cast<double>(true_a);
      if (true_a == 0) {
        out.q[st] = SymbolBelief::uniform();
        continue;
      }
      // Rescale by the selected branch's own peak so deep off-branch
      // domination cannot zero the profile.
      const auto& on = tables.on[st];
      double peak = 0.0;
      for (int m = 0; m < kQpskPoints; ++m) peak = std::max(peak, on[m]);
      if (!(peak > 0.0)) {
        ++out.underflow_fallbacks;
        out.q[st] = SymbolBelief::uniform();
        continue;
      }
      SymbolBelief q;
      for (int m = 0; m < kQpskPoints; ++m) q[m] = on[m] / peak;
      q.normalize();
      out.q[st] = q;
    }
    return out;
  }

  // Shared block evidence: the per-slot exclusion is the total minus the
  // slot's own term.
  std::vector<double> d(static_cast<std::size_t>(B));
  double total = 0.0;
  for (int t = 0; t < B; ++t) {
    const std::size_t st = static_cast<std::size_t>(t);
    double dt = slot_evidence(tables.on[st], tables.log_off[st], priors[st]);
    if (!std::isfinite(dt)) {
      ++out.underflow_fallbacks;
      dt = 0.0;
    }
    d[st] = dt;
    total += dt;
  }

  double log_prior_odds = 0.0;
  const bool saturated = p.prior_selected >= 1.0 || p.prior_selected <= 0.0;
  if (!saturated) {
    log_prior_odds = std::log(p.prior_selected / (1.0 - p.prior_selected));
  }

  for (int t = 0; t < B; ++t) {
    const std::size_t st = static_cast<std::size_t>(t);
    double a_hat;
    if (saturated) {
      a_hat = p.prior_selected >= 1.0 ? 1.0 : 0.0;
    } else {
      a_hat = sigmoid(log_prior_odds + total - d[st]);
    }
    if (kind == DemodKind::hard) {
      a_hat = a_hat >= 0.5 ? 1.0 : 0.0;
    }
    out.a_hat[st] = a_hat;
    out.q[st] = mix_belief(tables.on[st], tables.off[st], a_hat,
                           &out.underflow_fallbacks);
  }
  return out;
}

double interference_power(int users, int antennas, int num_select,
                          int block_len, selection::Strategy strategy,
                          int samples, std::uint64_t seed) {
  if (num_select <= 0 || num_select >= users) {
    return 0.0;  // nobody idle, or nobody transmitting
  }
  if (samples < 1 || block_len < 1) {
    throw ContractViolation("interference_power: need samples, block_len >= 1");
  }

  const std::string key = std::to_string(users) + "," + std::to_string(antennas) +
                          "," + std::to_string(num_select) + "," +
                          std::to_string(block_len) + "," +
                          std::string(to_string(strategy)) + "," +
                          std::to_string(samples) + "," + std::to_string(seed);
  static std::mutex cache_mutex;
  static std::map<std::string, double> cache;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  Rng rng(seed);
  const double entry_var = 1.0 / static_cast<double>(antennas);
  double acc = 0.0;
  std::uint64_t count = 0;
  for (int s = 0; s < samples; ++s) {
    CMatrix h(users, antennas);
    for (int k = 0; k < users; ++k) {
      for (int n = 0; n < antennas; ++n) {
        h(k, n) = rng.complex_gaussian(entry_var);
      }
    }
    CMatrix x(users, block_len);
    for (int k = 0; k < users; ++k) {
      for (int t = 0; t < block_len; ++t) {
        x(k, t) = qpsk_symbol(static_cast<int>(rng.below(kQpskPoints)));
      }
    }
    selection::SelectionResult sel;
    try {
      sel = selection::select(strategy, h, x, num_select);
    } catch (const DegeneracyError&) {
      continue;  // measure-zero draw
    }
    std::vector<bool> chosen(static_cast<std::size_t>(users), false);
    for (int k : sel.order) chosen[static_cast<std::size_t>(k)] = true;
    for (int t = 0; t < block_len; ++t) {
      const CVector& u = sel.beams[static_cast<std::size_t>(t)];
      for (int k = 0; k < users; ++k) {
        if (chosen[static_cast<std::size_t>(k)]) continue;
        acc += std::norm((h.row(k) * u)(0, 0));
        ++count;
      }
    }
  }
  if (count == 0) {
    throw ContractViolation("interference_power: no valid samples drawn");
  }
  const double est = acc / static_cast<double>(count);
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    cache.emplace(key, est);
  }
  return est;
}

}  // namespace vbcsim::demod

// Demodulation for the per-user equivalent channel after beamforming. In a
// block where the user is selected the sample is its own symbol plus noise;
// otherwise it sees scaled interference, approximated as Gaussian. Three
// variants resolve the unknown selection state: belief propagation over the
// indicator (soft), MAP detection of the indicator (hard), and genie-aided.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vbcsim/selection.hpp"
#include "vbcsim/types.hpp"

namespace vbcsim::demod {

struct EquivalentChannelParams {
  double energy_penalty = 1.0;  // frame normalizer E, > 0
  double n0 = 1.0;              // receiver noise variance, > 0
  double sigma2 = 0.0;          // interference power E[|h u|^2] before the
                                // 1/sqrt(E) scaling, >= 0
  double prior_selected = 1.0;  // p(a = 1), the long-run selection frequency

  void validate() const;
  // Variance of a sample in a block where the user is idle.
  double idle_variance() const { return n0 + sigma2 / energy_penalty; }
};

struct IndicatorPosterior {
  double a_hat = 0.0;     // posterior mean of the selection indicator
  bool underflow = false; // some slot's likelihoods vanished and were skipped
};

enum class DemodKind { genie, hard, soft };

const char* to_string(DemodKind k);
DemodKind demod_kind_from_string(const std::string& name);

// Conditional density of one received sample given the symbol and the
// selection state: a=1 -> CN(x/sqrt(E), N0), a=0 -> CN(0, N0 + sigma2/E).
double slot_likelihood(cplx y, cplx x, int a, const EquivalentChannelParams& p);

// Posterior of the block's selection indicator from every slot except
// exclude_slot, marginalizing symbols with the decoder beliefs. Log-domain;
// slots whose likelihoods vanish under both states are skipped and flagged.
// With no contributing slots the posterior equals the prior.
IndicatorPosterior indicator_posterior(const std::vector<cplx>& block_obs,
                                       const std::vector<SymbolBelief>& beliefs,
                                       int exclude_slot,
                                       const EquivalentChannelParams& p);

// Symbol message for one slot: Q(x) proportional to
// a_hat * f(y|x, a=1) + (1 - a_hat) * f(y, a=0), i.e. a convex mix of the
// selected-branch profile and uniform. The slot's own observation never
// enters a_hat.
SymbolBelief soft_demod(const std::vector<cplx>& block_obs,
                        const std::vector<SymbolBelief>& beliefs, int slot,
                        const EquivalentChannelParams& p,
                        IndicatorPosterior* posterior = nullptr);

// Same as soft_demod with the indicator posterior collapsed to its MAP
// point; a tie declares the user selected. Q is uniform on the idle branch.
SymbolBelief hard_demod(const std::vector<cplx>& block_obs,
                        const std::vector<SymbolBelief>& beliefs, int slot,
                        const EquivalentChannelParams& p,
                        IndicatorPosterior* posterior = nullptr);

// Selection state known exactly.
SymbolBelief genie_demod(cplx y, int true_a, const EquivalentChannelParams& p);

// Per-slot likelihood tables for one US block, scaled per slot so the
// largest branch value is one (the scale cancels in ratios and in belief
// normalization). Computed once per frame; iterations only reweight them.
struct BlockTables {
  std::vector<std::array<double, kQpskPoints>> on;  // selected branch
  std::vector<double> off;                          // idle branch
  std::vector<double> log_off;                      // pre-scaling-consistent log
  void init(const cplx* obs, int count, const EquivalentChannelParams& p);
  int slots() const { return static_cast<int>(off.size()); }
};

struct BlockDemodResult {
  std::vector<SymbolBelief> q;  // per-slot messages to the decoder
  std::vector<double> a_hat;    // per-slot extrinsic indicator posterior
                                // (the true indicator for the genie)
  int underflow_fallbacks = 0;
};

// Batched per-block demodulation sharing the block-wide likelihood sums;
// one pass is O(B) instead of the O(B^2) of repeated per-slot calls.
// Agrees with the per-slot operations on non-degenerate inputs.
BlockDemodResult demod_block(const BlockTables& tables,
                             const std::vector<SymbolBelief>& priors,
                             DemodKind kind, int true_a,
                             const EquivalentChannelParams& p);

// Monte Carlo estimate of the interference power E[|h_k u_t|^2] seen by a
// non-selected user under the given scheduling configuration. Cached per
// configuration; the estimate does not depend on the operating SNR.
double interference_power(int users, int antennas, int num_select,
                          int block_len, selection::Strategy strategy,
                          int samples, std::uint64_t seed);

}  // namespace vbcsim::demod

// Experiment drivers. Every experiment samples trial-indexed work with
// per-trial derived seeds, so results are independent of thread count and
// execution order, and compared systems inside one trial share channel,
// data and noise realizations.
#pragma once

#include <functional>
#include <vector>

#include "vbcsim/config.hpp"
#include "vbcsim/metrics.hpp"

namespace vbcsim::harness {

// Runs job(0..n-1) on up to `threads` workers (1 = inline). Jobs must write
// only to their own output slots.
void parallel_for(int n, int threads, const std::function<void(int)>& job);

// cfg.threads, with 0 meaning the hardware concurrency.
int effective_threads(const SimConfig& cfg);

// Mean per-selected-user energy penalty per strategy over a grid of either
// k_tilde (energy_vs_ktilde) or block length (energy_vs_B), plus paired
// per-trial differences between configured strategies.
std::vector<MetricRecord> run_energy_experiment(const SimConfig& cfg);

// End-to-end coded BER/FER per (strategy x demodulator x SNR point), with
// paired difference records for demodulators under one strategy and for
// strategies under one demodulator.
std::vector<MetricRecord> run_ber_experiment(const SimConfig& cfg);

// Mean energy penalty per k_tilde and strategy, mapped through the QPSK
// mutual information to the achievable sum-rate lower bound per SNR.
std::vector<MetricRecord> run_sumrate_experiment(const SimConfig& cfg);

// Dispatch on cfg.experiment.
std::vector<MetricRecord> run_experiment(const SimConfig& cfg);

}  // namespace vbcsim::harness

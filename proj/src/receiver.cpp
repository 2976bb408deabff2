#include "vbcsim/receiver.hpp"

#include <cmath>

#include "vbcsim/errors.hpp"

namespace vbcsim::receiver {

DecodeResult run_iterative_decode(const coding::Frame& frame,
                                  const FrameObservation& obs,
                                  const demod::EquivalentChannelParams& params,
                                  DemodKind kind, int max_iterations) {
  params.validate();
  const int T = frame.num_symbols();
  const int n = frame.coded_len();
  const int B = obs.block_len;
  if (static_cast<int>(obs.y.size()) != T) {
    throw ContractViolation("run_iterative_decode: observation length mismatch");
  }
  if (B < 1 || T % B != 0 ||
      obs.num_blocks() != T / B) {
    throw ContractViolation("run_iterative_decode: bad block structure");
  }
  if (max_iterations < 1) {
    throw ContractViolation("run_iterative_decode: need at least one iteration");
  }

  const int num_blocks = T / B;

  // The channel observation never changes across iterations, so each
  // block's likelihood tables are computed once.
  std::vector<demod::BlockTables> tables(static_cast<std::size_t>(num_blocks));
  for (int b = 0; b < num_blocks; ++b) {
    tables[static_cast<std::size_t>(b)].init(obs.y.data() + b * B, B, params);
  }

  std::vector<SymbolBelief> priors(static_cast<std::size_t>(T));  // P_m
  std::vector<double> llr_coded(static_cast<std::size_t>(n));     // channel side
  std::vector<double> mu_input(static_cast<std::size_t>(n), 0.0); // outer -> inner
  std::vector<double> ext_input, ext_coded, copy_llrs, info_post, ext_copies;
  copy_llrs.resize(static_cast<std::size_t>(n));

  DecodeResult res;
  res.decoded.assign(static_cast<std::size_t>(frame.info_len), 0);
  res.per_iteration.reserve(static_cast<std::size_t>(max_iterations));

  for (int iter = 0; iter < max_iterations; ++iter) {
    IterationDiag diag;

    // Demodulate block by block with the current symbol beliefs.
    std::vector<SymbolBelief> block_priors(static_cast<std::size_t>(B));
    for (int b = 0; b < num_blocks; ++b) {
      for (int t = 0; t < B; ++t) {
        block_priors[static_cast<std::size_t>(t)] =
            priors[static_cast<std::size_t>(b * B + t)];
      }
      const int true_a = obs.selected[static_cast<std::size_t>(b)] ? 1 : 0;
      const demod::BlockDemodResult dem = demod::demod_block(
          tables[static_cast<std::size_t>(b)], block_priors, kind, true_a, params);
      diag.underflow_fallbacks += dem.underflow_fallbacks;
      for (int t = 0; t < B; ++t) {
        const std::size_t st = static_cast<std::size_t>(t);
        const int slot = b * B + t;
        diag.indicator_abs_err +=
            std::abs(dem.a_hat[st] - static_cast<double>(true_a));
        double l1, l0;
        coding::qpsk_bit_llrs(dem.q[st], &l1, &l0);
        llr_coded[static_cast<std::size_t>(frame.bicm_perm[2 * slot])] = l1;
        llr_coded[static_cast<std::size_t>(frame.bicm_perm[2 * slot + 1])] = l0;
      }
    }
    diag.indicator_abs_err /= static_cast<double>(T);

    // Inner code: extrinsics for the outer decoder.
    coding::siso_accumulator_decode(llr_coded, mu_input, nullptr, &ext_input);
    for (int i = 0; i < n; ++i) {
      copy_llrs[static_cast<std::size_t>(frame.ra_perm[i])] =
          ext_input[static_cast<std::size_t>(i)];
    }

    // Outer code: info decisions and refreshed copy extrinsics.
    coding::siso_repetition_decode(copy_llrs, frame.rate_inv, &info_post,
                                   &ext_copies);
    for (int i = 0; i < frame.info_len; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      res.decoded[si] = info_post[si] < 0.0 ? 1 : 0;
      if (res.decoded[si] != frame.info_bits[si]) ++diag.bit_errors;
    }

    // Inner code again: coded-bit extrinsics become the next demod priors.
    for (int i = 0; i < n; ++i) {
      mu_input[static_cast<std::size_t>(i)] =
          ext_copies[static_cast<std::size_t>(frame.ra_perm[i])];
    }
    coding::siso_accumulator_decode(llr_coded, mu_input, &ext_coded, nullptr);
    for (int t = 0; t < T; ++t) {
      priors[static_cast<std::size_t>(t)] = coding::belief_from_bit_llrs(
          ext_coded[static_cast<std::size_t>(frame.bicm_perm[2 * t])],
          ext_coded[static_cast<std::size_t>(frame.bicm_perm[2 * t + 1])]);
    }

    res.per_iteration.push_back(diag);
    res.bit_errors = diag.bit_errors;
  }

  return res;
}

}  // namespace vbcsim::receiver

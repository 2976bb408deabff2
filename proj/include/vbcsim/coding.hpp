// Repeat-accumulate coding with bit-interleaved QPSK mapping, and the
// soft-input soft-output decoders for both component codes. LLR convention
// throughout: lambda = log(p(bit=0) / p(bit=1)), clamped to +-kLlrClamp.
#pragma once

#include <cstdint>
#include <vector>

#include "vbcsim/rng.hpp"
#include "vbcsim/types.hpp"

namespace vbcsim::coding {

inline constexpr double kLlrClamp = 30.0;

inline double clamp_llr(double l) {
  if (l > kLlrClamp) return kLlrClamp;
  if (l < -kLlrClamp) return -kLlrClamp;
  return l;
}

// Fisher-Yates permutation of {0..n-1} from a seeded generator.
std::vector<int> random_permutation(int n, std::uint64_t seed);

std::vector<int> identity_permutation(int n);

// Repeat each info bit rate_inv times (consecutively), reorder the repeated
// stream by `perm` (accumulator input i is repeated-stream position perm[i]),
// then accumulate with a running XOR from state 0. Output length L * rate_inv.
std::vector<std::uint8_t> ra_encode(const std::vector<std::uint8_t>& info_bits,
                                    int rate_inv, const std::vector<int>& perm);

// Seeded-interleaver convenience overload.
std::vector<std::uint8_t> ra_encode(const std::vector<std::uint8_t>& info_bits,
                                    int rate_inv, std::uint64_t perm_seed);

// Gray-labelled QPSK: (b1, b0) -> ((1-2*b1) + i*(1-2*b0)) / sqrt(2).
cplx qpsk_map(int b1, int b0);

// Per-bit marginals of a symbol belief: probability that b1 = 1 / b0 = 1.
struct QpskBitMarginals {
  double p1_bit1;
  double p1_bit0;
};
QpskBitMarginals qpsk_soft_metrics(const SymbolBelief& belief);

// Bitwise LLRs (log p0/p1) of a symbol belief, clamped.
void qpsk_bit_llrs(const SymbolBelief& belief, double* llr_b1, double* llr_b0);

// Symbol belief assembled from two independent bit LLRs.
SymbolBelief belief_from_bit_llrs(double llr_b1, double llr_b0);

// Exact forward-backward pass over the two-state accumulator trellis.
// llr_coded: channel-side priors on the accumulator outputs; llr_input:
// priors on the accumulator inputs from the outer code. Outputs are the
// extrinsic LLRs in each direction (either pointer may be null).
void siso_accumulator_decode(const std::vector<double>& llr_coded,
                             const std::vector<double>& llr_input,
                             std::vector<double>* ext_coded,
                             std::vector<double>* ext_input);

// Repetition code SISO: posterior for info bit i is the sum of its copy
// LLRs; the extrinsic for copy j excludes that copy. copy_llrs holds
// rate_inv consecutive copies per info bit.
void siso_repetition_decode(const std::vector<double>& copy_llrs, int rate_inv,
                            std::vector<double>* info_posterior,
                            std::vector<double>* ext_copies);

// One user's transmit-side frame: info bits through interleaved QPSK.
struct Frame {
  int info_len = 0;
  int rate_inv = 0;
  std::vector<std::uint8_t> info_bits;   // L
  std::vector<std::uint8_t> coded_bits;  // L * rate_inv
  std::vector<cplx> symbols;             // T = L * rate_inv / 2
  std::vector<int> ra_perm;              // accumulator interleaver
  std::vector<int> bicm_perm;            // channel interleaver over coded bits

  int coded_len() const { return info_len * rate_inv; }
  int num_symbols() const { return coded_len() / 2; }
};

// Encodes and maps one frame. L * rate_inv must be even (QPSK pairs).
Frame build_frame(const std::vector<std::uint8_t>& info_bits, int rate_inv,
                  std::uint64_t ra_perm_seed, std::uint64_t bicm_perm_seed);

std::vector<std::uint8_t> random_bits(int n, std::uint64_t seed);

}  // namespace vbcsim::coding

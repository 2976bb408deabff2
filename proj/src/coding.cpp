#include "vbcsim/coding.hpp"

#include <cmath>
#include <string>

#include "vbcsim/errors.hpp"

namespace vbcsim::coding {

namespace {

// (p0, p1) from an LLR, computed stably for large magnitudes.
inline void llr_to_probs(double llr, double* p0, double* p1) {
  if (llr >= 0.0) {
    const double e = std::exp(-llr);
    *p0 = 1.0 / (1.0 + e);
    *p1 = e / (1.0 + e);
  } else {
    const double e = std::exp(llr);
    *p0 = e / (1.0 + e);
    *p1 = 1.0 / (1.0 + e);
  }
}

inline double probs_to_llr(double p0, double p1) {
  if (p0 < 1e-300) p0 = 1e-300;
  if (p1 < 1e-300) p1 = 1e-300;
  return clamp_llr(std::log(p0 / p1));
}

}  // namespace

std::vector<int> random_permutation(int n, std::uint64_t seed) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

std::vector<int> identity_permutation(int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  return perm;
}

std::vector<std::uint8_t> ra_encode(const std::vector<std::uint8_t>& info_bits,
                                    int rate_inv, const std::vector<int>& perm) {
  if (rate_inv < 1) {
    throw ContractViolation("ra_encode: rate_inv must be a positive integer");
  }
  const std::size_t n = info_bits.size() * static_cast<std::size_t>(rate_inv);
  if (perm.size() != n) {
    throw ContractViolation("ra_encode: interleaver length mismatch");
  }
  std::vector<std::uint8_t> out(n);
  std::uint8_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t rep_pos = static_cast<std::size_t>(perm[i]);
    acc ^= info_bits[rep_pos / static_cast<std::size_t>(rate_inv)];
    out[i] = acc;
  }
  return out;
}

std::vector<std::uint8_t> ra_encode(const std::vector<std::uint8_t>& info_bits,
                                    int rate_inv, std::uint64_t perm_seed) {
  const int n = static_cast<int>(info_bits.size()) * rate_inv;
  return ra_encode(info_bits, rate_inv, random_permutation(n, perm_seed));
}

cplx qpsk_map(int b1, int b0) { return qpsk_symbol(((b1 & 1) << 1) | (b0 & 1)); }

QpskBitMarginals qpsk_soft_metrics(const SymbolBelief& belief) {
  return {belief[2] + belief[3], belief[1] + belief[3]};
}

void qpsk_bit_llrs(const SymbolBelief& belief, double* llr_b1, double* llr_b0) {
  *llr_b1 = probs_to_llr(belief[0] + belief[1], belief[2] + belief[3]);
  *llr_b0 = probs_to_llr(belief[0] + belief[2], belief[1] + belief[3]);
}

SymbolBelief belief_from_bit_llrs(double llr_b1, double llr_b0) {
  double p0_b1, p1_b1, p0_b0, p1_b0;
  llr_to_probs(llr_b1, &p0_b1, &p1_b1);
  llr_to_probs(llr_b0, &p0_b0, &p1_b0);
  SymbolBelief q;
  q[0] = p0_b1 * p0_b0;
  q[1] = p0_b1 * p1_b0;
  q[2] = p1_b1 * p0_b0;
  q[3] = p1_b1 * p1_b0;
  q.normalize();
  return q;
}

void siso_accumulator_decode(const std::vector<double>& llr_coded,
                             const std::vector<double>& llr_input,
                             std::vector<double>* ext_coded,
                             std::vector<double>* ext_input) {
  const std::size_t n = llr_coded.size();
  if (llr_input.size() != n) {
    throw ContractViolation("siso_accumulator_decode: length mismatch");
  }
  if (n == 0) return;

  // Per-position probabilities; state s_t equals the output bit c_t and the
  // transition consumes input b_t = s_{t-1} XOR s_t.
  std::vector<double> pc0(n), pc1(n), pb0(n), pb1(n);
  for (std::size_t t = 0; t < n; ++t) {
    llr_to_probs(llr_coded[t], &pc0[t], &pc1[t]);
    llr_to_probs(llr_input[t], &pb0[t], &pb1[t]);
  }

  // Forward pass, normalized each step. alpha[t] = P(s_t | obs_0..t).
  std::vector<double> a0(n), a1(n);
  {
    double pa0 = 1.0, pa1 = 0.0;  // state before the first bit
    for (std::size_t t = 0; t < n; ++t) {
      double f0 = pc0[t] * (pa0 * pb0[t] + pa1 * pb1[t]);
      double f1 = pc1[t] * (pa0 * pb1[t] + pa1 * pb0[t]);
      const double s = f0 + f1;
      if (s > 0.0) {
        f0 /= s;
        f1 /= s;
      } else {
        f0 = f1 = 0.5;
      }
      a0[t] = f0;
      a1[t] = f1;
      pa0 = f0;
      pa1 = f1;
    }
  }

  // Backward pass. beta[t] ~ P(obs_{t+1..} | s_t), normalized.
  std::vector<double> b0(n), b1(n);
  {
    double nb0 = 0.5, nb1 = 0.5;
    b0[n - 1] = 0.5;
    b1[n - 1] = 0.5;
    for (std::size_t t = n - 1; t > 0; --t) {
      nb0 = pb0[t] * pc0[t] * b0[t] + pb1[t] * pc1[t] * b1[t];
      nb1 = pb1[t] * pc0[t] * b0[t] + pb0[t] * pc1[t] * b1[t];
      const double s = nb0 + nb1;
      if (s > 0.0) {
        nb0 /= s;
        nb1 /= s;
      } else {
        nb0 = nb1 = 0.5;
      }
      b0[t - 1] = nb0;
      b1[t - 1] = nb1;
    }
  }

  if (ext_coded) {
    ext_coded->resize(n);
    double pa0 = 1.0, pa1 = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      // Message to c_t from both trellis sides, excluding its own prior.
      const double e0 = (pa0 * pb0[t] + pa1 * pb1[t]) * b0[t];
      const double e1 = (pa0 * pb1[t] + pa1 * pb0[t]) * b1[t];
      (*ext_coded)[t] = probs_to_llr(e0, e1);
      pa0 = a0[t];
      pa1 = a1[t];
    }
  }

  if (ext_input) {
    ext_input->resize(n);
    double pa0 = 1.0, pa1 = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      // b_t = 0 keeps the state, b_t = 1 flips it.
      const double e0 = pa0 * pc0[t] * b0[t] + pa1 * pc1[t] * b1[t];
      const double e1 = pa0 * pc1[t] * b1[t] + pa1 * pc0[t] * b0[t];
      (*ext_input)[t] = probs_to_llr(e0, e1);
      pa0 = a0[t];
      pa1 = a1[t];
    }
  }
}

void siso_repetition_decode(const std::vector<double>& copy_llrs, int rate_inv,
                            std::vector<double>* info_posterior,
                            std::vector<double>* ext_copies) {
  if (rate_inv < 1 || copy_llrs.size() % static_cast<std::size_t>(rate_inv) != 0) {
    throw ContractViolation("siso_repetition_decode: bad copy count");
  }
  const std::size_t L = copy_llrs.size() / static_cast<std::size_t>(rate_inv);
  if (info_posterior) info_posterior->resize(L);
  if (ext_copies) ext_copies->resize(copy_llrs.size());
  for (std::size_t i = 0; i < L; ++i) {
    const std::size_t base = i * static_cast<std::size_t>(rate_inv);
    double total = 0.0;
    for (int j = 0; j < rate_inv; ++j) total += copy_llrs[base + static_cast<std::size_t>(j)];
    if (info_posterior) (*info_posterior)[i] = clamp_llr(total);
    if (ext_copies) {
      for (int j = 0; j < rate_inv; ++j) {
        const std::size_t idx = base + static_cast<std::size_t>(j);
        (*ext_copies)[idx] = clamp_llr(total - copy_llrs[idx]);
      }
    }
  }
}

Frame build_frame(const std::vector<std::uint8_t>& info_bits, int rate_inv,
                  std::uint64_t ra_perm_seed, std::uint64_t bicm_perm_seed) {
  const int L = static_cast<int>(info_bits.size());
  const int n = L * rate_inv;
  if (n % 2 != 0) {
    throw ConfigError("build_frame: coded length must be even for QPSK");
  }
  Frame f;
  f.info_len = L;
  f.rate_inv = rate_inv;
  f.info_bits = info_bits;
  f.ra_perm = random_permutation(n, ra_perm_seed);
  f.bicm_perm = random_permutation(n, bicm_perm_seed);
  f.coded_bits = ra_encode(info_bits, rate_inv, f.ra_perm);
  f.symbols.resize(static_cast<std::size_t>(n / 2));
  for (int t = 0; t < n / 2; ++t) {
    const int b1 = f.coded_bits[static_cast<std::size_t>(f.bicm_perm[2 * t])];
    const int b0 = f.coded_bits[static_cast<std::size_t>(f.bicm_perm[2 * t + 1])];
    f.symbols[static_cast<std::size_t>(t)] = qpsk_map(b1, b0);
  }
  return f;
}

std::vector<std::uint8_t> random_bits(int n, std::uint64_t seed) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
  Rng rng(seed);
  for (auto& b : bits) b = rng.coin() ? 1 : 0;
  return bits;
}

}  // namespace vbcsim::coding

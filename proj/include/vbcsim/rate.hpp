// Achievable-rate evaluation: mutual information of QPSK over complex AWGN
// and the sum-rate lower bound K_sel * C(1 / (E_mean * N0)) it induces for
// the normalized broadcast channel.
#pragma once

#include <cstdint>

namespace vbcsim::rate {

struct RatePoint {
  int k_tilde = 0;
  double snr_inv_n0 = 0.0;         // 1 / N0
  double energy_penalty_mean = 0.0;
  double sum_rate = 0.0;           // bits per channel use
};

// I(x; y) in bits for equiprobable unit-energy QPSK over y = sqrt(gamma) x + w,
// w ~ CN(0,1). Two-dimensional Gauss-Hermite quadrature, order 32.
double qpsk_awgn_mutual_info(double gamma);

// Monte Carlo estimate of the same integral; verification route.
double qpsk_awgn_mutual_info_mc(double gamma, int samples, std::uint64_t seed);

// k_tilde * C(1 / (mean_energy * n0)): every selected user sees an AWGN
// channel whose SNR is set by the average transmit energy penalty.
double sum_rate_lower_bound(int k_tilde, double mean_energy, double n0);

// One user's share: scheduled a fraction k_tilde / users of the time.
double per_user_rate_lower_bound(int k_tilde, int users, double mean_energy,
                                 double n0);

}  // namespace vbcsim::rate

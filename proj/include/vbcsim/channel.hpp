// i.i.d. Rayleigh block-fading generation and the normalized broadcast
// transmission. Channel entries are CN(0, 1/N) so the array gain does not
// grow with the antenna count; the transmit normalization keeps the average
// radiated power at one.
#pragma once

#include <cstdint>
#include <vector>

#include "vbcsim/rng.hpp"
#include "vbcsim/types.hpp"

namespace vbcsim::channel {

struct ChannelRealization {
  int users = 0;
  int antennas = 0;
  int coherence_time = 0;
  // One users x antennas matrix per fading block; row k is user k's channel.
  std::vector<CMatrix> blocks;

  // Channel row of user k in time slot t.
  CRowVector row(int user, int slot) const {
    return blocks[static_cast<std::size_t>(slot / coherence_time)].row(user);
  }
  const CMatrix& block_of_slot(int slot) const {
    return blocks[static_cast<std::size_t>(slot / coherence_time)];
  }
};

struct NoiseModel {
  double n0 = 1.0;  // complex noise variance, > 0 (0 allowed for noiseless tests)
};

// Draws ceil(T / T_c) independent fading blocks for K users and N antennas.
// T must be divisible by T_c; over-loaded operation requires K >= N >= 1.
ChannelRealization sample_block_fading(int users, int antennas, int slots,
                                       int coherence_time, std::uint64_t seed);

// One received sample: (1/sqrt(energy_norm)) * h * u + CN(0, n0).
cplx transmit_slot(const CVector& u, double energy_norm, const CRowVector& h,
                   const NoiseModel& noise, Rng& rng);

// Arithmetic mean of squared norms over a nonempty sequence of transmit
// vectors; the frame-level normalizer of the broadcast model.
double energy_penalty(const std::vector<CVector>& us);

}  // namespace vbcsim::channel

#include "vbcsim/channel.hpp"

#include <cmath>
#include <string>

#include "vbcsim/errors.hpp"

namespace vbcsim::channel {

ChannelRealization sample_block_fading(int users, int antennas, int slots,
                                       int coherence_time, std::uint64_t seed) {
  if (users < 1 || antennas < 1 || users < antennas) {
    throw ConfigError("sample_block_fading: requires K >= N >= 1, got K=" +
                      std::to_string(users) + " N=" + std::to_string(antennas));
  }
  if (slots < 1 || coherence_time < 1 || slots % coherence_time != 0) {
    throw ConfigError("sample_block_fading: slot count " + std::to_string(slots) +
                      " not divisible by coherence time " +
                      std::to_string(coherence_time));
  }

  ChannelRealization out;
  out.users = users;
  out.antennas = antennas;
  out.coherence_time = coherence_time;
  const int num_blocks = slots / coherence_time;
  out.blocks.reserve(static_cast<std::size_t>(num_blocks));

  const double entry_var = 1.0 / static_cast<double>(antennas);
  Rng rng(seed);
  for (int b = 0; b < num_blocks; ++b) {
    CMatrix block(users, antennas);
    for (int k = 0; k < users; ++k) {
      for (int n = 0; n < antennas; ++n) {
        block(k, n) = rng.complex_gaussian(entry_var);
      }
    }
    out.blocks.push_back(std::move(block));
  }
  return out;
}

cplx transmit_slot(const CVector& u, double energy_norm, const CRowVector& h,
                   const NoiseModel& noise, Rng& rng) {
  if (!(energy_norm > 0.0)) {
    throw ContractViolation("transmit_slot: energy_norm must be positive");
  }
  if (u.size() != h.size()) {
    throw ContractViolation("transmit_slot: dimension mismatch");
  }
  cplx y = (h * u)(0, 0) / std::sqrt(energy_norm);
  if (noise.n0 > 0.0) {
    y += rng.complex_gaussian(noise.n0);
  }
  return y;
}

double energy_penalty(const std::vector<CVector>& us) {
  if (us.empty()) {
    throw ContractViolation("energy_penalty: empty sequence");
  }
  double sum = 0.0;
  for (const auto& u : us) sum += u.squaredNorm();
  return sum / static_cast<double>(us.size());
}

}  // namespace vbcsim::channel

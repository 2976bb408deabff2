// Iterative receiver for one user's frame: demodulator, accumulator SISO
// and repetition SISO exchange extrinsic messages for a fixed number of
// iterations. One iteration is the full loop demod -> inner -> outer ->
// inner, after which the refreshed coded-bit beliefs feed the next demod.
#pragma once

#include <cstdint>
#include <vector>

#include "vbcsim/coding.hpp"
#include "vbcsim/demod.hpp"
#include "vbcsim/types.hpp"

namespace vbcsim::receiver {

using demod::DemodKind;

// What one user observed over its frame: T received samples plus the
// ground-truth selection indicator of each user-selection block (consumed
// by the genie demodulator and the diagnostics only).
struct FrameObservation {
  std::vector<cplx> y;
  std::vector<std::uint8_t> selected;
  int block_len = 0;  // slots per user-selection block

  int num_blocks() const { return static_cast<int>(selected.size()); }
};

struct IterationDiag {
  int bit_errors = 0;             // info-bit errors after this iteration
  double indicator_abs_err = 0.0; // mean |a_hat - a| over all slots
  int underflow_fallbacks = 0;
};

struct DecodeResult {
  std::vector<std::uint8_t> decoded;  // hard info-bit decisions
  int bit_errors = 0;                 // of the final iteration
  std::vector<IterationDiag> per_iteration;
};

DecodeResult run_iterative_decode(const coding::Frame& frame,
                                  const FrameObservation& obs,
                                  const demod::EquivalentChannelParams& params,
                                  DemodKind kind, int max_iterations);

}  // namespace vbcsim::receiver

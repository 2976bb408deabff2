// Greedy user selection for zero-forcing beamforming. The scheduler picks
// num_select of K users per block to minimize the transmit energy penalty,
// either from the realized symbol block (data dependent) or from channel
// state alone (data independent), with exhaustive search as the reference.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vbcsim/types.hpp"

namespace vbcsim::selection {

enum class Strategy { data_dependent, data_independent, exhaustive };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct SelectionResult {
  std::vector<int> order;      // user indices in selection order
  CMatrix h_sel;               // num_select x N, rows follow `order`
  CMatrix pinv;                // N x num_select right pseudo-inverse of h_sel
  std::vector<CVector> beams;  // per-slot transmit vectors; empty if the
                               // strategy was run without symbols
  // Energy objective of the chosen set: realized mean |u_t|^2 for the
  // data-dependent and exhaustive strategies, expected per-symbol energy
  // (trace of the inverse Gram) for the data-independent one.
  double block_energy = 0.0;
};

// u_t = pinv * x_sel.col(t); x_sel stacks the selected users' symbols.
std::vector<CVector> zf_beamform(const CMatrix& pinv, const CMatrix& x_sel);

// (1/B) sum_t |H_sel^+ x_t|^2 from a fresh factorization. Reference route
// for the accumulated energies maintained by the greedy recursions.
double block_energy_direct(const CMatrix& h_sel, const CMatrix& x_sel);

// Greedy minimization of the realized block energy. Each stage adds the
// user whose conditional energy increase is smallest given the symbols x
// (K x B) actually queued for the block; beams are built incrementally.
// Ties break toward the smaller user index. Users whose channel row lies
// (numerically) in the span of the already-selected rows are passed over;
// if no eligible user remains the stage throws DegeneracyError.
SelectionResult greedy_data_dependent(const CMatrix& h, const CMatrix& x,
                                      int num_select);

// Same greedy structure with the symbol average taken in closed form, so
// selection depends on the channel only. Accumulating the stage increments
// yields the trace of the selected set's inverse Gram matrix. When x is
// given the beams for those symbols are filled in after selection.
SelectionResult greedy_data_independent(const CMatrix& h, int num_select,
                                        const CMatrix* x = nullptr);

// Minimizes the realized block energy over all subsets of size num_select
// (lexicographic enumeration, ties keep the first minimizer). Throws
// CapExceededError when the subset count exceeds `cap`; rank-deficient
// subsets are skipped.
SelectionResult exhaustive_search(const CMatrix& h, const CMatrix& x,
                                  int num_select,
                                  std::uint64_t cap = 1000000);

SelectionResult select(Strategy strategy, const CMatrix& h, const CMatrix& x,
                       int num_select, std::uint64_t exhaustive_cap = 1000000);

}  // namespace vbcsim::selection

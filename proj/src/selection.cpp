#include "vbcsim/selection.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "vbcsim/errors.hpp"
#include "vbcsim/linalg.hpp"

namespace vbcsim::selection {

namespace {

void check_selection_args(const CMatrix& h, const CMatrix* x, int num_select) {
  if (h.rows() < 1 || h.cols() < 1) {
    throw ContractViolation("selection: empty channel matrix");
  }
  if (num_select < 1 || num_select > h.cols() || num_select > h.rows()) {
    throw ContractViolation("selection: need 1 <= num_select <= min(K, N)");
  }
  if (x != nullptr && (x->rows() != h.rows() || x->cols() < 1)) {
    throw ContractViolation("selection: symbol matrix must be K x B");
  }
}

CMatrix gather_rows(const CMatrix& m, const std::vector<int>& rows) {
  CMatrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  }
  return out;
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::data_dependent:
      return "data_dependent";
    case Strategy::data_independent:
      return "data_independent";
    case Strategy::exhaustive:
      return "exhaustive";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "data_dependent") return Strategy::data_dependent;
  if (name == "data_independent") return Strategy::data_independent;
  if (name == "exhaustive") return Strategy::exhaustive;
  throw ConfigError("unknown selection strategy '" + name + "'");
}

std::vector<CVector> zf_beamform(const CMatrix& pinv, const CMatrix& x_sel) {
  if (pinv.cols() != x_sel.rows()) {
    throw ContractViolation("zf_beamform: dimension mismatch");
  }
  std::vector<CVector> beams(static_cast<std::size_t>(x_sel.cols()));
  for (Eigen::Index t = 0; t < x_sel.cols(); ++t) {
    beams[static_cast<std::size_t>(t)] = pinv * x_sel.col(t);
  }
  return beams;
}

double block_energy_direct(const CMatrix& h_sel, const CMatrix& x_sel) {
  if (h_sel.rows() != x_sel.rows() || x_sel.cols() < 1) {
    throw ContractViolation("block_energy_direct: dimension mismatch");
  }
  const CMatrix pinv = linalg::pseudo_inverse(h_sel);
  return (pinv * x_sel).squaredNorm() / static_cast<double>(x_sel.cols());
}

SelectionResult greedy_data_dependent(const CMatrix& h, const CMatrix& x,
                                      int num_select) {
  check_selection_args(h, &x, num_select);
  const Eigen::Index K = h.rows();
  const Eigen::Index N = h.cols();
  const Eigen::Index B = x.cols();

  SelectionResult res;
  res.h_sel.resize(0, N);
  res.pinv = CMatrix::Zero(N, 0);
  CMatrix P = CMatrix::Identity(N, N);
  CMatrix U = CMatrix::Zero(N, B);  // beams built up stage by stage
  std::vector<bool> taken(static_cast<std::size_t>(K), false);

  for (int stage = 1; stage <= num_select; ++stage) {
    // Residuals and projected energies for every user; selected rows are
    // masked out below.
    const CMatrix resid = x - h * U;          // K x B
    const CMatrix hp = h * P;                 // K x N
    int best = -1;
    double best_inc = std::numeric_limits<double>::infinity();
    double best_denom = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) {
      if (taken[static_cast<std::size_t>(k)]) continue;
      const double denom = (hp.row(k) * h.row(k).adjoint())(0, 0).real();
      if (!(denom > linalg::kDegeneracyTolerance * h.row(k).squaredNorm())) {
        continue;
      }
      const double inc =
          resid.row(k).squaredNorm() / static_cast<double>(B) / denom;
      if (inc < best_inc) {
        best_inc = inc;
        best = static_cast<int>(k);
        best_denom = denom;
      }
    }
    if (best < 0) {
      throw DegeneracyError(
          "greedy_data_dependent: no user with independent channel left at "
          "stage " + std::to_string(stage),
          stage);
    }

    const CRowVector h_best = h.row(best);
    const CVector dir = (P * h_best.adjoint()) / best_denom;
    U += dir * resid.row(best);
    res.pinv = linalg::pinv_append(res.pinv, P, h_best);
    res.h_sel.conservativeResize(stage, N);
    res.h_sel.row(stage - 1) = h_best;
    P = linalg::projection_complement(res.pinv, res.h_sel);
    res.order.push_back(best);
    res.block_energy += best_inc;
    taken[static_cast<std::size_t>(best)] = true;
  }

  res.beams.resize(static_cast<std::size_t>(B));
  for (Eigen::Index t = 0; t < B; ++t) {
    res.beams[static_cast<std::size_t>(t)] = U.col(t);
  }
  return res;
}

SelectionResult greedy_data_independent(const CMatrix& h, int num_select,
                                        const CMatrix* x) {
  check_selection_args(h, x, num_select);
  const Eigen::Index K = h.rows();
  const Eigen::Index N = h.cols();

  SelectionResult res;
  res.h_sel.resize(0, N);
  res.pinv = CMatrix::Zero(N, 0);
  CMatrix P = CMatrix::Identity(N, N);
  std::vector<bool> taken(static_cast<std::size_t>(K), false);

  for (int stage = 1; stage <= num_select; ++stage) {
    const CMatrix hp = h * P;
    const CMatrix w = h * res.pinv;  // K x (stage-1)
    int best = -1;
    double best_inc = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < K; ++k) {
      if (taken[static_cast<std::size_t>(k)]) continue;
      const double denom = (hp.row(k) * h.row(k).adjoint())(0, 0).real();
      if (!(denom > linalg::kDegeneracyTolerance * h.row(k).squaredNorm())) {
        continue;
      }
      const double inc = (1.0 + w.row(k).squaredNorm()) / denom;
      if (inc < best_inc) {
        best_inc = inc;
        best = static_cast<int>(k);
      }
    }
    if (best < 0) {
      throw DegeneracyError(
          "greedy_data_independent: no user with independent channel left at "
          "stage " + std::to_string(stage),
          stage);
    }

    const CRowVector h_best = h.row(best);
    res.pinv = linalg::pinv_append(res.pinv, P, h_best);
    res.h_sel.conservativeResize(stage, N);
    res.h_sel.row(stage - 1) = h_best;
    P = linalg::projection_complement(res.pinv, res.h_sel);
    res.order.push_back(best);
    res.block_energy += best_inc;
    taken[static_cast<std::size_t>(best)] = true;
  }

  if (x != nullptr) {
    res.beams = zf_beamform(res.pinv, gather_rows(*x, res.order));
  }
  return res;
}

SelectionResult exhaustive_search(const CMatrix& h, const CMatrix& x,
                                  int num_select, std::uint64_t cap) {
  check_selection_args(h, &x, num_select);
  const int K = static_cast<int>(h.rows());

  // C(K, num_select), bailing out once past the cap.
  double subsets = 1.0;
  for (int i = 0; i < num_select; ++i) {
    subsets *= static_cast<double>(K - i) / static_cast<double>(i + 1);
  }
  if (subsets > static_cast<double>(cap)) {
    throw CapExceededError("exhaustive_search: " + std::to_string(subsets) +
                           " subsets exceed cap " + std::to_string(cap));
  }

  std::vector<int> comb(static_cast<std::size_t>(num_select));
  for (int i = 0; i < num_select; ++i) comb[static_cast<std::size_t>(i)] = i;

  std::vector<int> best_comb;
  double best_energy = std::numeric_limits<double>::infinity();
  for (;;) {
    const CMatrix h_sub = gather_rows(h, comb);
    const CMatrix x_sub = gather_rows(x, comb);
    try {
      const double e = block_energy_direct(h_sub, x_sub);
      if (e < best_energy) {
        best_energy = e;
        best_comb = comb;
      }
    } catch (const RankDeficiencyError&) {
      // collinear subset, not a valid zero-forcing set
    }

    // next lexicographic combination
    int i = num_select - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == K - num_select + i) {
      --i;
    }
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < num_select; ++j) {
      comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  if (best_comb.empty()) {
    throw DegeneracyError("exhaustive_search: every subset is rank deficient");
  }

  SelectionResult res;
  res.order = best_comb;
  res.h_sel = gather_rows(h, best_comb);
  res.pinv = linalg::pseudo_inverse(res.h_sel);
  res.beams = zf_beamform(res.pinv, gather_rows(x, best_comb));
  res.block_energy = best_energy;
  return res;
}

SelectionResult select(Strategy strategy, const CMatrix& h, const CMatrix& x,
                       int num_select, std::uint64_t exhaustive_cap) {
  switch (strategy) {
    case Strategy::data_dependent:
      return greedy_data_dependent(h, x, num_select);
    case Strategy::data_independent:
      return greedy_data_independent(h, num_select, &x);
    case Strategy::exhaustive:
      return exhaustive_search(h, x, num_select, exhaustive_cap);
  }
  throw ContractViolation("select: unknown strategy");
}

}  // namespace vbcsim::selection

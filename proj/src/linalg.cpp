#include "vbcsim/linalg.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

#include "vbcsim/errors.hpp"

namespace vbcsim::linalg {

namespace {

void check_finite(const CMatrix& A, const char* op) {
  if (!A.allFinite()) {
    throw ContractViolation(std::string(op) + ": non-finite entries");
  }
}

}  // namespace

double hermitian_deviation(const CMatrix& A) {
  if (A.size() == 0) return 0.0;
  const double norm = A.norm();
  if (norm == 0.0) return 0.0;
  return (A - A.adjoint()).cwiseAbs().maxCoeff() / norm;
}

double projected_energy(const CRowVector& h, const CMatrix& P) {
  if (h.cols() != P.rows()) {
    throw ContractViolation("projected_energy: dimension mismatch");
  }
  return ((h * P) * h.adjoint())(0, 0).real();
}

CMatrix pseudo_inverse(const CMatrix& H) {
  const Eigen::Index rows = H.rows();
  const Eigen::Index cols = H.cols();
  if (rows > cols) {
    throw ContractViolation("pseudo_inverse: rows > cols");
  }
  check_finite(H, "pseudo_inverse");
  if (rows == 0) {
    return CMatrix::Zero(cols, 0);
  }

  const CMatrix gram = H * H.adjoint();
  Eigen::LDLT<CMatrix> ldlt(gram);
  const Eigen::VectorXd d = ldlt.vectorD().real();
  const double min_pivot = d.minCoeff();
  const double max_pivot = d.maxCoeff();
  const double cond = (max_pivot > 0.0) ? min_pivot / max_pivot : 0.0;
  if (!(min_pivot > 0.0) || cond < kRankTolerance || ldlt.info() != Eigen::Success) {
    throw RankDeficiencyError(
        "pseudo_inverse: Gram matrix numerically singular (pivot ratio " +
            std::to_string(cond) + ")",
        cond);
  }
  CMatrix pinv = H.adjoint() * ldlt.solve(CMatrix::Identity(rows, rows));
  check_finite(pinv, "pseudo_inverse");
  return pinv;
}

CMatrix projection_complement(const CMatrix& H_pinv, const CMatrix& H) {
  const Eigen::Index n = H.cols() > 0 ? H.cols() : H_pinv.rows();
  if (H_pinv.rows() != n || H_pinv.cols() != H.rows()) {
    throw ContractViolation("projection_complement: dimension mismatch");
  }
  if (H.rows() == 0) {
    return CMatrix::Identity(n, n);
  }
  CMatrix P = CMatrix::Identity(n, n) - H_pinv * H;
  check_finite(P, "projection_complement");
  return P;
}

CMatrix pinv_append(const CMatrix& H_pinv_prev, const CMatrix& P_prev,
                    const CRowVector& h_new) {
  const Eigen::Index n = h_new.cols();
  if (H_pinv_prev.rows() != n || P_prev.rows() != n || P_prev.cols() != n) {
    throw ContractViolation("pinv_append: dimension mismatch");
  }
  const Eigen::Index prev = H_pinv_prev.cols();

  const CVector ph = P_prev * h_new.adjoint();           // P h^H
  const double denom = (h_new * ph)(0, 0).real();        // h P h^H
  const double scale = h_new.squaredNorm();
  if (!(denom > kDegeneracyTolerance * scale)) {
    throw DegeneracyError("pinv_append: new row inside span of previous rows");
  }

  CMatrix result(n, prev + 1);
  const CVector new_col = ph / denom;
  if (prev > 0) {
    // (I - P h^H h / (h P h^H)) H_prev^+ == H_prev^+ - new_col * (h H_prev^+)
    const CRowVector hHp = h_new * H_pinv_prev;
    result.leftCols(prev) = H_pinv_prev - new_col * hHp;
  }
  result.col(prev) = new_col;
  check_finite(result, "pinv_append");
  return result;
}

CMatrix block_gram_inverse(const CMatrix& G_prev_inv, const CMatrix& H_prev_pinv,
                           const CMatrix& P_prev, const CRowVector& h_new) {
  const Eigen::Index prev = G_prev_inv.rows();
  const Eigen::Index n = h_new.cols();
  if (G_prev_inv.cols() != prev || H_prev_pinv.cols() != prev ||
      (prev > 0 && H_prev_pinv.rows() != n) || P_prev.rows() != n ||
      P_prev.cols() != n) {
    throw ContractViolation("block_gram_inverse: dimension mismatch");
  }

  const double denom = projected_energy(h_new, P_prev);  // Schur complement
  const double scale = h_new.squaredNorm();
  if (!(denom > kDegeneracyTolerance * scale)) {
    throw DegeneracyError(
        "block_gram_inverse: new row inside span of previous rows");
  }

  CMatrix result(prev + 1, prev + 1);
  if (prev > 0) {
    const CRowVector w = h_new * H_prev_pinv;  // h H_prev^+
    result.topLeftCorner(prev, prev) = G_prev_inv + w.adjoint() * w / denom;
    result.topRightCorner(prev, 1) = -w.adjoint() / denom;
    result.bottomLeftCorner(1, prev) = -w / denom;
  }
  result(prev, prev) = 1.0 / denom;
  check_finite(result, "block_gram_inverse");
  return result;
}

}  // namespace vbcsim::linalg

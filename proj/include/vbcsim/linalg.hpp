// Complex dense primitives for zero-forcing beamforming: wide-matrix
// pseudo-inverse, orthogonal-complement projection, and the rank-one
// recursions that extend both when one row is appended to the channel stack.
#pragma once

#include "vbcsim/types.hpp"

namespace vbcsim::linalg {

// Pivot-ratio threshold below which a Gram matrix is declared rank deficient.
inline constexpr double kRankTolerance = 1e-12;

// Degeneracy threshold for the recursions: a candidate row h is considered
// inside the span of the previous rows when h P h^H <= kDegeneracyTolerance
// times |h|^2.
inline constexpr double kDegeneracyTolerance = 1e-12;

// Right pseudo-inverse A^H (A A^H)^{-1} of a full-row-rank wide matrix
// (rows <= cols). The Gram solve uses a Hermitian LDL^H factorization;
// throws RankDeficiencyError when min|pivot|/max|pivot| < kRankTolerance.
// A matrix with zero rows yields the cols x 0 empty pseudo-inverse.
CMatrix pseudo_inverse(const CMatrix& H);

// Projection onto the orthogonal complement of the row space of H:
// P = I - H_pinv * H. H_pinv must be the pseudo-inverse of H; the pair is
// only dimension-checked here. For an empty H this is the identity.
CMatrix projection_complement(const CMatrix& H_pinv, const CMatrix& H);

// Pseudo-inverse of [H; h_new] assembled from the pseudo-inverse and
// complement projector of H. Cost O(rows * cols^2) instead of a fresh
// factorization. Throws DegeneracyError when h_new P_prev h_new^H falls
// below the degeneracy threshold.
CMatrix pinv_append(const CMatrix& H_pinv_prev, const CMatrix& P_prev,
                    const CRowVector& h_new);

// Inverse Gram matrix ([H; h_new] [H; h_new]^H)^{-1} assembled blockwise
// from the previous inverse Gram, pseudo-inverse and projector. Same
// degeneracy contract as pinv_append.
CMatrix block_gram_inverse(const CMatrix& G_prev_inv, const CMatrix& H_prev_pinv,
                           const CMatrix& P_prev, const CRowVector& h_new);

// max |A - A^H| relative to the Frobenius norm; 0 for empty matrices.
double hermitian_deviation(const CMatrix& A);

// h P h^H for a Hermitian idempotent P; equals |h P|^2 and is the Schur
// complement scalar of the append recursions.
double projected_energy(const CRowVector& h, const CMatrix& P);

}  // namespace vbcsim::linalg

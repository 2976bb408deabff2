// Core value types shared across the simulator.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace vbcsim {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;

// QPSK constellation, Gray labelled: index m = (b1 << 1) | b0 maps to
// ((1 - 2*b1) + i*(1 - 2*b0)) / sqrt(2).
inline constexpr int kQpskPoints = 4;

inline cplx qpsk_symbol(int m) {
  const double inv_sqrt2 = 0.70710678118654752440;
  const double re = (m & 2) ? -inv_sqrt2 : inv_sqrt2;
  const double im = (m & 1) ? -inv_sqrt2 : inv_sqrt2;
  return {re, im};
}

// Probability vector over the QPSK constellation for one (user, slot).
struct SymbolBelief {
  std::array<double, kQpskPoints> p{0.25, 0.25, 0.25, 0.25};

  static SymbolBelief uniform() { return SymbolBelief{}; }

  double operator[](int m) const { return p[m]; }
  double& operator[](int m) { return p[m]; }

  // Renormalizes in place with a positivity floor so downstream products
  // never hit exact zeros.
  void normalize() {
    double s = 0.0;
    for (double& v : p) {
      if (v < 1e-300) v = 1e-300;
      s += v;
    }
    for (double& v : p) v /= s;
  }
};

}  // namespace vbcsim

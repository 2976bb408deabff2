#include "vbcsim/rate.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <vector>

#include "vbcsim/errors.hpp"
#include "vbcsim/rng.hpp"
#include "vbcsim/types.hpp"

namespace vbcsim::rate {

namespace {

constexpr int kQuadOrder = 32;
constexpr double kSqrtPi = 1.7724538509055160273;

struct Quadrature {
  std::vector<double> node;
  std::vector<double> weight;
};

// Gauss-Hermite rule for weight exp(-x^2) via the symmetric tridiagonal
// Jacobi matrix (Golub-Welsch); weights are sqrt(pi) times the squared
// first eigenvector components.
Quadrature gauss_hermite(int order) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int j = 1; j < order; ++j) {
    const double b = std::sqrt(static_cast<double>(j) / 2.0);
    jacobi(j, j - 1) = b;
    jacobi(j - 1, j) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  Quadrature q;
  q.node.resize(static_cast<std::size_t>(order));
  q.weight.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    q.node[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    q.weight[static_cast<std::size_t>(i)] = kSqrtPi * v0 * v0;
  }
  return q;
}

const Quadrature& quadrature() {
  static const Quadrature q = gauss_hermite(kQuadOrder);
  return q;
}

// log2 of the likelihood ratio sum inside the mutual-information integrand,
// max-normalized. w is the noise sample, m the sent constellation index.
double integrand(int m, cplx w, double sqrt_gamma) {
  double terms[kQpskPoints];
  double mx = -1e300;
  for (int mp = 0; mp < kQpskPoints; ++mp) {
    const cplx d = sqrt_gamma * (qpsk_symbol(m) - qpsk_symbol(mp)) + w;
    terms[mp] = -std::norm(d) + std::norm(w);
    mx = std::max(mx, terms[mp]);
  }
  double s = 0.0;
  for (int mp = 0; mp < kQpskPoints; ++mp) s += std::exp(terms[mp] - mx);
  return (mx + std::log(s)) / 0.69314718055994530942;
}

}  // namespace

double qpsk_awgn_mutual_info(double gamma) {
  if (!(gamma >= 0.0)) {
    throw ContractViolation("qpsk_awgn_mutual_info: gamma must be >= 0");
  }
  const Quadrature& q = quadrature();
  const double sqrt_gamma = std::sqrt(gamma);
  double acc = 0.0;
  for (int m = 0; m < kQpskPoints; ++m) {
    for (int j = 0; j < kQuadOrder; ++j) {
      for (int l = 0; l < kQuadOrder; ++l) {
        const cplx w(q.node[static_cast<std::size_t>(j)],
                     q.node[static_cast<std::size_t>(l)]);
        acc += q.weight[static_cast<std::size_t>(j)] *
               q.weight[static_cast<std::size_t>(l)] *
               integrand(m, w, sqrt_gamma);
      }
    }
  }
  // E over noise uses the CN(0,1) density exp(-|w|^2)/pi; the quadrature
  // absorbs exp(-|w|^2), the 1/pi remains.
  const double expected = acc / (kQpskPoints * kSqrtPi * kSqrtPi);
  double info = 2.0 - expected;
  if (info < 0.0) info = 0.0;
  if (info > 2.0) info = 2.0;
  return info;
}

double qpsk_awgn_mutual_info_mc(double gamma, int samples, std::uint64_t seed) {
  if (!(gamma >= 0.0) || samples < 1) {
    throw ContractViolation("qpsk_awgn_mutual_info_mc: bad arguments");
  }
  Rng rng(seed);
  const double sqrt_gamma = std::sqrt(gamma);
  double acc = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int m = static_cast<int>(rng.below(kQpskPoints));
    const cplx w = rng.complex_gaussian(1.0);
    acc += integrand(m, w, sqrt_gamma);
  }
  double info = 2.0 - acc / static_cast<double>(samples);
  return info;
}

double sum_rate_lower_bound(int k_tilde, double mean_energy, double n0) {
  if (k_tilde < 0) {
    throw ContractViolation("sum_rate_lower_bound: k_tilde < 0");
  }
  if (k_tilde == 0) return 0.0;
  if (!(mean_energy > 0.0) || !(n0 > 0.0)) {
    throw ContractViolation("sum_rate_lower_bound: need mean_energy, n0 > 0");
  }
  return k_tilde * qpsk_awgn_mutual_info(1.0 / (mean_energy * n0));
}

double per_user_rate_lower_bound(int k_tilde, int users, double mean_energy,
                                 double n0) {
  if (users < 1 || k_tilde > users) {
    throw ContractViolation("per_user_rate_lower_bound: bad user counts");
  }
  return sum_rate_lower_bound(k_tilde, mean_energy, n0) /
         static_cast<double>(users);
}

}  // namespace vbcsim::rate

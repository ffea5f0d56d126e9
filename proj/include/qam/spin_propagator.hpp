#pragma once

// Resonant one-kick propagator restricted to a fixed quasi-position:
//
//   A(vartheta) = exp(-i k V(vartheta)) exp(-i G),  G = pi (p/q) (S + beta0)^2
//
// exp(-i k V) is assembled from its Fourier-diagonal form
//   (e^{-ikV})_{jl} = (1/q) sum_m e^{-i (j-l) kappa_m} e^{-i k V(kappa_m)},
//   kappa_m = (vartheta + 2 pi m) / q,
// which holds for any 2 pi-periodic kick potential V.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "qam/params.hpp"

namespace qam::spinor {

inline constexpr int kMaxQ = 64;

struct CosPotential {
  double operator()(double x) const { return std::cos(x); }
};

/// Spin operator S = diag(0, 1, ..., q-1).
inline Eigen::MatrixXcd spin_matrix(int q) {
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(q, q);
  for (int l = 0; l < q; ++l) S(l, l) = static_cast<double>(l);
  return S;
}

/// Matrix of cos(theta) in the fibre at vartheta: hopping 1/2 between
/// neighbouring spin levels plus the twisted corner e^{+-i vartheta}/2.
inline Eigen::MatrixXcd V_matrix(double vartheta, int q) {
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(q, q);
  for (int l = 0; l + 1 < q; ++l) {
    V(l, l + 1) += 0.5;
    V(l + 1, l) += 0.5;
  }
  V(0, q - 1) += 0.5 * std::polar(1.0, vartheta);
  V(q - 1, 0) += 0.5 * std::polar(1.0, -vartheta);
  return V;
}

/// Diagonal of exp(-i G).
inline Eigen::VectorXcd free_phases(int p, int q, double beta0) {
  Eigen::VectorXcd d(q);
  for (int l = 0; l < q; ++l) {
    const double x = l + beta0;
    d(l) = std::polar(1.0, -kPi * p * x * x / q);
  }
  return d;
}

template <class Potential = CosPotential>
Eigen::MatrixXcd kick_matrix(double vartheta, double k, int q, Potential V = {}) {
  if (q < 1 || q > kMaxQ) throw InvalidArgument("spin propagator needs 1 <= q <= 64");
  Eigen::VectorXcd phase(q);
  Eigen::VectorXd kappa(q);
  for (int m = 0; m < q; ++m) {
    kappa(m) = (vartheta + kTwoPi * m) / q;
    phase(m) = std::polar(1.0, -k * V(kappa(m)));
  }
  Eigen::MatrixXcd E(q, q);
  for (int j = 0; j < q; ++j) {
    for (int l = 0; l < q; ++l) {
      std::complex<double> s = 0.0;
      for (int m = 0; m < q; ++m) s += std::polar(1.0, -(j - l) * kappa(m)) * phase(m);
      E(j, l) = s / static_cast<double>(q);
    }
  }
  return E;
}

template <class Potential = CosPotential>
Eigen::MatrixXcd spin_propagator(double vartheta, double k, int p, int q, double beta0,
                                 Potential V = {}) {
  Eigen::MatrixXcd A = kick_matrix(vartheta, k, q, V);
  A = A * free_phases(p, q, beta0).asDiagonal();
  return A;
}

inline Eigen::MatrixXcd spin_propagator(double vartheta, const SystemParams& s) {
  return spin_propagator(vartheta, s.k, s.p, s.q, s.beta0);
}

}  // namespace qam::spinor

#pragma once

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qam/errors.hpp"

namespace qam {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Fractional part in [0, 1).
inline double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

/// Reduce an angle to [-pi, pi).
inline double wrap_angle(double x) {
  double y = std::fmod(x + kPi, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  return y - kPi;
}

/// Dimensionless control parameters of the gravity-kicked particle near the
/// resonance tau = 2 pi p / q, with hbar = 1 and V(theta) = cos(theta).
///
/// Derived fields are filled by build_params(); treat instances as immutable
/// afterwards so they can be shared across worker threads.
struct SystemParams {
  double k = 0.0;        ///< kick strength
  double tau = 0.0;      ///< kicking period
  int p = 1;             ///< resonance numerator, gcd(p, q) = 1
  int q = 1;             ///< resonance order
  double epsilon = 0.0;  ///< detuning tau - 2 pi p / q (signed)
  double g = 0.0;        ///< rescaled gravity
  double eta = 0.0;      ///< g * tau
  double Omega = 0.0;    ///< bare winding eta * tau / (2 pi)
  double beta = 0.0;     ///< quasi-momentum of the rotor, [0, 1)
  double beta0 = 0.0;    ///< resonant quasi-momentum nu/p + q/2 mod 1
  int nu = 0;            ///< index selecting beta0, 0 <= nu < p
  int m_p = 0;           ///< (-1)^((p+1)/2) for odd p, 0 for even p

  double tau_over_2pi() const { return tau / kTwoPi; }
  double tau_res() const { return kTwoPi * p / q; }
  /// q * Omega, the quantity compared against r/s winding numbers.
  double q_omega() const { return q * Omega; }
};

inline int sign_m_p(int p) {
  if (p % 2 == 0) return 0;
  return ((p + 1) / 2) % 2 == 0 ? 1 : -1;
}

/// Build and validate a parameter set. The detuning is computed as
/// 2 pi (tau_over_2pi - p/q) so an exactly resonant input gives epsilon = 0.
inline SystemParams build_params(double k, double tau_over_2pi, double g, int p, int q, int nu,
                                 double beta) {
  if (q < 1) throw InvalidArgument("resonance order q must be >= 1");
  if (p < 1) throw InvalidArgument("resonance numerator p must be >= 1");
  if (std::gcd(p, q) != 1)
    throw InvalidArgument("p and q must be coprime (got " + std::to_string(p) + "/" +
                          std::to_string(q) + ")");
  if (nu < 0 || nu >= p)
    throw InvalidArgument("nu must satisfy 0 <= nu < p (got " + std::to_string(nu) + ")");
  if (!(g >= 0.0)) throw InvalidArgument("gravity g must be >= 0");
  if (!(beta >= 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in [0, 1)");
  if (!(tau_over_2pi > 0.0) || !std::isfinite(tau_over_2pi))
    throw InvalidArgument("tau/2pi must be positive and finite");
  if (!std::isfinite(k)) throw InvalidArgument("k must be finite");

  SystemParams s;
  s.k = k;
  s.p = p;
  s.q = q;
  s.nu = nu;
  s.g = g;
  s.beta = beta;
  s.epsilon = kTwoPi * (tau_over_2pi - static_cast<double>(p) / q);
  s.tau = s.tau_res() + s.epsilon;
  s.eta = g * s.tau;
  s.Omega = s.eta * s.tau / kTwoPi;
  s.beta0 = frac(static_cast<double>(nu) / p + 0.5 * q);
  s.m_p = sign_m_p(p);
  return s;
}

/// Same resonance and gravity, different quasi-momentum.
inline SystemParams with_beta(SystemParams s, double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in [0, 1)");
  s.beta = beta;
  return s;
}

/// Same resonance, kick strength and quasi-momentum; new period.
inline SystemParams with_tau_over_2pi(const SystemParams& s, double tau_over_2pi) {
  return build_params(s.k, tau_over_2pi, s.g, s.p, s.q, s.nu, s.beta);
}

}  // namespace qam

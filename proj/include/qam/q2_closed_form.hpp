#pragma once

// Closed-form bands and eigenvectors of the q = 2 spin propagator, with
// v = k cos(vartheta / 2). For nu odd the sign m_p flips, and beta0 != 0 adds
// the constant pi p beta0^2 / 2 to both eigenphases.

#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "qam/params.hpp"

namespace qam::spinor {

struct Q2Bands {
  std::array<double, 2> omega;            ///< eigenphases, not reduced mod 2 pi
  std::array<Eigen::Vector2cd, 2> vec;    ///< normalized eigenvectors
};

/// Effective sign: m_p (-1)^nu.
inline int q2_sign(int p, int nu) {
  if (p % 2 == 0) throw InvalidArgument("q = 2 closed form needs odd p");
  return sign_m_p(p) * ((nu % 2) ? -1 : 1);
}

inline double q2_beta0(int p, int nu) { return frac(static_cast<double>(nu) / p); }

inline Q2Bands q2_closed_form(double vartheta, double k, int p, int nu = 0) {
  const int mp = q2_sign(p, nu);
  const double b0 = q2_beta0(p, nu);
  const double offset = 0.5 * kPi * p * b0 * b0;
  const double v = k * std::cos(0.5 * vartheta);
  const double s = std::sin(v), c = std::cos(v);
  const double R = std::sqrt(1.0 + s * s);
  const double wbar = std::acos(c / std::sqrt(2.0));
  const std::complex<double> coef = 0.5 * std::complex<double>(-mp, 1.0);  // (i - m_p)/2
  const std::complex<double> twist = std::polar(1.0, -0.5 * vartheta);

  Q2Bands out;
  for (int j = 0; j < 2; ++j) {
    const double sg = j == 0 ? 1.0 : -1.0;
    out.omega[static_cast<std::size_t>(j)] = -mp * (0.25 * kPi + sg * wbar) + offset;

    double a, b;
    if (sg * c >= 0.0) {
      a = 1.0 + s * s + sg * c * R;
      b = c + sg * R;
    } else {
      // rationalised to avoid cancellation near sin v = 0
      const double d = 2.0 * s * s / (R + std::abs(c));
      a = R * d;
      b = sg * d;
    }
    Eigen::Vector2cd e;
    if (a == 0.0) {
      e << 1.0, 0.0;  // limit s -> 0+
    } else {
      const double ra = std::sqrt(a);
      e << s / ra, twist * coef * (b / ra);
    }
    if (j == 1) e *= std::polar(1.0, 0.5 * vartheta);
    out.vec[static_cast<std::size_t>(j)] = e;
  }
  return out;
}

/// d omega_j / d vartheta.
inline double q2_omega_derivative(double vartheta, double k, int p, int nu, int j) {
  const int mp = q2_sign(p, nu);
  const double v = k * std::cos(0.5 * vartheta);
  const double s = std::sin(v);
  const double sg = j == 0 ? 1.0 : -1.0;
  return mp * sg * 0.5 * k * std::sin(0.5 * vartheta) * s / std::sqrt(1.0 + s * s);
}

/// Scalar potential, identical for both bands.
inline double q2_scalar_potential(double vartheta, double k) {
  const double v = k * std::cos(0.5 * vartheta);
  const double vdot = -0.5 * k * std::sin(0.5 * vartheta);
  const double s2 = std::sin(v) * std::sin(v);
  return 2.0 * vdot * vdot / ((1.0 + s2) * (1.0 + s2));
}

/// Band label used by band_structure (ascending eigenphase in [0, 2 pi) at
/// vartheta = -pi) of the closed-form branch j. For p = 3, nu = 0 the two
/// labellings are swapped.
inline int q2_band_label(int j, int p, int nu = 0) {
  const auto cf = q2_closed_form(-kPi, 0.0, p, nu);
  const double w0 = std::fmod(std::fmod(cf.omega[0], kTwoPi) + kTwoPi, kTwoPi);
  const double w1 = std::fmod(std::fmod(cf.omega[1], kTwoPi) + kTwoPi, kTwoPi);
  const int first = w0 < w1 ? 0 : 1;
  return j == first ? 0 : 1;
}

/// Constant vector potential by band_structure label.
inline constexpr std::array<double, 2> kQ2Alpha = {0.0, -0.5};

/// Width max - min of either band over the zone.
inline double q2_band_width(double k) {
  if (k >= kPi) return 0.5 * kPi;
  return std::abs(std::acos(std::cos(k) / std::sqrt(2.0)) - 0.25 * kPi);
}

}  // namespace qam::spinor

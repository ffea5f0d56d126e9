#pragma once

// q-spinor representation of a rotor state. With N = q m + l (0 <= l < q),
//
//   phi_l(vartheta) = (2 pi)^{-1/2} sum_m psi(l + m q) e^{i m vartheta},
//
// sampled on vartheta_i = -pi + 2 pi i / M. A field remembers the window of
// orbital momenta [m_min, m_min + M) its samples represent, so the DFT
// round trip is exact.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "qam/fourier.hpp"
#include "qam/husimi.hpp"
#include "qam/rotor.hpp"

namespace qam::spinor {

using qkp::floor_div;
using qkp::floor_mod;

inline double grid_point(std::size_t i, std::size_t M) {
  return -kPi + kTwoPi * static_cast<double>(i) / static_cast<double>(M);
}

inline std::vector<double> vartheta_grid(std::size_t M) {
  std::vector<double> g(M);
  for (std::size_t i = 0; i < M; ++i) g[i] = grid_point(i, M);
  return g;
}

struct SpinorField {
  int q = 1;
  std::size_t M = 0;
  long m_min = 0;
  double beta = 0.0;
  std::vector<std::vector<cplx>> comps;  ///< comps[l][i] = phi_l(vartheta_i)

  double dvartheta() const { return kTwoPi / static_cast<double>(M); }

  /// sum_l integral |phi_l|^2 dvartheta (equals the rotor norm).
  double norm_squared() const {
    double s = 0.0;
    for (const auto& c : comps)
      for (const auto& z : c) s += std::norm(z);
    return s * dvartheta();
  }

  /// d/dvartheta of component l, exact for the field's momentum window.
  std::vector<cplx> derivative(int l) const {
    fourier::Dft dft;
    std::vector<cplx> spec(M), out(M);
    dft.forward(spec, comps[static_cast<std::size_t>(l)]);
    for (std::size_t b = 0; b < M; ++b) {
      const long m = m_min + floor_mod(static_cast<long>(b) - m_min, static_cast<long>(M));
      spec[b] *= cplx(0.0, static_cast<double>(m)) / static_cast<double>(M);
    }
    dft.inverse(out, spec);
    return out;
  }
};

inline constexpr double kInvSqrt2Pi = 0.3989422804014327;

/// Orbital-momentum window needed to hold a ladder for resonance order q.
inline std::pair<long, long> m_range(const qkp::RotorState& s, int q) {
  return {floor_div(s.n_min, q), floor_div(s.n_max(), q)};
}

inline SpinorField decompose(const qkp::RotorState& s, int q, std::size_t M,
                             std::optional<long> m_min = {}) {
  if (q < 1) throw InvalidArgument("q must be >= 1");
  const auto [lo, hi] = m_range(s, q);
  const long span = hi - lo + 1;
  if (static_cast<long>(M) < span)
    throw InvalidArgument("spinor grid of " + std::to_string(M) +
                          " points aliases a ladder spanning " + std::to_string(span) +
                          " orbital momenta");
  SpinorField f;
  f.q = q;
  f.M = M;
  f.beta = s.beta;
  // centre the window on the ladder unless told otherwise
  f.m_min = m_min ? *m_min : lo - (static_cast<long>(M) - span) / 2;
  if (lo < f.m_min || hi >= f.m_min + static_cast<long>(M))
    throw InvalidArgument("requested momentum window does not contain the ladder");
  f.comps.assign(static_cast<std::size_t>(q), std::vector<cplx>(M));

  fourier::Dft dft;
  std::vector<cplx> spec(M);
  for (int l = 0; l < q; ++l) {
    std::fill(spec.begin(), spec.end(), cplx{0.0, 0.0});
    for (long m = lo; m <= hi; ++m) {
      const long n = l + m * q;
      if (n < s.n_min || n > s.n_max()) continue;
      // e^{i m vartheta_i} = (-1)^m e^{2 pi i m i / M}
      const double sign = (m & 1) ? -1.0 : 1.0;
      spec[static_cast<std::size_t>(floor_mod(m, static_cast<long>(M)))] =
          sign * kInvSqrt2Pi * s.amps[static_cast<std::size_t>(n - s.n_min)];
    }
    dft.inverse(f.comps[static_cast<std::size_t>(l)], spec);
  }
  return f;
}

/// Rotor amplitudes of the field on the given ladder. Orbital momenta of the
/// field window falling outside the ladder are dropped.
inline qkp::RotorState recompose(const SpinorField& f, qkp::Ladder ladder) {
  qkp::check_ladder(ladder);
  qkp::RotorState s;
  s.beta = f.beta;
  s.n_min = ladder.n_min;
  s.amps.assign(ladder.size, cplx{0.0, 0.0});
  fourier::Dft dft;
  std::vector<cplx> spec(f.M);
  const double scale = std::sqrt(kTwoPi) / static_cast<double>(f.M);
  for (int l = 0; l < f.q; ++l) {
    dft.forward(spec, f.comps[static_cast<std::size_t>(l)]);
    for (long j = 0; j < static_cast<long>(f.M); ++j) {
      const long m = f.m_min + j;
      const long n = l + m * f.q;
      if (n < s.n_min || n > s.n_max()) continue;
      const double sign = (m & 1) ? -1.0 : 1.0;
      s.amps[static_cast<std::size_t>(n - s.n_min)] =
          sign * scale * spec[static_cast<std::size_t>(floor_mod(m, static_cast<long>(f.M)))];
    }
  }
  return s;
}

/// Smallest power-of-two ladder covering the field's momentum window.
inline qkp::Ladder covering_ladder(const SpinorField& f) {
  const long lo = f.m_min * f.q;
  const long hi = (f.m_min + static_cast<long>(f.M)) * f.q - 1;
  std::size_t size = 2;
  while (static_cast<long>(size) < hi - lo + 1) size *= 2;
  const long slack = static_cast<long>(size) - (hi - lo + 1);
  return {lo - slack / 2, size};
}

inline qkp::RotorState recompose(const SpinorField& f) { return recompose(f, covering_ladder(f)); }

/// Periodic Gaussian packet in vartheta centred at vartheta0 with mean orbital
/// momentum m0; |g|^2 has angular spread sigma. Normalized on the grid.
inline std::vector<cplx> gaussian_packet(std::size_t M, double vartheta0, double m0, double sigma) {
  std::vector<cplx> g(M, cplx{0.0, 0.0});
  const double cutoff = 9.0 / sigma;
  const long mlo = static_cast<long>(std::ceil(m0 - cutoff));
  const long mhi = static_cast<long>(std::floor(m0 + cutoff));
  for (std::size_t i = 0; i < M; ++i) {
    const double th = grid_point(i, M);
    cplx acc = 0.0;
    for (long m = mlo; m <= mhi; ++m) {
      const double d = static_cast<double>(m) - m0;
      acc += std::exp(-d * d * sigma * sigma) * std::polar(1.0, static_cast<double>(m) * (th - vartheta0));
    }
    g[i] = acc;
  }
  double n = 0.0;
  for (const auto& z : g) n += std::norm(z);
  n = std::sqrt(n * kTwoPi / static_cast<double>(M));
  for (auto& z : g) z /= n;
  return g;
}

}  // namespace qam::spinor

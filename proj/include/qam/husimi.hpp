#pragma once

// Phase-space picture on the pseudoclassical cylinder (vartheta = q theta mod
// 2 pi, I = eps m) where N = q m + l, l = N mod q. Coherent states are
// Gaussians in m of angular width sigma = sqrt(hbar_eff / 2), hbar_eff =
// |eps| q^2; the spin index l is traced out.

#include <cmath>
#include <cstddef>
#include <vector>

#include "qam/rotor.hpp"

namespace qam::qkp {

struct UniformAxis {
  double start = 0.0;
  double step = 1.0;
  std::size_t count = 1;

  double at(std::size_t i) const { return start + step * static_cast<double>(i); }
};

/// Row-major 2D table; x runs along columns, y along rows.
struct Grid2D {
  std::size_t rows = 0, cols = 0;
  double x0 = 0.0, dx = 1.0, y0 = 0.0, dy = 1.0;
  std::vector<double> data;

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

inline double hbar_eff(const SystemParams& p) { return std::abs(p.epsilon) * p.q * p.q; }

inline double coherent_sigma(const SystemParams& p) {
  if (p.epsilon == 0.0) throw InvalidArgument("coherent states need a nonzero detuning");
  return std::sqrt(0.5 * hbar_eff(p));
}

/// floor division that also works for negative numerators
inline long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
inline long floor_mod(long a, long b) { return a - b * floor_div(a, b); }

/// Rotor coherent state centred at theta = vartheta0 / q and I = I0: the spin
/// vector is the one localizing the rotor in theta.
inline RotorState coherent_state(const SystemParams& p, double vartheta0, double I0, double beta,
                                 std::size_t ladder_size = 1024) {
  const double sigma = coherent_sigma(p);
  const double m0 = I0 / p.epsilon;
  const long center = static_cast<long>(std::llround(m0 * p.q));
  RotorState s;
  s.beta = beta;
  s.n_min = center - static_cast<long>(ladder_size / 2);
  s.amps.assign(ladder_size, cplx{0.0, 0.0});
  check_ladder(s.ladder());
  for (std::size_t i = 0; i < ladder_size; ++i) {
    const long n = s.n_min + static_cast<long>(i);
    const long l = floor_mod(n, p.q);
    const double m = static_cast<double>(floor_div(n - l, p.q));
    const double env = std::exp(-(m - m0) * (m - m0) * sigma * sigma);
    if (env < 1e-300) continue;
    s.amps[i] = env * std::polar(1.0, -m * vartheta0 - static_cast<double>(l) * vartheta0 / p.q);
  }
  s.normalize();
  return s;
}

/// Husimi density on (vartheta, I); normalized so sum * dvartheta * dI = 1.
inline Grid2D husimi(const RotorState& s, const UniformAxis& vartheta, const UniformAxis& I,
                     const SystemParams& p) {
  if (vartheta.count < 1 || I.count < 1 || !(vartheta.step > 0.0) || !(I.step > 0.0))
    throw InvalidArgument("husimi grids must be nonempty with positive steps");
  const double sigma = coherent_sigma(p);
  const long q = p.q;
  const double cutoff = 9.0 / sigma;  // exp(-81) is far below double resolution of the sum

  Grid2D out;
  out.rows = I.count;
  out.cols = vartheta.count;
  out.x0 = vartheta.start;
  out.dx = vartheta.step;
  out.y0 = I.start;
  out.dy = I.step;
  out.data.assign(out.rows * out.cols, 0.0);

  std::vector<cplx> w;
  std::vector<long> ms;
  for (std::size_t r = 0; r < I.count; ++r) {
    const double m0 = I.at(r) / p.epsilon;
    const long mlo = static_cast<long>(std::ceil(m0 - cutoff));
    const long mhi = static_cast<long>(std::floor(m0 + cutoff));
    for (std::size_t c = 0; c < vartheta.count; ++c) {
      const double th = vartheta.at(c);
      double h = 0.0;
      for (long l = 0; l < q; ++l) {
        cplx acc = 0.0;
        for (long m = mlo; m <= mhi; ++m) {
          const long idx = l + m * q - s.n_min;
          if (idx < 0 || idx >= static_cast<long>(s.size())) continue;
          const double d = static_cast<double>(m) - m0;
          acc += std::exp(-d * d * sigma * sigma) * std::polar(1.0, static_cast<double>(m) * th) *
                 s.amps[static_cast<std::size_t>(idx)];
        }
        h += std::norm(acc);
      }
      out(r, c) = h;
    }
  }
  double total = 0.0;
  for (double v : out.data) total += v;
  total *= vartheta.step * I.step;
  if (total > 0.0)
    for (double& v : out.data) v /= total;
  return out;
}

/// (row, col) of the maximum.
inline std::pair<std::size_t, std::size_t> argmax(const Grid2D& g) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.data.size(); ++i)
    if (g.data[i] > g.data[best]) best = i;
  return {best / g.cols, best % g.cols};
}

}  // namespace qam::qkp

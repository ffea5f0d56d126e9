#pragma once

// Pseudoclassical kicked maps of a single band. On the torus
//
//   vartheta' = vartheta + J,          J' = J - f(vartheta') + 2 pi Omega q,
//   f = eps q^2 d omega_j / d vartheta,
//
// and in accelerating form (vartheta, I) with J_n = q^2 I_n + 2 pi Omega q n + varrho.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "qam/bands.hpp"
#include "qam/fourier.hpp"
#include "qam/params.hpp"
#include "qam/q2_closed_form.hpp"

namespace qam::pseudo {

struct MapParams {
  int j = 0;
  double epsilon = 0.0;
  double k = 0.0;
  int q = 1;
  double Omega = 0.0;
  double varrho = 0.0;
  fourier::TrigSeries omega;  ///< omega_j(vartheta)

  double kick(double th) const { return epsilon * q * q * omega.derivative(th); }
  double kick_prime(double th) const { return epsilon * q * q * omega.second_derivative(th); }
  double drift() const { return kTwoPi * Omega * q; }
};

/// varrho = q (-eps q alpha_j + pi Omega + tau beta - 2 pi p beta0 / q).
inline double phase_offset(const SystemParams& s, double alpha_j) {
  return s.q * (-s.epsilon * s.q * alpha_j + kPi * s.Omega + s.tau * s.beta -
                kTwoPi * s.p * s.beta0 / s.q);
}

inline MapParams make_map_params(const SystemParams& s, const spinor::BandData& bd, int j) {
  if (bd.q != s.q || bd.p != s.p || bd.k != s.k || bd.beta0 != s.beta0)
    throw InvalidArgument("band data computed for different parameters");
  if (j < 0 || j >= s.q) throw InvalidArgument("band index out of range");
  MapParams mp;
  mp.j = j;
  mp.epsilon = s.epsilon;
  mp.k = s.k;
  mp.q = s.q;
  mp.Omega = s.Omega;
  mp.omega = spinor::omega_series(bd, j);
  mp.varrho = phase_offset(s, spinor::geometric_potentials(bd, j).alpha);
  return mp;
}

inline MapParams make_map_params(const SystemParams& s, int j, spinor::BandOptions opt = {}) {
  return make_map_params(s, spinor::band_structure(s, opt), j);
}

struct TorusPoint {
  double vartheta = 0.0;
  double J = 0.0;
};

/// Lifted step: no reduction, so windings can be counted.
inline TorusPoint lifted_step(TorusPoint pt, const MapParams& mp) {
  const double th = pt.vartheta + pt.J;
  return {th, pt.J - mp.kick(th) + mp.drift()};
}

inline TorusPoint torus_map_step(TorusPoint pt, const MapParams& mp) {
  const double th = wrap_angle(pt.vartheta + pt.J);
  return {th, wrap_angle(pt.J - mp.kick(th) + mp.drift())};
}

/// Exact inverse of torus_map_step.
inline TorusPoint torus_map_step_back(TorusPoint pt, const MapParams& mp) {
  const double J = wrap_angle(pt.J + mp.kick(pt.vartheta) - mp.drift());
  return {wrap_angle(pt.vartheta - J), J};
}

using Mat2 = std::array<std::array<double, 2>, 2>;

/// d(vartheta', J') / d(vartheta, J).
inline Mat2 step_jacobian(TorusPoint pt, const MapParams& mp) {
  const double fp = mp.kick_prime(pt.vartheta + pt.J);
  return {{{1.0, 1.0}, {-fp, 1.0 - fp}}};
}

inline Mat2 matmul(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

/// Closed-form q = 2 map with closed-form branch label j_cf (not the
/// band_structure label) and k~ = eps k.
inline TorusPoint q2_torus_map_step(TorusPoint pt, int j_cf, int p, int nu, double k,
                                    double epsilon, double Omega) {
  const int mp = spinor::q2_sign(p, nu);
  const double th = wrap_angle(pt.vartheta + pt.J);
  const double v = k * std::cos(0.5 * th);
  const double sv = std::sin(v);
  const double sg = j_cf == 0 ? 1.0 : -1.0;
  const double J = pt.J + 4.0 * kPi * Omega -
                   2.0 * sg * mp * (epsilon * k) * std::sin(0.5 * th) * sv / std::sqrt(1.0 + sv * sv);
  return {th, wrap_angle(J)};
}

/// 2 pi frac(x n) with the product formed in extended precision.
inline double drift_phase(double x, long n) {
  const long double t = static_cast<long double>(x) * static_cast<long double>(n);
  const long double f = t - std::floor(t);
  return static_cast<double>(f * 2.0L * 3.141592653589793238462643383279502884L);
}

struct AccelPoint {
  double vartheta = 0.0;
  double I = 0.0;  ///< not reduced
};

/// Step from just after kick n to just after kick n + 1.
inline AccelPoint accelerated_map_step(AccelPoint pt, long n, const MapParams& mp) {
  const double th = wrap_angle(pt.vartheta + mp.q * mp.q * pt.I + drift_phase(mp.Omega * mp.q, n) +
                               mp.varrho);
  return {th, pt.I - mp.epsilon * mp.omega.derivative(th)};
}

/// J_n = q^2 I_n + 2 pi Omega q n + varrho, reduced.
inline double torus_momentum(const AccelPoint& pt, long n, const MapParams& mp) {
  return wrap_angle(mp.q * mp.q * pt.I + drift_phase(mp.Omega * mp.q, n) + mp.varrho);
}

struct PeriodicOrbit {
  long r = 0, s = 1;
  std::vector<TorusPoint> points;
  double trace = 0.0;
  double residue = 0.0;
  bool stable = false;
  double closure = 0.0;  ///< residual norm of the winding-constrained closure
};

struct OrbitSearchOptions {
  int grid = 32;
  int max_iter = 100;
  double newton_tol = 1e-10;
  bool prefer_stable = true;
};

namespace detail {

struct Flow {
  TorusPoint end;
  Mat2 mono;
};

inline Flow flow(TorusPoint p, long s, const MapParams& mp) {
  Mat2 m{{{1.0, 0.0}, {0.0, 1.0}}};
  for (long i = 0; i < s; ++i) {
    m = matmul(step_jacobian(p, mp), m);
    p = lifted_step(p, mp);
  }
  return {p, m};
}

inline std::array<double, 2> residual(TorusPoint start, const Flow& f, long r) {
  return {wrap_angle(f.end.vartheta - start.vartheta), f.end.J - start.J - kTwoPi * r};
}

inline double norm(const std::array<double, 2>& v) { return std::hypot(v[0], v[1]); }

inline std::optional<PeriodicOrbit> newton(TorusPoint x, long r, long s, const MapParams& mp,
                                           const OrbitSearchOptions& opt) {
  Flow f = flow(x, s, mp);
  auto res = residual(x, f, r);
  double nr = norm(res);
  for (int it = 0; it < opt.max_iter && nr > 1e-14; ++it) {
    const double a = f.mono[0][0] - 1.0, b = f.mono[0][1];
    const double c = f.mono[1][0], d = f.mono[1][1] - 1.0;
    const double det = a * d - b * c;
    if (!std::isfinite(det) || std::abs(det) < 1e-300) return std::nullopt;
    const double dx = -(d * res[0] - b * res[1]) / det;
    const double dy = -(-c * res[0] + a * res[1]) / det;
    double lam = 1.0;
    bool improved = false;
    for (int h = 0; h < 40; ++h, lam *= 0.5) {
      const TorusPoint y{wrap_angle(x.vartheta + lam * dx), x.J + lam * dy};
      const Flow fy = flow(y, s, mp);
      const auto ry = residual(y, fy, r);
      if (norm(ry) < nr) {
        x = y;
        f = fy;
        res = ry;
        nr = norm(ry);
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (!(nr <= opt.newton_tol)) return std::nullopt;

  PeriodicOrbit o;
  o.r = r;
  o.s = s;
  o.closure = nr;
  TorusPoint p = x;
  for (long i = 0; i < s; ++i) {
    o.points.push_back({wrap_angle(p.vartheta), wrap_angle(p.J)});
    p = lifted_step(p, mp);
  }
  o.trace = f.mono[0][0] + f.mono[1][1];
  o.residue = (2.0 - o.trace) / 4.0;
  o.stable = o.residue > 0.0 && o.residue < 1.0;
  return o;
}

}  // namespace detail

/// Newton search for an (r, s) orbit: user seeds first, then a uniform grid.
/// Non-reduced (r, s) are searched as given. Returns nothing if no seed
/// converges; with prefer_stable, a stable orbit wins over unstable ones.
inline std::optional<PeriodicOrbit> find_periodic_orbit(long r, long s, const MapParams& mp,
                                                        const std::vector<TorusPoint>& seeds = {},
                                                        OrbitSearchOptions opt = {}) {
  if (s < 1) throw InvalidArgument("orbit period s must be >= 1");
  if (mp.epsilon == 0.0)
    throw InvalidArgument("at zero detuning the map is a pure rotation without isolated orbits");
  std::vector<TorusPoint> all = seeds;
  for (int a = 0; a < opt.grid; ++a)
    for (int b = 0; b < opt.grid; ++b)
      all.push_back({-kPi + kTwoPi * (a + 0.5) / opt.grid, -kPi + kTwoPi * (b + 0.5) / opt.grid});

  std::optional<PeriodicOrbit> fallback;
  for (const auto& seed : all) {
    auto o = detail::newton(seed, r, s, mp, opt);
    if (!o) continue;
    if (o->stable || !opt.prefer_stable) return o;
    if (!fallback) fallback = o;
  }
  return fallback;
}

struct Acceleration {
  double a_I = 0.0;  ///< per-kick increment of I
  double a = 0.0;    ///< per-kick increment of the physical momentum
};

inline Acceleration orbit_acceleration(long r, long s, const SystemParams& p) {
  if (p.epsilon == 0.0) throw InvalidArgument("acceleration is undefined at zero detuning");
  if (s < 1) throw InvalidArgument("orbit period s must be >= 1");
  const double d = static_cast<double>(r) / (static_cast<double>(p.q) * static_cast<double>(s)) - p.Omega;
  return {kTwoPi / p.q * d, kTwoPi / p.epsilon * d};
}

struct PortraitPoint {
  std::size_t seed = 0;
  long iter = 0;
  double vartheta = 0.0;
  double J = 0.0;
};

inline std::vector<PortraitPoint> phase_portrait(const MapParams& mp,
                                                 const std::vector<TorusPoint>& seeds, long iters) {
  if (iters < 1) throw InvalidArgument("portrait needs at least one iteration");
  std::vector<PortraitPoint> out;
  out.reserve(seeds.size() * static_cast<std::size_t>(iters));
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    TorusPoint p{wrap_angle(seeds[i].vartheta), wrap_angle(seeds[i].J)};
    for (long n = 0; n < iters; ++n) {
      p = torus_map_step(p, mp);
      out.push_back({i, n + 1, p.vartheta, p.J});
    }
  }
  return out;
}

/// Uniform seed lattice on the torus (cell centres).
inline std::vector<TorusPoint> seed_grid(int nx, int ny) {
  std::vector<TorusPoint> s;
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b)
      s.push_back({-kPi + kTwoPi * (a + 0.5) / nx, -kPi + kTwoPi * (b + 0.5) / ny});
  return s;
}

/// Torus distance between two points.
inline double torus_distance(TorusPoint a, TorusPoint b) {
  return std::hypot(wrap_angle(a.vartheta - b.vartheta), wrap_angle(a.J - b.J));
}

}  // namespace qam::pseudo

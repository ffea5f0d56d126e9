#pragma once

// Bands of the resonant spin propagator over the zone vartheta in [-pi, pi):
// eigenphases as continuous branches, smooth periodic eigenvectors in the
// constant-vector-potential gauge, and the geometric potentials.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "qam/fourier.hpp"
#include "qam/spin_propagator.hpp"
#include "qam/spinor.hpp"

namespace qam::spinor {

struct BandOptions {
  std::size_t M = 0;        ///< grid size; 0 selects 1024 for q <= 8, else 4096
  double match_tol = 0.1;   ///< overlap gap below which a match is ambiguous
  int max_refine = 6;       ///< dyadic refinements of an ambiguous interval
};

inline std::size_t default_band_grid(int q) { return q <= 8 ? 1024 : 4096; }

/// Potentials of one band derived from its eigenvectors.
struct GeometricPotentials {
  double gamma = 0.0;     ///< Berry phase / 2 pi, in [0, 1)
  double varsigma = 0.0;  ///< mean spin / q
  double alpha = 0.0;     ///< constant vector potential, reduced into (-1, 0]
  std::vector<double> A;  ///< vector potential on the grid, before gauge fixing
  std::vector<double> B;  ///< scalar potential
  std::vector<double> S, S1_im, S2;
  std::vector<double> connection;  ///< i <phi|phi'>
  double max_imag = 0.0;           ///< largest discarded imaginary residue
};

struct Band {
  std::vector<double> omega;  ///< continuous branch; omega(pi) = omega(-pi) + 2 pi winding
  long winding = 0;
  Eigen::MatrixXcd vectors;   ///< q x M, column i at vartheta_i, smooth periodic gauge
  GeometricPotentials pot;
  bool avoided_crossing = false;
  std::vector<std::size_t> flagged;  ///< intervals [i, i+1] left ambiguous
};

struct BandData {
  double k = 0.0;
  int p = 1, q = 1;
  double beta0 = 0.0;
  std::size_t M = 0;
  std::vector<double> vartheta;
  std::vector<Band> bands;
  bool seam_permutation = false;  ///< labels do not close up across vartheta = pi
  double max_jump = 0.0;          ///< largest |omega(i+1) - omega(i)| over bands
};

namespace detail {

struct Eig {
  std::vector<double> omega;       ///< in [0, 2 pi)
  Eigen::MatrixXcd vectors;        ///< columns
};

inline Eig eig_at(double vartheta, double k, int p, int q, double beta0) {
  const Eigen::MatrixXcd A = spin_propagator(vartheta, k, p, q, beta0);
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(A);
  if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
  Eig e;
  e.vectors = schur.matrixU();
  e.omega.resize(static_cast<std::size_t>(q));
  for (int a = 0; a < q; ++a) {
    double w = -std::arg(schur.matrixT()(a, a));
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w -= kTwoPi;
    e.omega[static_cast<std::size_t>(a)] = w;
  }
  return e;
}

/// Permutation perm[a] = column of `to` continuing column a of `from`,
/// greedy on the largest overlaps. `ambiguous` is set when some band's best
/// two overlaps are closer than tol.
inline std::vector<int> match(const Eigen::MatrixXcd& from, const Eigen::MatrixXcd& to, double tol,
                              bool& ambiguous) {
  const int q = static_cast<int>(from.cols());
  const Eigen::MatrixXd O = (from.adjoint() * to).cwiseAbs();
  ambiguous = false;
  if (q > 1) {
    for (int a = 0; a < q; ++a) {
      double b1 = -1.0, b2 = -1.0;
      for (int b = 0; b < q; ++b) {
        const double o = O(a, b);
        if (o > b1) {
          b2 = b1;
          b1 = o;
        } else if (o > b2) {
          b2 = o;
        }
      }
      if (b1 - b2 < tol) ambiguous = true;
    }
  }
  std::vector<int> perm(static_cast<std::size_t>(q), -1);
  std::vector<bool> row_used(static_cast<std::size_t>(q)), col_used(static_cast<std::size_t>(q));
  for (int step = 0; step < q; ++step) {
    double best = -1.0;
    int ba = 0, bb = 0;
    for (int a = 0; a < q; ++a) {
      if (row_used[static_cast<std::size_t>(a)]) continue;
      for (int b = 0; b < q; ++b) {
        if (col_used[static_cast<std::size_t>(b)]) continue;
        if (O(a, b) > best) {
          best = O(a, b);
          ba = a;
          bb = b;
        }
      }
    }
    perm[static_cast<std::size_t>(ba)] = bb;
    row_used[static_cast<std::size_t>(ba)] = col_used[static_cast<std::size_t>(bb)] = true;
  }
  return perm;
}

/// Match across [x0, x1], bisecting while ambiguous. Returns the composed
/// permutation; `unresolved` is set if the finest level is still ambiguous.
inline std::vector<int> match_refined(const Eig& e0, double x0, const Eig& e1, double x1,
                                      double k, int p, int q, double beta0, double tol, int depth,
                                      bool& unresolved) {
  bool amb = false;
  std::vector<int> perm = match(e0.vectors, e1.vectors, tol, amb);
  if (!amb) return perm;
  if (depth <= 0) {
    unresolved = true;
    return perm;
  }
  const double xm = 0.5 * (x0 + x1);
  const Eig em = eig_at(xm, k, p, q, beta0);
  const auto left = match_refined(e0, x0, em, xm, k, p, q, beta0, tol, depth - 1, unresolved);
  const auto right = match_refined(em, xm, e1, x1, k, p, q, beta0, tol, depth - 1, unresolved);
  for (std::size_t a = 0; a < perm.size(); ++a)
    perm[a] = right[static_cast<std::size_t>(left[a])];
  return perm;
}

}  // namespace detail

/// Potentials of a band from eigenvectors sampled on the uniform zone grid
/// (columns), in any smooth periodic gauge.
inline GeometricPotentials geometric_potentials(const Eigen::MatrixXcd& vecs) {
  const int q = static_cast<int>(vecs.rows());
  const std::size_t M = static_cast<std::size_t>(vecs.cols());
  fourier::Dft dft;
  Eigen::MatrixXcd dv(q, static_cast<Eigen::Index>(M));
  std::vector<cplx> row(M);
  for (int l = 0; l < q; ++l) {
    for (std::size_t i = 0; i < M; ++i) row[i] = vecs(l, static_cast<Eigen::Index>(i));
    const auto d = fourier::derivative(std::span<const cplx>(row), dft);
    for (std::size_t i = 0; i < M; ++i) dv(l, static_cast<Eigen::Index>(i)) = d[i];
  }

  GeometricPotentials g;
  g.A.resize(M);
  g.B.resize(M);
  g.S.resize(M);
  g.S1_im.resize(M);
  g.S2.resize(M);
  g.connection.resize(M);
  double imag = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const cplx conn = cplx(0.0, 1.0) * vecs.col(ii).dot(dv.col(ii));  // dot conjugates the left
    double S = 0.0, S2 = 0.0, dd = 0.0;
    cplx S1 = 0.0;
    for (int l = 0; l < q; ++l) {
      const double w = std::norm(vecs(l, ii));
      S += l * w;
      S2 += static_cast<double>(l) * l * w;
      S1 += static_cast<double>(l) * std::conj(vecs(l, ii)) * dv(l, ii);
      dd += std::norm(dv(l, ii));
    }
    imag = std::max(imag, std::abs(conn.imag()));
    g.connection[i] = conn.real();
    g.S[i] = S;
    g.S2[i] = S2;
    g.S1_im[i] = S1.imag();
    g.A[i] = conn.real() - S / q;
    g.B[i] = S2 + 2.0 * q * S1.imag() - static_cast<double>(q) * q * g.A[i] * g.A[i] +
             static_cast<double>(q) * q * dd;
  }
  g.max_imag = imag;
  if (imag > 1e-6)
    throw GaugeFixingError("vector potential has imaginary residue " + std::to_string(imag));

  const double mean_conn = fourier::periodic_mean(std::span<const double>(g.connection));
  const double mean_S = fourier::periodic_mean(std::span<const double>(g.S));
  g.gamma = frac(-mean_conn);
  g.varsigma = mean_S / q;
  const double a = fourier::periodic_mean(std::span<const double>(g.A));
  g.alpha = a - std::ceil(a - 1e-6);
  return g;
}

namespace detail {

/// Discrete parallel transport along the grid, then a uniform phase ramp that
/// spreads the holonomy so the gauge closes periodically.
inline void smooth_gauge(Eigen::MatrixXcd& v) {
  const Eigen::Index M = v.cols();
  for (Eigen::Index i = 1; i < M; ++i) {
    const cplx o = v.col(i - 1).dot(v.col(i));
    if (std::abs(o) > 0.0) v.col(i) *= std::conj(o) / std::abs(o);
  }
  const double hol = std::arg(v.col(M - 1).dot(v.col(0)));
  for (Eigen::Index i = 0; i < M; ++i)
    v.col(i) *= std::polar(1.0, hol * static_cast<double>(i) / static_cast<double>(M));
}

/// Re-phase to the gauge where the vector potential equals its (reduced)
/// mean alpha everywhere.
inline void coulomb_gauge(Eigen::MatrixXcd& v, const GeometricPotentials& g) {
  const std::size_t M = static_cast<std::size_t>(v.cols());
  const double mean = fourier::periodic_mean(std::span<const double>(g.A));
  const long shift = std::lround(mean - g.alpha);
  std::vector<double> dev(M);
  for (std::size_t i = 0; i < M; ++i) dev[i] = g.A[i] - mean;
  fourier::Dft dft;
  const auto lam = fourier::antiderivative(std::span<const double>(dev), dft);
  for (std::size_t i = 0; i < M; ++i) {
    const double x = grid_point(i, M) + kPi;
    v.col(static_cast<Eigen::Index>(i)) *= std::polar(1.0, lam[i] + static_cast<double>(shift) * x);
  }
}

}  // namespace detail

inline BandData band_structure(double k, int p, int q, double beta0, BandOptions opt = {}) {
  if (q < 1 || q > kMaxQ) throw InvalidArgument("band structure needs 1 <= q <= 64");
  if (opt.M == 0) opt.M = default_band_grid(q);
  if (opt.M < 16) throw InvalidArgument("band grid too small");
  const std::size_t M = opt.M;

  BandData bd;
  bd.k = k;
  bd.p = p;
  bd.q = q;
  bd.beta0 = beta0;
  bd.M = M;
  bd.vartheta = vartheta_grid(M);
  bd.bands.resize(static_cast<std::size_t>(q));
  for (auto& b : bd.bands) {
    b.omega.resize(M);
    b.vectors.resize(q, static_cast<Eigen::Index>(M));
  }

  // labels: ascending eigenphase at vartheta = -pi
  detail::Eig prev = detail::eig_at(bd.vartheta[0], k, p, q, beta0);
  std::vector<int> col(static_cast<std::size_t>(q));
  std::iota(col.begin(), col.end(), 0);
  std::stable_sort(col.begin(), col.end(), [&](int a, int b) {
    return prev.omega[static_cast<std::size_t>(a)] < prev.omega[static_cast<std::size_t>(b)];
  });
  for (int j = 0; j < q; ++j) {
    auto& band = bd.bands[static_cast<std::size_t>(j)];
    band.omega[0] = prev.omega[static_cast<std::size_t>(col[static_cast<std::size_t>(j)])];
    band.vectors.col(0) = prev.vectors.col(col[static_cast<std::size_t>(j)]);
  }
  const detail::Eig first = prev;
  const std::vector<int> first_col = col;

  auto advance = [&](const detail::Eig& cur, double x0, double x1, std::size_t interval,
                     std::size_t dest, bool record) {
    bool unresolved = false;
    const auto perm = detail::match_refined(prev, x0, cur, x1, k, p, q, beta0, opt.match_tol,
                                            opt.max_refine, unresolved);
    std::vector<int> next(static_cast<std::size_t>(q));
    for (int j = 0; j < q; ++j)
      next[static_cast<std::size_t>(j)] = perm[static_cast<std::size_t>(col[static_cast<std::size_t>(j)])];
    if (unresolved) {
      for (auto& band : bd.bands) {
        band.avoided_crossing = true;
        band.flagged.push_back(interval);
      }
    }
    if (record) {
      for (int j = 0; j < q; ++j) {
        auto& band = bd.bands[static_cast<std::size_t>(j)];
        const double w = cur.omega[static_cast<std::size_t>(next[static_cast<std::size_t>(j)])];
        const double last = band.omega[dest - 1];
        band.omega[dest] = last + wrap_angle(w - last);
        bd.max_jump = std::max(bd.max_jump, std::abs(band.omega[dest] - last));
        band.vectors.col(static_cast<Eigen::Index>(dest)) =
            cur.vectors.col(next[static_cast<std::size_t>(j)]);
      }
    }
    return next;
  };

  for (std::size_t i = 1; i < M; ++i) {
    detail::Eig cur = detail::eig_at(bd.vartheta[i], k, p, q, beta0);
    col = advance(cur, bd.vartheta[i - 1], bd.vartheta[i], i - 1, i, true);
    prev = std::move(cur);
  }

  // close the loop at vartheta = pi, where the propagator equals that at -pi
  const auto closing = advance(first, bd.vartheta[M - 1], kPi, M - 1, 0, false);
  for (int j = 0; j < q; ++j) {
    if (closing[static_cast<std::size_t>(j)] != first_col[static_cast<std::size_t>(j)]) {
      bd.seam_permutation = true;
      continue;
    }
    auto& band = bd.bands[static_cast<std::size_t>(j)];
    const double last = band.omega[M - 1];
    const double end = last + wrap_angle(band.omega[0] - last);
    bd.max_jump = std::max(bd.max_jump, std::abs(end - last));
    band.winding = std::lround((end - band.omega[0]) / kTwoPi);
  }

  if (!bd.seam_permutation) {
    for (auto& band : bd.bands) {
      detail::smooth_gauge(band.vectors);
      const auto g = geometric_potentials(band.vectors);
      detail::coulomb_gauge(band.vectors, g);
      band.pot = geometric_potentials(band.vectors);
    }
  }
  return bd;
}

inline BandData band_structure(const SystemParams& s, BandOptions opt = {}) {
  return band_structure(s.k, s.p, s.q, s.beta0, opt);
}

inline void require_closed(const BandData& bd) {
  if (bd.seam_permutation)
    throw NumericalError("band labels permute across the zone boundary; no periodic gauge");
}

inline const GeometricPotentials& geometric_potentials(const BandData& bd, int j) {
  require_closed(bd);
  return bd.bands.at(static_cast<std::size_t>(j)).pot;
}

/// d omega_j / d vartheta on the band grid (spectral).
inline std::vector<double> omega_derivative(const BandData& bd, int j) {
  const auto& b = bd.bands.at(static_cast<std::size_t>(j));
  if (bd.seam_permutation) throw NumericalError("band branch is not periodic");
  const fourier::TrigSeries t(b.omega, -kPi, static_cast<double>(b.winding));
  std::vector<double> d(bd.M);
  for (std::size_t i = 0; i < bd.M; ++i) d[i] = t.derivative(bd.vartheta[i]);
  return d;
}

/// Kick-impulse interpolant of band j (trigonometric; exact on the grid).
inline fourier::TrigSeries omega_series(const BandData& bd, int j) {
  const auto& b = bd.bands.at(static_cast<std::size_t>(j));
  if (bd.seam_permutation) throw NumericalError("band branch is not periodic");
  return fourier::TrigSeries(b.omega, -kPi, static_cast<double>(b.winding));
}

inline double band_width(const BandData& bd, int j) {
  const auto& w = bd.bands.at(static_cast<std::size_t>(j)).omega;
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  return *hi - *lo;
}

/// Band index with the largest width.
inline int widest_band(const BandData& bd) {
  int best = 0;
  for (int j = 1; j < bd.q; ++j)
    if (band_width(bd, j) > band_width(bd, best)) best = j;
  return best;
}

/// Probability carried by each band: sum_i |<phi_j|Phi>|^2 dvartheta / norm.
inline std::vector<double> band_populations(const SpinorField& f, const BandData& bd) {
  if (f.M != bd.M || f.q != bd.q) throw InvalidArgument("spinor field and bands use different grids");
  const double n = f.norm_squared();
  if (n == 0.0) throw InvalidArgument("zero spinor field");
  std::vector<double> P(static_cast<std::size_t>(bd.q), 0.0);
  for (int j = 0; j < bd.q; ++j) {
    const auto& v = bd.bands[static_cast<std::size_t>(j)].vectors;
    double s = 0.0;
    for (std::size_t i = 0; i < f.M; ++i) {
      cplx o = 0.0;
      for (int l = 0; l < f.q; ++l)
        o += std::conj(v(l, static_cast<Eigen::Index>(i))) * f.comps[static_cast<std::size_t>(l)][i];
      s += std::norm(o);
    }
    P[static_cast<std::size_t>(j)] = s * f.dvartheta() / n;
  }
  return P;
}

/// Field carrying an arbitrary scalar amplitude psi(vartheta) on band j.
inline SpinorField band_field(const BandData& bd, int j, const std::vector<cplx>& psi, long m_min,
                              double beta) {
  require_closed(bd);
  if (psi.size() != bd.M) throw InvalidArgument("amplitude grid does not match the bands");
  SpinorField f;
  f.q = bd.q;
  f.M = bd.M;
  f.m_min = m_min;
  f.beta = beta;
  f.comps.assign(static_cast<std::size_t>(bd.q), std::vector<cplx>(bd.M));
  const auto& v = bd.bands.at(static_cast<std::size_t>(j)).vectors;
  for (int l = 0; l < bd.q; ++l)
    for (std::size_t i = 0; i < bd.M; ++i)
      f.comps[static_cast<std::size_t>(l)][i] = psi[i] * v(l, static_cast<Eigen::Index>(i));
  return f;
}

/// Minimum-uncertainty packet on band j centred at vartheta0 with mean total
/// momentum N0. In the constant-potential gauge N = q (m - alpha_j), so the
/// orbital centre is m0 = N0 / q + alpha_j.
inline qkp::RotorState band_coherent_state(const BandData& bd, int j, double vartheta0, double N0,
                                           double sigma, double beta,
                                           std::size_t ladder_size = 1024) {
  require_closed(bd);
  const double m0 = N0 / bd.q + bd.bands.at(static_cast<std::size_t>(j)).pot.alpha;
  const auto g = gaussian_packet(bd.M, vartheta0, m0, sigma);
  const long m_min = std::lround(m0) - static_cast<long>(bd.M / 2);
  SpinorField f = band_field(bd, j, g, m_min, beta);
  const long center = std::lround(N0);
  auto s = recompose(f, qkp::Ladder::centered(center, ladder_size));
  s.normalize();
  return s;
}

}  // namespace qam::spinor

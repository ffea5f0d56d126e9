#pragma once

// Composite drivers shared by the command-line tool and the acceptance suite:
// packets launched on pseudoclassical orbits, quasi-momentum scans and
// period scans of Gaussian ensembles.

#include <algorithm>
#include <cmath>
#include <vector>

#include "qam/bands.hpp"
#include "qam/ensemble.hpp"
#include "qam/husimi.hpp"
#include "qam/parallel.hpp"
#include "qam/pseudoclassical.hpp"
#include "qam/spectroscopy.hpp"

namespace qam::experiments {

/// Stable (r, s) orbit of band j; throws if the search finds nothing.
inline pseudo::PeriodicOrbit launch_orbit(const SystemParams& s, const spinor::BandData& bd, int band,
                                          long r, long period) {
  const auto mp = pseudo::make_map_params(s, bd, band);
  auto o = pseudo::find_periodic_orbit(r, period, mp);
  if (!o) throw NumericalError("no (" + std::to_string(r) + "," + std::to_string(period) + ") orbit found");
  return *o;
}

/// Minimum-uncertainty packet on band j at the first point of an orbit, with
/// mean momentum N0.
inline qkp::RotorState orbit_packet(const SystemParams& s, const spinor::BandData& bd, int band,
                                    const pseudo::PeriodicOrbit& o, double N0 = 0.0,
                                    std::size_t ladder_size = 1024) {
  return spinor::band_coherent_state(bd, band, o.points.front().vartheta, N0, qkp::coherent_sigma(s),
                                     s.beta, ladder_size);
}

struct BetaScanOptions {
  int band = 0;
  long r = 1, s = 1;
  long kicks = 100;
  double box_width = 6.0;
  double N0 = 0.0;
  std::size_t ladder_size = 1024;
  unsigned threads = 1;
};

struct BetaScanResult {
  std::vector<double> beta;
  std::vector<double> probability;
  double acceleration = 0.0;
  double box_center = 0.0;
  pseudo::PeriodicOrbit orbit;
};

/// Probability in a box moving with the (r, s) mode after `kicks` kicks, for a
/// packet launched on the band-j orbit at each quasi-momentum. The packet's
/// position is fixed; only beta changes from point to point.
inline BetaScanResult beta_scan(const SystemParams& base, const std::vector<double>& betas,
                                const BetaScanOptions& opt) {
  if (betas.empty()) throw InvalidArgument("empty beta grid");
  if (opt.kicks < 0) throw InvalidArgument("kicks must be >= 0");
  const auto bd = spinor::band_structure(base);
  BetaScanResult out;
  out.beta = betas;
  out.orbit = launch_orbit(base, bd, opt.band, opt.r, opt.s);
  out.acceleration = pseudo::orbit_acceleration(opt.r, opt.s, base).a;
  out.box_center = opt.N0 + out.acceleration * static_cast<double>(opt.kicks);
  out.probability.assign(betas.size(), 0.0);
  parallel_for(betas.size(), opt.threads, [&](std::size_t i) {
    const auto sp = with_beta(base, betas[i]);
    auto psi = orbit_packet(sp, bd, opt.band, out.orbit, opt.N0, opt.ladder_size);
    psi = qkp::evolve(std::move(psi), opt.kicks, sp);
    out.probability[i] = qkp::box_probability(psi, out.box_center, opt.box_width);
  });
  return out;
}

/// i/count for i = 0 .. count-1.
inline std::vector<double> uniform_betas(std::size_t count) {
  if (count < 1) throw InvalidArgument("beta grid needs at least one point");
  std::vector<double> b(count);
  for (std::size_t i = 0; i < count; ++i) b[i] = static_cast<double>(i) / static_cast<double>(count);
  return b;
}

/// Indices of strict local maxima of a periodic sequence, largest first.
inline std::vector<std::size_t> periodic_local_maxima(const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<std::size_t> idx;
  if (n < 3) return idx;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = y[(i + n - 1) % n], r = y[(i + 1) % n];
    if (y[i] > l && y[i] >= r) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return y[a] > y[b]; });
  return idx;
}

struct PredictedBeta {
  int nu;
  long n;
  double beta;
};

/// Selection values for a packet at N0 on torus momentum J0, over every nu
/// and the given windings n. beta0 changes with nu, but the band-j labels and
/// the alpha_j entering the formula are taken from each nu's own bands.
inline std::vector<PredictedBeta> predicted_betas(const SystemParams& s, int band, double N0, double J0,
                                                  const std::vector<long>& windings) {
  std::vector<PredictedBeta> out;
  for (int nu = 0; nu < s.p; ++nu) {
    const auto sn = build_params(s.k, s.tau_over_2pi(), s.g, s.p, s.q, nu, s.beta);
    const auto bd = spinor::band_structure(sn);
    const double alpha = spinor::geometric_potentials(bd, band).alpha;
    for (long n : windings)
      out.push_back({nu, n, spectro::special_beta(N0, band, nu, n, J0, sn, alpha)});
  }
  return out;
}

/// Distance on the unit circle of quasi-momenta.
inline double beta_distance(double a, double b) {
  const double d = std::abs(frac(a) - frac(b));
  return std::min(d, 1.0 - d);
}

struct EnsembleSpec {
  double fwhm = 9.0;
  std::size_t count = 100;
  std::uint64_t seed = 1;
  qkp::BetaPolicy policy = qkp::BetaPolicy::fractional;
  double mean = 0.0;
  double fixed_beta = 0.0;
  std::size_t ladder_size = 1024;
};

struct TauScanResult {
  std::vector<double> tau_over_2pi;
  qkp::Grid2D density;  ///< rows: momentum bins, cols: tau points
};

/// Momentum histograms after `kicks` kicks over a period grid, on a common
/// momentum window. Members are evolved in parallel; the ensemble is drawn
/// once and reused at every period.
inline TauScanResult scan_tau(const SystemParams& base, const std::vector<double>& taus,
                              const EnsembleSpec& es, long kicks, double bin_width,
                              qkp::MomentumRange range, qkp::Gauge gauge, unsigned threads) {
  if (taus.empty()) throw InvalidArgument("empty tau grid");
  if (kicks < 0) throw InvalidArgument("kicks must be >= 0");
  const auto ens = qkp::sample_gaussian_ensemble(es.fwhm, es.count, es.seed, es.policy, es.mean,
                                                 es.fixed_beta, es.ladder_size);
  const std::size_t nt = taus.size(), nm = ens.size();
  std::vector<qkp::RotorState> finals(nt * nm);
  std::vector<SystemParams> params;
  params.reserve(nt);
  for (double x : taus) params.push_back(with_tau_over_2pi(base, x));
  parallel_for(nt * nm, threads, [&](std::size_t w) {
    const std::size_t it = w / nm, im = w % nm;
    finals[w] = qkp::evolve(ens.members[im], kicks, params[it]);
  });

  TauScanResult out;
  out.tau_over_2pi = taus;
  for (std::size_t it = 0; it < nt; ++it) {
    qkp::Ensemble e;
    e.members.assign(finals.begin() + static_cast<std::ptrdiff_t>(it * nm),
                     finals.begin() + static_cast<std::ptrdiff_t>((it + 1) * nm));
    e.weights = ens.weights;
    const auto h = qkp::momentum_distribution(e, params[it], bin_width, gauge, range);
    if (it == 0) {
      out.density.rows = h.bins();
      out.density.cols = nt;
      out.density.y0 = h.origin;
      out.density.dy = h.width;
      out.density.x0 = taus.front();
      out.density.dx = nt > 1 ? (taus.back() - taus.front()) / static_cast<double>(nt - 1) : 0.0;
      out.density.data.assign(out.density.rows * nt, 0.0);
    }
    if (h.bins() != out.density.rows) throw NumericalError("histogram windows differ across tau");
    for (std::size_t b = 0; b < h.bins(); ++b) out.density(b, it) = h.prob[b];
  }
  return out;
}

/// Momentum of the densest bin of column `col` within [lo, hi], after a
/// running sum over `smooth` bins.
inline double ridge_momentum(const qkp::Grid2D& g, std::size_t col, double lo, double hi,
                             std::size_t smooth = 1) {
  double best = -1.0, at = std::nan("");
  const std::size_t half = smooth / 2;
  for (std::size_t r = 0; r < g.rows; ++r) {
    const double y = g.y0 + (static_cast<double>(r) + 0.5) * g.dy;
    if (y < lo || y > hi) continue;
    double s = 0.0;
    for (std::size_t d = 0; d < smooth; ++d) {
      const long rr = static_cast<long>(r) - static_cast<long>(half) + static_cast<long>(d);
      if (rr >= 0 && rr < static_cast<long>(g.rows)) s += g(static_cast<std::size_t>(rr), col);
    }
    if (s > best) {
      best = s;
      at = y;
    }
  }
  return at;
}

}  // namespace qam::experiments

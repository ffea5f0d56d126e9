#pragma once

// Incoherent mixtures of beta-rotors and momentum statistics over them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "qam/random.hpp"
#include "qam/rotor.hpp"

namespace qam::qkp {

struct Ensemble {
  std::vector<RotorState> members;
  std::vector<double> weights;

  std::size_t size() const { return members.size(); }

  void validate() const {
    if (members.empty()) throw InvalidArgument("empty ensemble");
    if (members.size() != weights.size())
      throw InvalidArgument("ensemble weights do not match member count");
    double s = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw InvalidArgument("negative ensemble weight");
      s += w;
    }
    if (std::abs(s - 1.0) > 1e-12) throw InvalidArgument("ensemble weights must sum to 1");
  }
};

inline Ensemble single(RotorState s) {
  Ensemble e;
  e.members.push_back(std::move(s));
  e.weights.push_back(1.0);
  return e;
}

enum class BetaPolicy {
  fractional,  ///< beta = frac(draw), N = floor(draw)
  fixed        ///< beta given, N = nearest integer to draw - beta
};

inline constexpr double kFwhmToSigma = 0.42466090014400953;  // 1 / (2 sqrt(2 ln 2))

/// Equal-weight plane waves whose total momenta N + beta are Gaussian draws.
/// Member i uses RNG stream i, so the ensemble is independent of threading.
inline Ensemble sample_gaussian_ensemble(double fwhm, std::size_t count, std::uint64_t seed,
                                         BetaPolicy policy, double mean = 0.0,
                                         double fixed_beta = 0.0,
                                         std::size_t ladder_size = 1024) {
  if (!(fwhm >= 0.0) || !std::isfinite(fwhm)) throw InvalidArgument("fwhm must be >= 0");
  if (count < 1) throw InvalidArgument("ensemble count must be >= 1");
  if (policy == BetaPolicy::fixed && !(fixed_beta >= 0.0 && fixed_beta < 1.0))
    throw InvalidArgument("fixed beta must lie in [0, 1)");
  const double sigma = fwhm * kFwhmToSigma;
  const CounterRng rng(seed);
  Ensemble e;
  e.members.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = mean + sigma * rng.normal(i, 0);
    long n0;
    double beta;
    if (policy == BetaPolicy::fractional) {
      n0 = static_cast<long>(std::floor(x));
      beta = frac(x);
    } else {
      beta = fixed_beta;
      n0 = static_cast<long>(std::llround(x - beta));
    }
    e.members.push_back(plane_wave(n0, beta, Ladder::centered(n0, ladder_size)));
  }
  e.weights.assign(count, 1.0 / static_cast<double>(count));
  return e;
}

/// Binned momentum probability. Edges are uniform: edge(i) = origin + i * width.
struct MomentumHistogram {
  double origin = 0.0;
  double width = 0.25;
  std::vector<double> prob;
  Gauge gauge = Gauge::falling;
  long kick_count = 0;

  std::size_t bins() const { return prob.size(); }
  double edge(std::size_t i) const { return origin + static_cast<double>(i) * width; }
  double center(std::size_t i) const { return origin + (static_cast<double>(i) + 0.5) * width; }
  double total() const {
    double s = 0.0;
    for (double p : prob) s += p;
    return s;
  }
};

inline constexpr double kDefaultBinWidth = 0.25;

/// Momentum window [lo, hi) in the output gauge; snapped outward to the bin
/// lattice.
struct MomentumRange {
  double lo, hi;
};

/// Bins sit on multiples of `bin_width` in the falling frame; the lab gauge
/// moves every edge by eta * t, so the two histograms agree bin for bin.
inline MomentumHistogram momentum_distribution(const Ensemble& ens, const SystemParams& params,
                                               double bin_width = kDefaultBinWidth,
                                               Gauge gauge = Gauge::falling,
                                               std::optional<MomentumRange> range = {}) {
  ens.validate();
  if (!(bin_width > 0.0)) throw InvalidArgument("bin width must be positive");
  const long t = ens.members.front().kick_count;
  for (const auto& m : ens.members) {
    if (m.kick_count != t) throw InvalidArgument("ensemble members at different kick counts");
    if (m.gauge != Gauge::falling)
      throw InvalidArgument("ensemble members must be stored in the falling frame");
  }
  const double offset = gauge == Gauge::lab ? params.eta * static_cast<double>(t) : 0.0;

  long b_lo, b_hi;  // falling-frame bin indices, inclusive
  if (range) {
    if (!(range->hi > range->lo)) throw InvalidArgument("empty histogram range");
    b_lo = static_cast<long>(std::floor((range->lo - offset) / bin_width));
    b_hi = static_cast<long>(std::ceil((range->hi - offset) / bin_width)) - 1;
  } else {
    b_lo = std::numeric_limits<long>::max();
    b_hi = std::numeric_limits<long>::min();
    for (const auto& m : ens.members) {
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.amps[i] == cplx{0.0, 0.0}) continue;
        const double x = static_cast<double>(m.n_min + static_cast<long>(i)) + m.beta;
        const long b = static_cast<long>(std::floor(x / bin_width));
        b_lo = std::min(b_lo, b);
        b_hi = std::max(b_hi, b);
      }
    }
    if (b_lo > b_hi) b_lo = b_hi = 0;
  }

  MomentumHistogram h;
  h.width = bin_width;
  h.origin = static_cast<double>(b_lo) * bin_width + offset;
  h.gauge = gauge;
  h.kick_count = t;
  h.prob.assign(static_cast<std::size_t>(b_hi - b_lo + 1), 0.0);
  for (std::size_t k = 0; k < ens.size(); ++k) {
    const auto& m = ens.members[k];
    const double w = ens.weights[k];
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double pr = std::norm(m.amps[i]);
      if (pr == 0.0) continue;
      const double x = static_cast<double>(m.n_min + static_cast<long>(i)) + m.beta;
      const long b = static_cast<long>(std::floor(x / bin_width));
      if (b < b_lo || b > b_hi) continue;
      h.prob[static_cast<std::size_t>(b - b_lo)] += w * pr;
    }
  }
  return h;
}

/// Falling-frame histogram re-expressed in the other gauge (edges shifted).
inline MomentumHistogram gauge_shift(MomentumHistogram h, const SystemParams& params, Gauge to) {
  if (h.gauge == to) return h;
  const double shift = params.eta * static_cast<double>(h.kick_count);
  h.origin += to == Gauge::lab ? shift : -shift;
  h.gauge = to;
  return h;
}

/// Probability with total momentum in [center - L/2, center + L/2], measured
/// in the state's own frame.
inline double box_probability(const RotorState& s, double center, double L) {
  if (!(L > 0.0)) throw InvalidArgument("box length must be positive");
  const double lo = center - 0.5 * L, hi = center + 0.5 * L;
  double p = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = static_cast<double>(s.n_min + static_cast<long>(i)) + s.beta;
    if (x >= lo && x <= hi) p += std::norm(s.amps[i]);
  }
  return p;
}

inline double box_probability(const Ensemble& e, double center, double L) {
  e.validate();
  double p = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) p += e.weights[k] * box_probability(e.members[k], center, L);
  return p;
}

}  // namespace qam::qkp

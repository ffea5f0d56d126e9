#pragma once

// Exact one-kick evolution of a single beta-rotor in the falling frame:
//
//   U_beta(n) = exp(-i k cos(theta)) exp(-i tau/2 (N + beta + eta n + eta/2)^2)
//
// The free factor is diagonal on the integer momentum ladder; the kick is
// applied on a uniform angle grid of the same (power-of-two) size.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qam/fourier.hpp"
#include "qam/params.hpp"

namespace qam::qkp {

enum class Gauge { falling, lab };

inline const char* to_string(Gauge g) { return g == Gauge::falling ? "falling" : "lab"; }

/// Integer momentum window [n_min, n_min + size).
struct Ladder {
  long n_min = -512;
  std::size_t size = 1024;

  long n_max() const { return n_min + static_cast<long>(size) - 1; }

  static Ladder centered(long center, std::size_t size = 1024) {
    return {center - static_cast<long>(size / 2), size};
  }
};

inline constexpr double kDefaultTailThreshold = 1e-8;
inline constexpr double kTailFraction = 0.05;
inline constexpr std::size_t kMaxLadderSize = std::size_t{1} << 22;

/// Amplitudes of one beta-rotor on a truncated momentum ladder; amps[i]
/// belongs to the integer momentum n_min + i, total momentum n_min + i + beta.
struct RotorState {
  double beta = 0.0;
  long n_min = 0;
  std::vector<cplx> amps;
  long kick_count = 0;
  Gauge gauge = Gauge::falling;

  std::size_t size() const { return amps.size(); }
  long n_max() const { return n_min + static_cast<long>(amps.size()) - 1; }
  Ladder ladder() const { return {n_min, amps.size()}; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return s;
  }

  /// Probability on the outer `fraction` of the ladder at each end.
  double tail_mass(double fraction = kTailFraction) const {
    const std::size_t w = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(amps.size()))));
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(w, amps.size()); ++i) {
      s += std::norm(amps[i]);
      s += std::norm(amps[amps.size() - 1 - i]);
    }
    return s;
  }

  /// <N + beta>, normalized by the current norm.
  double mean_momentum() const {
    double s = 0.0, w = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
      const double pr = std::norm(amps[i]);
      s += pr * (static_cast<double>(n_min + static_cast<long>(i)) + beta);
      w += pr;
    }
    return w > 0.0 ? s / w : 0.0;
  }

  void normalize() {
    const double n = std::sqrt(norm_squared());
    if (n == 0.0) throw InvalidArgument("cannot normalize a zero state");
    for (auto& a : amps) a /= n;
  }
};

inline void check_ladder(const Ladder& l) {
  if (l.size < 2 || !std::has_single_bit(l.size))
    throw InvalidArgument("ladder size must be a power of two >= 2 (got " +
                          std::to_string(l.size) + ")");
}

/// Momentum eigenstate |n0> with quasi-momentum beta.
inline RotorState plane_wave(long n0, double beta, Ladder ladder) {
  check_ladder(ladder);
  if (n0 < ladder.n_min || n0 > ladder.n_max())
    throw InvalidArgument("plane wave momentum outside the ladder");
  RotorState s;
  s.beta = beta;
  s.n_min = ladder.n_min;
  s.amps.assign(ladder.size, cplx{0.0, 0.0});
  s.amps[static_cast<std::size_t>(n0 - ladder.n_min)] = 1.0;
  return s;
}

inline RotorState plane_wave(long n0, double beta) {
  return plane_wave(n0, beta, Ladder::centered(n0));
}

/// Double the ladder, re-centred on the mean momentum; no amplitude is lost
/// because the mean lies inside the old window.
inline RotorState enlarge_ladder(const RotorState& s) {
  const std::size_t L = s.size();
  if (2 * L > kMaxLadderSize) throw NumericalError("momentum ladder exceeds the size limit");
  const long center = static_cast<long>(std::llround(s.mean_momentum() - s.beta));
  RotorState out = s;
  out.n_min = center - static_cast<long>(L);
  out.amps.assign(2 * L, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < L; ++i) {
    const long n = s.n_min + static_cast<long>(i);
    out.amps[static_cast<std::size_t>(n - out.n_min)] = s.amps[i];
  }
  return out;
}

/// Reusable one-kick propagator. Holds the FFT plan and the sampled kick
/// factor for the current ladder size; one instance per thread.
class FloquetPropagator {
 public:
  explicit FloquetPropagator(const SystemParams& params,
                             double tail_threshold = kDefaultTailThreshold)
      : params_(params), tail_threshold_(tail_threshold) {}

  const SystemParams& params() const { return params_; }
  double tail_threshold() const { return tail_threshold_; }

  /// Advance by one kick. On tail-mass violation `state` is left untouched and
  /// UnderResolvedError is thrown.
  void step(RotorState& state) {
    if (state.gauge != Gauge::falling)
      throw InvalidArgument("Floquet evolution runs in the falling frame");
    check_ladder(state.ladder());
    prepare(state.size());

    const std::size_t L = state.size();
    const double shift =
        state.beta + params_.eta * static_cast<double>(state.kick_count) + 0.5 * params_.eta;
    for (std::size_t i = 0; i < L; ++i) {
      const double x = static_cast<double>(state.n_min + static_cast<long>(i)) + shift;
      work_[i] = state.amps[i] * std::polar(1.0, -0.5 * params_.tau * x * x);
    }
    // psi(theta_j) = sum_n a_n e^{i n theta_j}; the e^{i n_min theta} factor
    // commutes with the diagonal kick and cancels.
    dft_.inverse(grid_, work_);
    for (std::size_t i = 0; i < L; ++i) grid_[i] *= kick_[i];
    dft_.forward(work_, grid_);
    const double scale = 1.0 / static_cast<double>(L);
    for (auto& a : work_) a *= scale;

    double tail = 0.0;
    const std::size_t w = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(kTailFraction * static_cast<double>(L))));
    for (std::size_t i = 0; i < w; ++i) tail += std::norm(work_[i]) + std::norm(work_[L - 1 - i]);
    if (tail > tail_threshold_)
      throw UnderResolvedError("tail mass " + std::to_string(tail) + " exceeds threshold", tail);

    std::swap(state.amps, work_);
    ++state.kick_count;
  }

 private:
  void prepare(std::size_t L) {
    if (L == size_) return;
    size_ = L;
    kick_.resize(L);
    grid_.resize(L);
    work_.resize(L);
    for (std::size_t j = 0; j < L; ++j) {
      const double theta = kTwoPi * static_cast<double>(j) / static_cast<double>(L);
      kick_[j] = std::polar(1.0, -params_.k * std::cos(theta));
    }
  }

  SystemParams params_;
  double tail_threshold_;
  fourier::Dft dft_;
  std::size_t size_ = 0;
  std::vector<cplx> kick_, grid_, work_;
};

inline RotorState floquet_step(RotorState state, const SystemParams& params) {
  FloquetPropagator prop(params);
  prop.step(state);
  return state;
}

/// Snapshot schedule plus sink. With no sink, snapshots are stored.
class Recorder {
 public:
  Recorder() = default;
  explicit Recorder(std::vector<long> kicks, std::function<void(const RotorState&)> sink = {})
      : schedule_(std::move(kicks)), sink_(std::move(sink)) {
    std::sort(schedule_.begin(), schedule_.end());
    schedule_.erase(std::unique(schedule_.begin(), schedule_.end()), schedule_.end());
  }

  bool wants(long kick) const {
    return std::binary_search(schedule_.begin(), schedule_.end(), kick);
  }

  void record(const RotorState& s) {
    if (sink_)
      sink_(s);
    else
      snapshots_.push_back(s);
  }

  const std::vector<long>& schedule() const { return schedule_; }
  const std::vector<RotorState>& snapshots() const { return snapshots_; }

 private:
  std::vector<long> schedule_;
  std::function<void(const RotorState&)> sink_;
  std::vector<RotorState> snapshots_;
};

/// Advance `n_kicks` kicks. Snapshots are taken whenever the state's
/// kick_count (including the starting one) is on the recorder's schedule.
/// Tail-mass violations enlarge the ladder and retry the step.
inline RotorState evolve(RotorState state, long n_kicks, FloquetPropagator& prop,
                         Recorder* recorder = nullptr) {
  if (n_kicks < 0) throw InvalidArgument("n_kicks must be >= 0");
  if (recorder && recorder->wants(state.kick_count)) recorder->record(state);
  for (long i = 0; i < n_kicks; ++i) {
    for (;;) {
      try {
        prop.step(state);
        break;
      } catch (const UnderResolvedError&) {
        state = enlarge_ladder(state);
      }
    }
    if (recorder && recorder->wants(state.kick_count)) recorder->record(state);
  }
  return state;
}

inline RotorState evolve(RotorState state, long n_kicks, const SystemParams& params,
                         Recorder* recorder = nullptr) {
  FloquetPropagator prop(params);
  return evolve(std::move(state), n_kicks, prop, recorder);
}

/// Momentum frame change: lab momentum = falling-frame momentum + eta * t.
/// The integer/fractional split is re-derived so the ladder stays integer.
inline RotorState gauge_shift(RotorState s, const SystemParams& params, Gauge to) {
  if (s.gauge == to) return s;
  const double shift = params.eta * static_cast<double>(s.kick_count);
  const double total = s.beta + (to == Gauge::lab ? shift : -shift);
  const double whole = std::floor(total);
  s.beta = frac(total);
  if (s.beta == 0.0 && total - whole >= 1.0) {
    s.n_min += static_cast<long>(whole) + 1;
  } else {
    s.n_min += static_cast<long>(whole);
  }
  s.gauge = to;
  return s;
}

}  // namespace qam::qkp

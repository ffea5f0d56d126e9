#pragma once

// Arithmetic of mode winding numbers: Omega*, continued fractions anchored at
// the nearest integer, convergents, Farey mediants, quasi-momentum selection
// and the mode curves a(tau) * t.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "qam/params.hpp"

namespace qam::spectro {

/// r / s with s >= 1; never reduced implicitly.
class Fraction {
 public:
  Fraction(std::int64_t r = 0, std::int64_t s = 1) : r_(r), s_(s) {
    if (s_ < 1) throw InvalidArgument("fraction denominator must be >= 1");
  }

  std::int64_t num() const { return r_; }
  std::int64_t den() const { return s_; }
  bool reduced() const { return std::gcd(r_, s_) == 1; }
  Fraction reduce() const {
    const std::int64_t g = std::gcd(r_, s_);
    return g > 1 ? Fraction(r_ / g, s_ / g) : *this;
  }
  double value() const { return static_cast<double>(r_) / static_cast<double>(s_); }
  std::string str() const { return std::to_string(r_) + "/" + std::to_string(s_); }

  /// Exact rational comparison.
  friend int compare(const Fraction& a, const Fraction& b) {
    const __int128 l = static_cast<__int128>(a.r_) * b.s_;
    const __int128 r = static_cast<__int128>(b.r_) * a.s_;
    return l < r ? -1 : (l > r ? 1 : 0);
  }
  friend bool operator<(const Fraction& a, const Fraction& b) { return compare(a, b) < 0; }
  friend bool same_value(const Fraction& a, const Fraction& b) { return compare(a, b) == 0; }
  /// Identical representation (numerator and denominator).
  friend bool operator==(const Fraction& a, const Fraction& b) = default;
  friend std::ostream& operator<<(std::ostream& os, const Fraction& f) { return os << f.str(); }

 private:
  std::int64_t r_, s_;
};

namespace detail {
inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t c;
  if (__builtin_add_overflow(a, b, &c)) throw NumericalError("integer overflow in fraction arithmetic");
  return c;
}
inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t c;
  if (__builtin_mul_overflow(a, b, &c)) throw NumericalError("integer overflow in fraction arithmetic");
  return c;
}
}  // namespace detail

/// (r1 + r2) / (s1 + s2), not reduced; lies strictly between unequal a and b.
inline Fraction farey_mediant(const Fraction& a, const Fraction& b) {
  return {detail::checked_add(a.num(), b.num()), detail::checked_add(a.den(), b.den())};
}

/// a (+) b, then a (+) that, and so on: `steps` fractions approaching a.
inline std::vector<Fraction> mediant_chain(const Fraction& a, const Fraction& b, int steps) {
  std::vector<Fraction> out;
  if (steps < 0) throw InvalidArgument("mediant chain length must be >= 0");
  Fraction hi = b;
  for (int i = 0; i < steps; ++i) {
    hi = farey_mediant(a, hi);
    out.push_back(hi);
  }
  return out;
}

inline double omega_star(int p, int q, double g) {
  if (!(g >= 0.0)) throw InvalidArgument("gravity g must be >= 0");
  if (q < 1 || p < 1) throw InvalidArgument("p and q must be positive");
  return kTwoPi * p * p * g / q;
}

/// q Omega(eps) = (q / 2 pi) g (2 pi p / q + eps)^2, written so eps = 0
/// returns omega_star bit for bit.
inline double omega_bare(double epsilon, int p, int q, double g) {
  const double t = 1.0 + epsilon * q / (kTwoPi * p);
  return omega_star(p, q, g) * t * t;
}

enum class CfStyle { nearest, standard };

/// x = anchor + sign * [0; terms...].
struct ContinuedFraction {
  std::int64_t anchor = 0;
  int sign = 1;
  std::vector<std::int64_t> terms;
};

inline ContinuedFraction continued_fraction(double x, int max_terms,
                                            CfStyle style = CfStyle::nearest) {
  if (max_terms < 1) throw InvalidArgument("max_terms must be >= 1");
  if (!std::isfinite(x)) throw InvalidArgument("continued fraction of a non-finite value");
  ContinuedFraction cf;
  // ties (x = n + 1/2) go to the lower anchor
  const double a = style == CfStyle::nearest ? std::ceil(x - 0.5) : std::floor(x);
  cf.anchor = static_cast<std::int64_t>(a);
  double y = x - a;
  cf.sign = y < 0.0 ? -1 : 1;
  y = std::abs(y);
  // stop once the remainder is at the level of the input's rounding error
  const double floor_err = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
  double err_bound = floor_err;
  while (static_cast<int>(cf.terms.size()) < max_terms && y > err_bound) {
    const double inv = 1.0 / y;
    const double t = std::floor(inv);
    cf.terms.push_back(static_cast<std::int64_t>(t));
    err_bound *= inv * inv;  // error in the remainder grows like 1/y^2
    y = inv - t;
    if (err_bound > 1e-3) break;
  }
  return cf;
}

/// anchor, then anchor +- [0; a1], anchor +- [0; a1, a2], ...
inline std::vector<Fraction> convergents(const ContinuedFraction& cf) {
  std::vector<Fraction> out;
  out.emplace_back(cf.anchor, 1);
  // h/k convergents of [0; a1, a2, ...]
  std::int64_t h_prev = 1, h = 0, k_prev = 0, k = 1;
  for (std::int64_t a : cf.terms) {
    const std::int64_t hn = detail::checked_add(detail::checked_mul(a, h), h_prev);
    const std::int64_t kn = detail::checked_add(detail::checked_mul(a, k), k_prev);
    h_prev = h;
    h = hn;
    k_prev = k;
    k = kn;
    const std::int64_t r = detail::checked_add(detail::checked_mul(cf.anchor, k), cf.sign * h);
    out.emplace_back(r, k);
  }
  return out;
}

struct ResonanceRecord {
  int p = 0, q = 1;
  double omega_star = 0.0;
  double distance = 0.0;  ///< distance of Omega* to the nearest integer
  ContinuedFraction cf;
  std::vector<Fraction> convergents;
  bool visible = false;
};

inline constexpr double kVisibilityThreshold = 0.25;

inline ResonanceRecord resonance_visibility(int p, int q, double g, int max_terms = 8,
                                            double threshold = kVisibilityThreshold) {
  ResonanceRecord rec;
  rec.p = p;
  rec.q = q;
  rec.omega_star = omega_star(p, q, g);
  rec.distance = std::abs(rec.omega_star - std::round(rec.omega_star));
  rec.cf = continued_fraction(rec.omega_star, max_terms);
  rec.convergents = convergents(rec.cf);
  rec.visible = rec.distance < threshold;
  return rec;
}

/// Quasi-momentum that centres a packet at momentum N0 on the torus momentum
/// J0 (+ 2 pi n) of band j:
///   beta = -(eps/tau)(N0 - j - q alpha_j + beta0) + (J0 + 2 pi n)/(q tau) - eta/2 + beta0  mod 1
inline double special_beta(double N0, int j, int nu, long n, double J0, const SystemParams& s,
                           double alpha_j) {
  if (nu < 0 || nu >= s.p) throw InvalidArgument("nu out of range");
  const double b0 = frac(static_cast<double>(nu) / s.p + 0.5 * s.q);
  const double v = -(s.epsilon / s.tau) * (N0 - j - s.q * alpha_j + b0) +
                   (J0 + kTwoPi * static_cast<double>(n)) / (s.q * s.tau) - 0.5 * s.eta + b0;
  return frac(v);
}

/// q = 2 form, independent of the band.
inline double special_beta_q2(double N0, int nu, long n, double J0, const SystemParams& s) {
  if (s.q != 2) throw InvalidArgument("special_beta_q2 needs q = 2");
  const double b0 = frac(static_cast<double>(nu) / s.p);
  return frac(-(s.epsilon / s.tau) * (N0 + b0) + (J0 + kTwoPi * static_cast<double>(n)) / (2.0 * s.tau) -
              0.5 * s.eta + b0);
}

struct Mode {
  long r = 1, s = 1;
  int j = 0;
};

struct CurvePoint {
  double tau_over_2pi;
  double momentum;
};

/// Predicted mode momentum a(eps) * t along a tau/2pi grid; the exact
/// resonance point is omitted.
inline std::vector<std::vector<CurvePoint>> mode_curves(const std::vector<double>& tau_over_2pi,
                                                        int p, int q, const std::vector<Mode>& modes,
                                                        double t, double g) {
  std::vector<std::vector<CurvePoint>> out(modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    for (double x : tau_over_2pi) {
      const double eps = kTwoPi * (x - static_cast<double>(p) / q);
      if (eps == 0.0) continue;
      const double Om = omega_bare(eps, p, q, g) / q;
      const double a = kTwoPi / eps *
                       (static_cast<double>(modes[m].r) / (static_cast<double>(q) * modes[m].s) - Om);
      out[m].push_back({x, a * t});
    }
  }
  return out;
}

}  // namespace qam::spectro

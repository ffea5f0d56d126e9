#pragma once

// Periodic-grid helpers shared by the rotor and band code. All grids here are
// uniform on one period [x0, x0 + 2 pi) with M points.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "qam/params.hpp"

namespace qam {

using cplx = std::complex<double>;

namespace fourier {

/// Unscaled DFT pair: fwd computes sum_j x_j e^{-2 pi i jk/M}, inv the
/// conjugate sum without the 1/M factor.
class Dft {
 public:
  Dft() { fft_.SetFlag(Eigen::FFT<double>::Unscaled); }

  void forward(std::span<cplx> out, std::span<const cplx> in) {
    fft_.fwd(out.data(), in.data(), static_cast<Eigen::Index>(in.size()));
  }
  void inverse(std::span<cplx> out, std::span<const cplx> in) {
    fft_.inv(out.data(), in.data(), static_cast<Eigen::Index>(in.size()));
  }

 private:
  Eigen::FFT<double> fft_;
};

/// Signed integer wavenumber of DFT bin `b`; the Nyquist bin maps to 0 for
/// derivatives (its sign is ambiguous).
inline long wavenumber(std::size_t b, std::size_t M) {
  long n = static_cast<long>(b);
  long m = static_cast<long>(M);
  return n < (m + 1) / 2 ? n : n - m;
}

/// d/dx of a 2 pi-periodic complex function sampled on a uniform grid.
inline std::vector<cplx> derivative(std::span<const cplx> f, Dft& dft) {
  const std::size_t M = f.size();
  std::vector<cplx> spec(M), out(M);
  dft.forward(spec, f);
  for (std::size_t b = 0; b < M; ++b) {
    long n = wavenumber(b, M);
    if (M % 2 == 0 && b == M / 2) n = 0;
    spec[b] *= cplx(0.0, static_cast<double>(n)) / static_cast<double>(M);
  }
  dft.inverse(out, spec);
  return out;
}

inline std::vector<double> derivative(std::span<const double> f, Dft& dft) {
  std::vector<cplx> c(f.begin(), f.end());
  auto d = derivative(std::span<const cplx>(c), dft);
  std::vector<double> out(d.size());
  std::transform(d.begin(), d.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

/// Zero-mean antiderivative of a periodic function (the mean is dropped).
inline std::vector<double> antiderivative(std::span<const double> f, Dft& dft) {
  const std::size_t M = f.size();
  std::vector<cplx> c(f.begin(), f.end()), spec(M), out(M);
  dft.forward(spec, c);
  for (std::size_t b = 0; b < M; ++b) {
    long n = wavenumber(b, M);
    if (n == 0 || (M % 2 == 0 && b == M / 2)) {
      spec[b] = 0.0;
    } else {
      spec[b] /= cplx(0.0, static_cast<double>(n)) * static_cast<double>(M);
    }
  }
  dft.inverse(out, spec);
  std::vector<double> r(M);
  std::transform(out.begin(), out.end(), r.begin(), [](cplx z) { return z.real(); });
  return r;
}

/// Periodic trapezoid rule for the mean value over one period.
template <class T>
T periodic_mean(std::span<const T> f) {
  T s{};
  for (const auto& v : f) s += v;
  return s / static_cast<double>(f.size());
}

/// Trigonometric interpolant of a real function sampled on a uniform periodic
/// grid, optionally carrying a linear winding term `slope * (x - x0)`. Value
/// and first two derivatives evaluate in O(number of retained harmonics).
class TrigSeries {
 public:
  TrigSeries() = default;

  /// `samples[i]` is f(x0 + 2 pi i / M) with f(x + 2 pi) = f(x) + 2 pi * winding.
  TrigSeries(std::span<const double> samples, double x0, double winding = 0.0,
             double rel_cutoff = 1e-16)
      : x0_(x0), slope_(winding) {
    const std::size_t M = samples.size();
    std::vector<cplx> in(M), spec(M);
    for (std::size_t i = 0; i < M; ++i) {
      double x = kTwoPi * static_cast<double>(i) / static_cast<double>(M);
      in[i] = samples[i] - slope_ * x;
    }
    Dft dft;
    dft.forward(spec, in);
    const std::size_t nmax = (M % 2 == 0) ? M / 2 - 1 : (M - 1) / 2;
    mean_ = spec[0].real() / static_cast<double>(M);
    coeffs_.resize(nmax);
    double biggest = std::abs(mean_);
    for (std::size_t n = 1; n <= nmax; ++n) {
      coeffs_[n - 1] = spec[n] / static_cast<double>(M);
      biggest = std::max(biggest, std::abs(coeffs_[n - 1]));
    }
    std::size_t keep = coeffs_.size();
    while (keep > 0 && std::abs(coeffs_[keep - 1]) <= rel_cutoff * biggest) --keep;
    coeffs_.resize(keep);
  }

  double value(double x) const { return eval<0>(x) + slope_ * (x - x0_); }
  double derivative(double x) const { return eval<1>(x) + slope_; }
  double second_derivative(double x) const { return eval<2>(x); }

  std::size_t harmonics() const { return coeffs_.size(); }
  double winding() const { return slope_; }

 private:
  template <int Order>
  double eval(double x) const {
    const cplx z = std::polar(1.0, x - x0_);
    cplx zn = 1.0, acc = 0.0;
    for (std::size_t n = 1; n <= coeffs_.size(); ++n) {
      zn *= z;
      const double dn = static_cast<double>(n);
      cplx factor = 1.0;
      if constexpr (Order == 1) factor = cplx(0.0, dn);
      if constexpr (Order == 2) factor = -dn * dn;
      acc += factor * coeffs_[n - 1] * zn;
    }
    double v = 2.0 * acc.real();
    if constexpr (Order == 0) v += mean_;
    return v;
  }

  double x0_ = 0.0;
  double slope_ = 0.0;
  double mean_ = 0.0;
  std::vector<cplx> coeffs_;
};

}  // namespace fourier
}  // namespace qam

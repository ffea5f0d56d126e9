#include <catch_amalgamated.hpp>

#include "qam/fourier.hpp"
#include "qam/random.hpp"
#include "oracles.hpp"

using namespace qam;
using Catch::Approx;

namespace {
std::vector<double> grid(std::size_t M) {
  std::vector<double> x(M);
  for (std::size_t i = 0; i < M; ++i) x[i] = -kPi + kTwoPi * i / M;
  return x;
}
}  // namespace

TEST_CASE("spectral derivative and antiderivative of trigonometric data", "[fourier]") {
  const auto x = grid(64);
  std::vector<double> f(64), df(64);
  for (std::size_t i = 0; i < 64; ++i) {
    f[i] = std::sin(3 * x[i]) + 0.5 * std::cos(x[i]) + 0.25;
    df[i] = 3 * std::cos(3 * x[i]) - 0.5 * std::sin(x[i]);
  }
  fourier::Dft dft;
  const auto d = fourier::derivative(std::span<const double>(f), dft);
  for (std::size_t i = 0; i < 64; ++i) CHECK(d[i] == Approx(df[i]).margin(1e-12));

  // the mean is dropped by the antiderivative
  const auto F = fourier::antiderivative(std::span<const double>(df), dft);
  for (std::size_t i = 0; i < 64; ++i) CHECK(F[i] == Approx(f[i] - 0.25).margin(1e-12));
  CHECK(fourier::periodic_mean(std::span<const double>(f)) == Approx(0.25).margin(1e-14));
}

TEST_CASE("TrigSeries interpolates a winding function off the grid", "[fourier]") {
  const auto x = grid(128);
  std::vector<double> f(128);
  auto g = [](double t) { return 2.0 * t + 0.3 * std::sin(t) + 0.1 * std::cos(4 * t); };
  for (std::size_t i = 0; i < 128; ++i) f[i] = g(x[i]);
  const fourier::TrigSeries ts(f, -kPi, 2.0);
  for (double t : {-3.0, -1.234, 0.0, 0.5, 2.9}) {
    CHECK(ts.value(t) == Approx(g(t)).margin(1e-12));
    CHECK(ts.derivative(t) == Approx(2.0 + 0.3 * std::cos(t) - 0.4 * std::sin(4 * t)).margin(1e-12));
    CHECK(ts.second_derivative(t) == Approx(-0.3 * std::sin(t) - 1.6 * std::cos(4 * t)).margin(1e-11));
  }
  CHECK(ts.harmonics() == 4);
}

TEST_CASE("complex derivative matches a naive transform", "[fourier]") {
  const std::size_t M = 32;
  std::vector<cplx> f(M);
  const auto a = oracle::random_amplitudes(9, 5);
  for (std::size_t i = 0; i < M; ++i) {
    const double t = -kPi + kTwoPi * i / M;
    for (int m = -4; m <= 4; ++m) f[i] += a[static_cast<std::size_t>(m + 4)] * std::polar(1.0, m * t);
  }
  fourier::Dft dft;
  const auto d = fourier::derivative(std::span<const cplx>(f), dft);
  const auto ref = oracle::dft_derivative(f, -kPi, -16);
  for (std::size_t i = 0; i < M; ++i) CHECK(std::abs(d[i] - ref[i]) < 1e-12);
}

TEST_CASE("counter RNG is order independent and roughly normal", "[random]") {
  const CounterRng r(42);
  CHECK(r.normal(3, 7) == CounterRng(42).normal(3, 7));
  CHECK(r.normal(3, 7) != r.normal(4, 7));
  double m = 0, v = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal(static_cast<std::uint64_t>(i), 0);
    m += z;
    v += z * z;
  }
  m /= n;
  v = v / n - m * m;
  CHECK(std::abs(m) < 0.03);
  CHECK(std::abs(v - 1.0) < 0.05);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform(1, static_cast<std::uint64_t>(i));
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

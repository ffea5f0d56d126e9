#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <limits>

#include "qam/spectroscopy.hpp"
#include "oracles.hpp"

using namespace qam;
using namespace qam::spectro;
using Catch::Approx;

namespace {
struct Quoted {
  int p, q;
  const char* text;
};
// resonances and their printed Omega* values (g = 0.0386)
const Quoted kQuoted[] = {{3, 2, "1.0913893"},   {11, 7, "4.1923207"},  {20, 13, "7.4624908"},
                          {22, 15, "7.82566"},    {25, 17, "8.9165791"}, {28, 19, "10.0075"},
                          {31, 21, "11.098678"},  {53, 36, "18.924152"}, {59, 40, "21.106256"}};

double last_digit(const char* s) {
  const char* dot = std::strchr(s, '.');
  return std::pow(10.0, -static_cast<double>(std::strlen(dot) - 1));
}
}  // namespace

TEST_CASE("Omega* agrees with printed values to the last printed digit", "[spectro]") {
  for (const auto& r : kQuoted) {
    const double w = omega_star(r.p, r.q, 0.0386);
    CHECK(w == Approx(2.0 * oracle::pi * r.p * r.p * 0.0386 / r.q).epsilon(1e-15));
    INFO(r.p << "/" << r.q << " -> " << w);
    CHECK(std::abs(w - std::atof(r.text)) < last_digit(r.text));
  }
  CHECK_THROWS_AS(omega_star(3, 2, -1.0), InvalidArgument);
}

TEST_CASE("bare winding at zero detuning is Omega* exactly", "[spectro]") {
  for (const auto& r : kQuoted) CHECK(omega_bare(0.0, r.p, r.q, 0.0386) == omega_star(r.p, r.q, 0.0386));
  // q Omega with Omega = g tau^2 / 2 pi
  const double eps = -0.2827433388;
  const double tau = 3.0 * oracle::pi + eps;
  CHECK(omega_bare(eps, 3, 2, 0.0386) == Approx(2.0 * 0.0386 * tau * tau / (2.0 * oracle::pi)).epsilon(1e-14));
}

TEST_CASE("nearest-integer continued fractions", "[spectro]") {
  const auto a = continued_fraction(omega_star(3, 2, 0.0386), 8);
  CHECK(a.anchor == 1);
  CHECK(a.sign == 1);
  REQUIRE(a.terms.size() >= 5);
  CHECK(std::vector<std::int64_t>(a.terms.begin(), a.terms.begin() + 5) == std::vector<std::int64_t>{10, 1, 16, 3, 3});

  const auto b = continued_fraction(omega_star(22, 15, 0.0386), 8);
  CHECK(b.anchor == 8);
  CHECK(b.sign == -1);
  REQUIRE(b.terms.size() >= 4);
  CHECK(std::vector<std::int64_t>(b.terms.begin(), b.terms.begin() + 4) == std::vector<std::int64_t>{5, 1, 2, 1});

  const auto c = continued_fraction(omega_star(11, 7, 0.0386), 1);
  CHECK(c.anchor == 4);
  CHECK(c.terms == std::vector<std::int64_t>{5});

  // exact integers and ties
  CHECK(continued_fraction(3.0, 5).terms.empty());
  CHECK(continued_fraction(2.5, 5).anchor == 2);
  const auto s = continued_fraction(2.7, 5, CfStyle::standard);
  CHECK(s.anchor == 2);
  CHECK(s.sign == 1);
  CHECK(s.terms.front() == 1);
  CHECK_THROWS_AS(continued_fraction(std::nan(""), 3), InvalidArgument);
}

TEST_CASE("convergents of Omega*(3/2)", "[spectro]") {
  const auto cv = convergents(continued_fraction(omega_star(3, 2, 0.0386), 8));
  REQUIRE(cv.size() >= 3);
  CHECK(cv[0] == Fraction(1, 1));
  CHECK(cv[1] == Fraction(11, 10));
  CHECK(cv[2] == Fraction(12, 11));
}

TEST_CASE("convergents are best approximations and alternate", "[spectro]") {
  for (double x : {omega_star(3, 2, 0.0386), omega_star(22, 15, 0.0386), omega_star(20, 13, 0.0386), 0.318309886,
                   2.718281828}) {
    for (auto style : {CfStyle::nearest, CfStyle::standard}) {
      const auto cv = convergents(continued_fraction(x, 10, style));
      double prev_err = 1e300;
      int prev_side = 0;
      for (std::size_t i = 0; i < cv.size(); ++i) {
        const auto& f = cv[i];
        CHECK(f.reduced());
        const double err = std::abs(x - f.value());
        CHECK(err <= prev_err);
        prev_err = err;
        // the floor anchor of a standard expansion need not be a best approximation
        const bool anchor = style == CfStyle::standard && i == 0;
        if (!anchor && f.den() <= 50 && err > 1e-12) {
          const auto [r, s] = oracle::best_approximation(x, f.den());
          INFO("x=" << x << " convergent " << f);
          CHECK(std::abs(x - static_cast<double>(r) / s) >= err - 1e-15);
        }
        if (style == CfStyle::standard && i > 0 && err > 1e-12) {
          const int side = f.value() < x ? -1 : 1;
          if (prev_side != 0) CHECK(side == -prev_side);
          prev_side = side;
        }
      }
    }
  }
}

TEST_CASE("Farey mediants with exact arithmetic", "[spectro]") {
  CHECK(farey_mediant(Fraction(11, 10), Fraction(12, 11)) == Fraction(23, 21));
  CHECK(farey_mediant(Fraction(12, 11), Fraction(11, 10)) == Fraction(23, 21));
  const auto chain = mediant_chain(Fraction(3, 2), Fraction(2, 1), 3);
  REQUIRE(chain.size() == 3);
  CHECK(chain[0] == Fraction(5, 3));
  CHECK(chain[1] == Fraction(8, 5));
  CHECK(chain[2] == Fraction(11, 7));
  const auto down = mediant_chain(Fraction(11, 10), Fraction(1, 1), 2);
  CHECK(down[0] == Fraction(12, 11));
  CHECK(down[1] == Fraction(23, 21));

  for (long a = 1; a < 12; ++a)
    for (long b = 1; b < 12; ++b)
      for (long c = 1; c < 12; ++c)
        for (long d = 1; d < 12; ++d) {
          const Fraction x(a, b), y(c, d);
          if (!(x < y)) continue;
          const auto m = farey_mediant(x, y);
          CHECK((x < m && m < y));
          CHECK(m == farey_mediant(y, x));
        }
  // non-reduced values compare by value but stay distinct as representations
  CHECK(same_value(Fraction(2, 4), Fraction(1, 2)));
  CHECK_FALSE(Fraction(2, 4) == Fraction(1, 2));
  CHECK(Fraction(2, 4).reduce() == Fraction(1, 2));
  CHECK_THROWS_AS(Fraction(1, 0), InvalidArgument);
  const std::int64_t big = std::numeric_limits<std::int64_t>::max();
  CHECK_THROWS_AS(farey_mediant(Fraction(1, 2), Fraction(big, 3)), NumericalError);
}

TEST_CASE("visibility rule", "[spectro]") {
  const auto v = resonance_visibility(28, 19, 0.0386);
  CHECK(v.distance == Approx(0.0075930021).margin(1e-9));
  CHECK(v.visible);
  const auto n = resonance_visibility(20, 13, 0.0386);
  CHECK(n.distance == Approx(0.4624908571).margin(1e-9));
  CHECK_FALSE(n.visible);
  // Omega* integer when 2 pi p^2 g / q = 1
  const double g = 2.0 / (2.0 * oracle::pi * 9.0);
  CHECK(resonance_visibility(3, 2, g).distance < 1e-14);
}

TEST_CASE("selection quasi-momentum for the q = 2 packet", "[spectro]") {
  const auto s = build_params(1.0, 1.455, 0.0386, 3, 2, 0, 0.0);
  // direct evaluation: -(eps/tau)(N0 - j - q alpha + beta0) + (J0 + 2 pi n)/(q tau) - eta/2 + beta0
  const double direct = -(s.epsilon / s.tau) * (0.0 - 1.0 - 2.0 * (-0.5) + 0.0) +
                        (0.0 + 2.0 * oracle::pi) / (2.0 * s.tau) - 0.5 * s.eta;
  const double b = special_beta(0.0, 1, 0, 1, 0.0, s, -0.5);
  CHECK(b == Approx(direct - std::floor(direct)).margin(1e-14));
  CHECK(std::abs(b - 0.1672) < 0.0005);
  CHECK(special_beta_q2(0.0, 0, 1, 0.0, s) == Approx(b).margin(1e-14));
  // band independence for q = 2 once N = q (m - alpha_j) is used
  CHECK(special_beta(0.0, 0, 0, 1, 0.0, s, 0.0) == Approx(b).margin(1e-14));
  CHECK_THROWS_AS(special_beta(0.0, 0, 3, 1, 0.0, s, 0.0), InvalidArgument);
}

TEST_CASE("mode curves", "[spectro]") {
  const std::vector<double> taus{1.455, 1.5, 1.46};
  const auto c = mode_curves(taus, 3, 2, {{1, 1, 0}}, 100.0, 0.0386);
  REQUIRE(c[0].size() == 2);  // exact resonance omitted
  CHECK(c[0][0].momentum == Approx(29.88).margin(0.01));
  const auto zero = mode_curves(taus, 3, 2, {{1, 1, 0}}, 0.0, 0.0386);
  for (const auto& pt : zero[0]) CHECK(pt.momentum == 0.0);
  const std::vector<double> fig6{1.49, 1.495, 1.5, 1.50625};
  const auto f = mode_curves(fig6, 3, 2, {{14, 13, 0}, {25, 23, 0}, {12, 11, 0}, {23, 21, 0}, {11, 10, 0}}, 200.0, 0.0386);
  for (const auto& curve : f) CHECK(curve.size() == 3);
}

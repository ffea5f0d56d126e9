#include <catch_amalgamated.hpp>

#include "qam/pseudoclassical.hpp"
#include "oracles.hpp"

using namespace qam;
using namespace qam::pseudo;
using Catch::Approx;

namespace {
SystemParams q2_system() { return build_params(1.0, 1.455, 0.0386, 3, 2, 0, 0.1672); }
}  // namespace

TEST_CASE("numeric q = 2 map equals the closed-form map", "[pseudo]") {
  const auto s = q2_system();
  const auto bd = spinor::band_structure(s);
  for (int jcf = 0; jcf < 2; ++jcf) {
    const auto mp = make_map_params(s, bd, spinor::q2_band_label(jcf, 3, 0));
    double err = 0.0;
    for (const auto& seed : seed_grid(9, 9)) {
      TorusPoint a = seed, b = seed;
      for (int n = 0; n < 50; ++n) {
        a = torus_map_step(a, mp);
        b = q2_torus_map_step(b, jcf, 3, 0, 1.0, s.epsilon, s.Omega);
        err = std::max(err, torus_distance(a, b));
        b = a;  // compare single steps; chaotic seeds would separate otherwise
      }
    }
    INFO("closed-form branch " << jcf);
    CHECK(err < 1e-12);
  }
}

TEST_CASE("zero detuning is a rigid rotation", "[pseudo]") {
  const auto s = build_params(1.0, 1.5, 0.0386, 3, 2, 0, 0.0);
  REQUIRE(s.epsilon == 0.0);
  const auto mp = make_map_params(s, 0);
  TorusPoint pt{0.3, -1.1};
  for (int n = 0; n < 20; ++n) {
    const auto nx = torus_map_step(pt, mp);
    CHECK(oracle::circ(nx.J, pt.J + 2.0 * oracle::pi * s.Omega * 2) < 1e-12);
    CHECK(oracle::circ(nx.vartheta, pt.vartheta + pt.J) < 1e-12);
    pt = nx;
  }
  AccelPoint a{0.4, 0.25};
  for (long n = 0; n < 20; ++n) {
    a = accelerated_map_step(a, n, mp);
    CHECK(a.I == 0.25);
  }
  CHECK_THROWS_AS(find_periodic_orbit(1, 1, mp), InvalidArgument);
  CHECK_THROWS_AS(orbit_acceleration(1, 1, s), InvalidArgument);
}

TEST_CASE("map preserves area and its Jacobian is exact", "[pseudo]") {
  for (auto s : {q2_system(), build_params(1.0, 1.5375, 0.0386, 11, 7, 0, 0.0)}) {
    const auto bd = spinor::band_structure(s);
    for (int j = 0; j < s.q; j += (s.q > 2 ? 3 : 1)) {
      const auto mp = make_map_params(s, bd, j);
      const double h = 1e-6;
      double det_err = 0.0, jac_err = 0.0;
      for (const auto& pt : seed_grid(7, 7)) {
        // central differences on the lifted map
        const auto fx = [&](TorusPoint a) { return lifted_step(a, mp); };
        const auto xp = fx({pt.vartheta + h, pt.J}), xm = fx({pt.vartheta - h, pt.J});
        const auto yp = fx({pt.vartheta, pt.J + h}), ym = fx({pt.vartheta, pt.J - h});
        const double a = (xp.vartheta - xm.vartheta) / (2 * h), b = (yp.vartheta - ym.vartheta) / (2 * h);
        const double c = (xp.J - xm.J) / (2 * h), d = (yp.J - ym.J) / (2 * h);
        det_err = std::max(det_err, std::abs(a * d - b * c - 1.0));
        const auto Jm = step_jacobian(pt, mp);
        jac_err = std::max({jac_err, std::abs(Jm[0][0] - a), std::abs(Jm[0][1] - b), std::abs(Jm[1][0] - c),
                            std::abs(Jm[1][1] - d)});
        CHECK(Jm[0][0] * Jm[1][1] - Jm[0][1] * Jm[1][0] == Approx(1.0).epsilon(1e-14));
      }
      INFO("q = " << s.q << " band " << j);
      CHECK(det_err < 1e-6);
      CHECK(jac_err < 1e-6);
    }
  }
}

TEST_CASE("inverse step", "[pseudo]") {
  const auto mp = make_map_params(q2_system(), 0);
  for (const auto& pt : seed_grid(5, 5)) {
    const auto back = torus_map_step_back(torus_map_step(pt, mp), mp);
    CHECK(torus_distance(back, pt) < 1e-12);
  }
}

TEST_CASE("accelerated and torus maps describe the same trajectory", "[pseudo]") {
  const auto s = q2_system();
  const auto bd = spinor::band_structure(s);
  const int band = spinor::q2_band_label(1, 3, 0);
  const auto mp = make_map_params(s, bd, band);
  const auto orbit = find_periodic_orbit(1, 1, mp);
  REQUIRE(orbit);
  // seed inside the island, near the fixed point
  const TorusPoint c = orbit->points.front();
  for (double off : {0.0, 0.05, 0.2}) {
    // J_0 = q^2 I_0 + varrho at n = 0
    AccelPoint a{c.vartheta + off, (c.J - mp.varrho) / 4.0};
    TorusPoint t{wrap_angle(c.vartheta + off), torus_momentum(a, 0, mp)};
    double err = 0.0;
    for (long n = 0; n < 1000; ++n) {
      a = accelerated_map_step(a, n, mp);
      t = torus_map_step(t, mp);
      err = std::max({err, oracle::circ(a.vartheta, t.vartheta), oracle::circ(torus_momentum(a, n + 1, mp), t.J)});
    }
    INFO("offset " << off);
    CHECK(err < 1e-12);
  }
}

TEST_CASE("stable (1,1) orbit and acceleration for the q = 2 packet", "[pseudo]") {
  const auto s = q2_system();
  const auto bd = spinor::band_structure(s);
  const int band = spinor::q2_band_label(1, 3, 0);
  const auto mp = make_map_params(s, bd, band);
  const auto o = find_periodic_orbit(1, 1, mp);
  REQUIRE(o);
  CHECK(o->stable);
  CHECK(o->residue > 0.0);
  CHECK(o->residue < 1.0);
  // forward iteration returns to the point, J advanced by one winding
  const auto nx = lifted_step(o->points.front(), mp);
  CHECK(oracle::circ(nx.vartheta, o->points.front().vartheta) < 1e-9);
  CHECK(oracle::circ(nx.J, o->points.front().J) < 1e-9);
  CHECK(std::abs(nx.J - o->points.front().J - 2.0 * oracle::pi) < 1e-9);

  const auto acc = orbit_acceleration(1, 1, s);
  const double Omega = 0.0386 * s.tau * s.tau / (2.0 * oracle::pi);
  CHECK(acc.a == Approx(2.0 * oracle::pi / s.epsilon * (0.5 - Omega)).epsilon(1e-14));
  CHECK(std::abs(acc.a - 0.2988) < 0.0005);
  CHECK(acc.a_I == Approx(acc.a * s.epsilon / s.q).epsilon(1e-14));

  // I gains a_I per kick along the orbit
  AccelPoint a{o->points.front().vartheta, (o->points.front().J - mp.varrho) / 4.0};
  const double I0 = a.I;
  for (long n = 0; n < 200; ++n) a = accelerated_map_step(a, n, mp);
  CHECK(a.I - I0 == Approx(200 * acc.a_I).epsilon(1e-8));
}

TEST_CASE("q = 7 (4,1) orbit", "[pseudo]") {
  const auto s = build_params(1.0, 1.5375, 0.0386, 11, 7, 0, 0.0);
  const auto bd = spinor::band_structure(s);
  int stable = 0;
  for (int j = 0; j < 7; ++j) {
    const auto o = find_periodic_orbit(4, 1, make_map_params(s, bd, j));
    if (o && o->stable) ++stable;
  }
  CHECK(stable >= 1);
  const auto acc = orbit_acceleration(4, 1, s);
  CHECK(acc.a == Approx(2.0 * oracle::pi / s.epsilon * (4.0 / 7.0 - s.eta * s.tau / (2.0 * oracle::pi))).epsilon(1e-14));
  CHECK(acc.a == Approx(acc.a_I * 7.0 / s.epsilon).epsilon(1e-14));
  // r/(qs) = Omega gives zero acceleration
  const double tau2 = 2.0 * oracle::pi * 1.455;
  const double g0 = oracle::pi / (tau2 * tau2);  // Omega = 1/2
  CHECK(std::abs(orbit_acceleration(1, 1, build_params(1.0, 1.455, g0, 3, 2, 0, 0.0)).a) < 1e-12);
}

TEST_CASE("non-reduced windings and phase portraits", "[pseudo]") {
  const auto s = q2_system();
  const auto mp = make_map_params(s, 0);
  const auto pts = phase_portrait(mp, seed_grid(3, 3), 10);
  CHECK(pts.size() == 90);
  CHECK(pts.back().iter == 10);
  CHECK_THROWS_AS(phase_portrait(mp, seed_grid(2, 2), 0), InvalidArgument);
  CHECK_THROWS_AS(find_periodic_orbit(1, 0, mp), InvalidArgument);
  CHECK_THROWS_AS(make_map_params(s, 2), InvalidArgument);
  const auto o = find_periodic_orbit(2, 2, mp);
  if (o) CHECK(o->points.size() == 2);
}

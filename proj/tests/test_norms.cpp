#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "rwave/norms.hpp"
#include "rwave/solver.hpp"

using namespace rwave;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

NormTrace ramp_trace(int n) {  // value(t) = t on [0, 1]
  NormTrace tr;
  tr.q = 1.0;
  tr.r = 2.0;
  for (int j = 0; j <= n; ++j) {
    tr.t.push_back(static_cast<double>(j) / n);
    tr.value.push_back(static_cast<double>(j) / n);
  }
  return tr;
}

NormTrace const_trace(int n, double c) {
  NormTrace tr;
  tr.q = 2.0;
  tr.r = 2.0;
  for (int j = 0; j <= n; ++j) {
    tr.t.push_back(static_cast<double>(j) / n);
    tr.value.push_back(c);
  }
  return tr;
}

Trajectory cosine_trajectory(double k, double dt, double T) {
  const double L = 2.0 * M_PI;
  const GridSpec g = make_grid(1, 64, L, 2.0);
  std::vector<double> u0(64), u1(64, 0.0);
  for (int i = 0; i < 64; ++i)
    u0[static_cast<std::size_t>(i)] = std::cos(k * (-L / 2 + g.dx() * i));
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_final = T;
  cfg.snapshot_stride = 1;
  cfg.nonlinearity_on = false;
  return evolve_nlw({Field::from_physical(g, u0), Field::from_physical(g, u1)}, cfg);
}

}  // namespace

TEST_CASE("admissibility: textbook pairs pass, forbidden ones do not") {
  // q=5, r=10 sits at regularity one in three dimensions, strictly inside the gap
  auto c = admissible_pair_check(5.0, 10.0, 1.0, 3);
  CHECK(c.ok);
  CHECK(!c.sharp);

  // the energy pair (infinity, 2) at s = 0 meets the gap condition with equality
  c = admissible_pair_check(kInf, 2.0, 1.5 - 3.0 / 2.0, 3);
  CHECK(c.ok);
  CHECK(c.sharp);

  c = admissible_pair_check(5.0, kInf, 1.0, 3);  // r must be finite
  CHECK(!c.ok);
  CHECK(!c.reason.empty());

  c = admissible_pair_check(1.5, 10.0, 1.0, 3);  // q below two
  CHECK(!c.ok);

  // gap violated: 1/2 + 2/20 = 0.6 > 0.5
  c = admissible_pair_check(2.0, 10.0, 1.5 - 0.5 - 0.3, 3);
  CHECK(!c.ok);
  CHECK(!c.reason.empty());

  // scaling relation off: (5, 10) forces s = 1
  c = admissible_pair_check(5.0, 10.0, 0.5, 3);
  CHECK(!c.ok);
}

TEST_CASE("time quadrature: closed forms for constant and linear traces") {
  const NormTrace tc = const_trace(10, 3.0);
  for (double q : {1.0, 2.0, 5.0}) {
    const QuadResult res = spacetime_norm(tc, q, 0.0, 1.0);
    CHECK(res.value == doctest::Approx(3.0 * std::pow(1.0, 1.0 / q)).epsilon(1e-14));
    CHECK(res.error_est <= 1e-14);
    const QuadResult part = spacetime_norm(tc, q, 0.3, 0.7);
    CHECK(part.value == doctest::Approx(3.0 * std::pow(0.4, 1.0 / q)).epsilon(1e-13));
  }
  CHECK(spacetime_norm(tc, kInf, 0.0, 1.0).value == doctest::Approx(3.0));

  const NormTrace tr = ramp_trace(10);
  CHECK(spacetime_norm(tr, 1.0, 0.0, 1.0).value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(spacetime_norm(tr, kInf, 0.0, 1.0).value == doctest::Approx(1.0).epsilon(1e-14));
  // endpoints between samples: interpolated linearly, so still exact for q = 1
  CHECK(spacetime_norm(tr, 1.0, 0.0, 0.55).value ==
        doctest::Approx(0.55 * 0.55 / 2.0).epsilon(1e-13));
  CHECK(spacetime_norm(tr, kInf, 0.0, 0.55).value == doctest::Approx(0.55).epsilon(1e-13));
}

TEST_CASE("time quadrature: mass is additive across an interior cut") {
  const NormTrace tr = ramp_trace(16);
  for (double q : {1.0, 2.0, 4.0}) {
    const double whole = std::pow(spacetime_norm(tr, q, 0.0, 1.0).value, q);
    const double left = std::pow(spacetime_norm(tr, q, 0.0, 0.37).value, q);
    const double right = std::pow(spacetime_norm(tr, q, 0.37, 1.0).value, q);
    CHECK(whole == doctest::Approx(left + right).epsilon(1e-13));
  }
}

TEST_CASE("time quadrature: discrete Hoelder inequality holds with the same nodes") {
  Trajectory traj = cosine_trajectory(2.0, 0.01, 1.0);
  const NormTrace tr = space_norm_trace(traj, 2.0, Component::position);
  const double l1 = spacetime_norm(tr, 1.0, 0.0, 1.0).value;
  const double l2 = spacetime_norm(tr, 2.0, 0.0, 1.0).value;
  const double linf = spacetime_norm(tr, kInf, 0.0, 1.0).value;
  CHECK(l2 * l2 <= l1 * linf + 1e-12);
}

TEST_CASE("time quadrature: bad arguments are rejected") {
  const NormTrace tr = ramp_trace(4);
  CHECK_THROWS_AS(spacetime_norm(tr, 1.0, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(spacetime_norm(tr, 1.0, -0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(spacetime_norm(tr, 1.0, 0.5, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(spacetime_norm(tr, 0.5, 0.0, 1.0), std::invalid_argument);
  NormTrace one;
  one.t = {0.0};
  one.value = {1.0};
  CHECK_THROWS_AS(spacetime_norm(one, 1.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("norm traces: a single standing mode has an explicit norm history") {
  const double k = 3.0, L = 2.0 * M_PI;
  Trajectory traj = cosine_trajectory(k, 0.005, 1.0);
  const NormTrace pos = space_norm_trace(traj, 2.0, Component::position);
  const NormTrace vel = space_norm_trace(traj, 2.0, Component::velocity);
  REQUIRE(pos.t.size() == traj.times.size());
  for (std::size_t j = 0; j < pos.t.size(); ++j) {
    const double t = pos.t[j];
    CHECK(pos.value[j] ==
          doctest::Approx(std::abs(std::cos(k * t)) * std::sqrt(L / 2.0)).epsilon(1e-11));
    CHECK(vel.value[j] ==
          doctest::Approx(k * std::abs(std::sin(k * t)) * std::sqrt(L / 2.0)).epsilon(1e-11));
  }
  CHECK_THROWS_AS(space_norm_trace(Trajectory{}, 2.0, Component::position),
                  std::invalid_argument);
}

TEST_CASE("subdivision: greedy cuts keep every piece below the threshold") {
  const NormTrace tc = const_trace(50, 1.0);
  const double eta = 0.1;
  const IntervalPartition part = subdivide_until_small(tc, 0.0, 1.0, eta, 64);
  REQUIRE(!part.budget_exceeded);
  REQUIRE(part.cuts.size() >= 2);
  CHECK(part.cuts.front() == doctest::Approx(0.0));
  CHECK(part.cuts.back() == doctest::Approx(1.0));
  for (std::size_t j = 0; j + 1 < part.cuts.size(); ++j) {
    CHECK(part.cuts[j] < part.cuts[j + 1]);
    const double piece = spacetime_norm(tc, tc.q, part.cuts[j], part.cuts[j + 1]).value;
    CHECK(piece <= 4.0 * eta + 1e-12);
  }
  // constant trace: each piece may take length up to (4 eta)^2, so at least
  // ceil(1 / 0.16) = 7 pieces are needed and the greedy rule needs no more
  CHECK(part.cuts.size() - 1 == 7);

  const IntervalPartition tight = subdivide_until_small(tc, 0.0, 1.0, eta, 3);
  CHECK(tight.budget_exceeded);

  CHECK_THROWS_AS(subdivide_until_small(tc, 0.0, 1.0, 0.0, 8), std::invalid_argument);
}

TEST_CASE("smallness check: interval norms against the K |I|^theta envelope") {
  Trajectory traj = cosine_trajectory(2.0, 0.005, 1.0);
  NormTrace tr = space_norm_trace(traj, 2.0, Component::position);
  tr.q = 2.0;

  const double tau = 0.25, theta = 0.5;
  const SmallnessReport good = smallness_condition(tr, 1.0, 50.0, theta, tau);
  REQUIRE(good.interval_value.size() == 4);
  REQUIRE(good.interval_bound.size() == 4);
  CHECK(good.all_ok);
  for (std::size_t j = 0; j < 4; ++j) {
    const double a = tau * static_cast<double>(j);
    const double direct = spacetime_norm(tr, 2.0, a, a + tau).value;
    CHECK(good.interval_value[j] == doctest::Approx(direct).epsilon(1e-13));
    CHECK(good.interval_bound[j] == doctest::Approx(50.0 * std::pow(tau, theta)).epsilon(1e-13));
  }

  const SmallnessReport bad = smallness_condition(tr, 1.0, 1e-6, theta, tau);
  CHECK(!bad.all_ok);

  CHECK_THROWS_AS(smallness_condition(tr, -1.0, 1.0, theta, tau), std::invalid_argument);
}

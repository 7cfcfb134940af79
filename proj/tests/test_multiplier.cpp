#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "doctest.h"
#include "rwave/field.hpp"
#include "rwave/multiplier.hpp"
#include "rwave/propagator.hpp"
#include "rwave/rng.hpp"

using namespace rwave;

namespace {

Field random_field(const GridSpec& g, std::uint64_t seed) {
  rng::Stream st(seed, {3});
  std::vector<double> v(static_cast<std::size_t>(g.total()));
  for (auto& x : v) x = st.next_gaussian();
  return Field::from_physical(g, v);
}

}  // namespace

TEST_CASE("band symbol: frozen values of the radial step") {
  // independent numerical evaluation of the designed C-infinity step
  CHECK(lp_phi(1.0) == 1.0);
  CHECK(lp_phi(1.25) == 1.0);
  CHECK(lp_phi(1.6) == 0.0);
  CHECK(lp_phi(2.0) == 0.0);
  CHECK(lp_phi(1.5) == doctest::Approx(0.10909682119561329).epsilon(1e-12));
  CHECK(lp_phi(1.4) == doctest::Approx(0.6418340450887321).epsilon(1e-12));
  // monotone on the transition
  double prev = 1.0;
  for (double x = 1.25; x <= 1.61; x += 0.01) {
    const double v = lp_phi(x);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  // exact band at N=2 evaluated at |xi| = 3: upper cutoff already vanished
  CHECK(lp_symbol(3.0, 2.0, BandMode::exact) ==
        doctest::Approx(0.10909682119561329).epsilon(1e-12));
}

TEST_CASE("band symbol: dyadic partition of unity and telescoping") {
  CHECK(is_dyadic(1.0));
  CHECK(is_dyadic(1024.0));
  CHECK_FALSE(is_dyadic(3.0));
  CHECK_FALSE(is_dyadic(0.5));

  rng::Stream st(77, {4});
  for (int trial = 0; trial < 200; ++trial) {
    const double xi = 40.0 * st.next_unit();
    double sum = 0.0;
    for (double N = 1.0; N <= 64.0; N *= 2.0) sum += lp_symbol(xi, N, BandMode::exact);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));  // 1.25*64 > 40
    for (double N : {1.0, 2.0, 8.0}) {
      double tele = 0.0;
      for (double M = 1.0; M <= N; M *= 2.0) tele += lp_symbol(xi, M, BandMode::exact);
      CHECK(tele == doctest::Approx(lp_symbol(xi, N, BandMode::at_most)).epsilon(1e-12));
      if (N >= 2.0)
        CHECK(lp_symbol(xi, N, BandMode::at_least) +
                  lp_symbol(xi, N / 2.0, BandMode::at_most) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("band projection: fields split and reassemble exactly") {
  const GridSpec g = make_grid(3, 16, 8.0, 2.0);
  const Field f = random_field(g, 5);
  const double full = lp_full_band(g);
  CHECK(is_dyadic(full));
  CHECK(1.25 * full >= g.xi_max());

  std::vector<cx> sum(static_cast<std::size_t>(g.total()), cx(0, 0));
  for (double N = 1.0; N <= full; N *= 2.0) {
    const Field piece = littlewood_paley_project(f, N, BandMode::exact);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += piece.spectral()[i];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < sum.size(); ++i)
    worst = std::max(worst, std::abs(sum[i] - f.spectral()[i]));
  CHECK(worst < 1e-12);

  CHECK_THROWS_AS(littlewood_paley_project(f, 3.0, BandMode::exact),
                  std::invalid_argument);
}

TEST_CASE("band projection commutes with the wave group") {
  const GridSpec g = make_grid(2, 16, 4.0, 2.0);
  const FieldPair p{random_field(g, 6), random_field(g, 7)};
  const double t = 0.37;
  for (double N : {2.0, 4.0}) {
    const FieldPair evolved = linear_propagate(p, t);
    const Field a = littlewood_paley_project(evolved.u, N, BandMode::exact);
    const FieldPair projected{littlewood_paley_project(p.u, N, BandMode::exact),
                              littlewood_paley_project(p.ut, N, BandMode::exact)};
    const Field b = linear_propagate(projected, t).u;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.spectral().size(); ++i)
      worst = std::max(worst, std::abs(a.spectral()[i] - b.spectral()[i]));
    CHECK(worst < 1e-13);
  }
}

TEST_CASE("cube window: normalized partition and symmetric labels") {
  rng::Stream st(13, {6});
  for (int trial = 0; trial < 300; ++trial) {
    const double t = 20.0 * (st.next_unit() - 0.5);
    double sum = 0.0;
    const int base = static_cast<int>(std::floor(t));
    for (int m = base - 2; m <= base + 2; ++m) sum += cube_psi1(t - m);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(cube_psi1(0.0) > 0.9);  // window is centered and near-flat at 0
  CHECK(cube_psi1(1.0) == 0.0);

  CHECK(cube_coord(0.3) == 0);
  CHECK(cube_coord(0.6) == 1);
  CHECK(cube_coord(-0.6) == -1);
  CHECK(cube_coord(0.5) == 1);
  CHECK(cube_coord(-0.5) == -1);  // ties round away from zero: odd under negation
  CHECK(cube_coord(1.5) == 2);
  CHECK(cube_coord(-1.5) == -2);
}

TEST_CASE("cube enumeration: integer lattice occupies exactly the band labels") {
  const GridSpec g = make_grid(1, 8, 2.0 * M_PI, 2.0);  // frequencies -4..3
  for (CubeCutoff c : {CubeCutoff::sharp, CubeCutoff::smooth}) {
    const CubeSet set = enumerate_cubes(g, c);
    CHECK(set.cubes.size() == 8);
    CHECK(set.skipped == 2 * set.radius + 1 - 8);
    for (const auto& n : set.cubes) {
      CHECK(n[0] >= -4);
      CHECK(n[0] <= 3);
    }
  }
}

TEST_CASE("cube projections reassemble the field") {
  for (double L : {2.0 * M_PI, 8.0}) {
    const GridSpec g = make_grid(2, 8, L, 2.0);
    const Field f = random_field(g, 21);
    for (CubeCutoff c : {CubeCutoff::sharp, CubeCutoff::smooth}) {
      const CubeSet set = enumerate_cubes(g, c);
      std::vector<cx> sum(static_cast<std::size_t>(g.total()), cx(0, 0));
      for (const auto& n : set.cubes) {
        const Field piece = cube_project(f, n, c);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += piece.spectral()[i];
      }
      double worst = 0.0;
      for (std::size_t i = 0; i < sum.size(); ++i)
        worst = std::max(worst, std::abs(sum[i] - f.spectral()[i]));
      CHECK(worst < 1e-12);
    }
  }
}

TEST_CASE("cube projection rejects labels with no lattice overlap") {
  const GridSpec g = make_grid(1, 8, 2.0 * M_PI, 2.0);
  const Field f = random_field(g, 30);
  CHECK_THROWS_AS(cube_project(f, {100, 0, 0}, CubeCutoff::sharp),
                  std::invalid_argument);
}

TEST_CASE("sobolev norms: closed forms for a single cosine") {
  const double L = 2.0 * M_PI;
  const GridSpec g = make_grid(1, 32, L, 2.0);
  std::vector<double> v(32);
  for (int i = 0; i < 32; ++i)
    v[static_cast<std::size_t>(i)] = std::cos(-L / 2 + g.dx() * i);
  const Field f = Field::from_physical(g, v);

  const auto h0 = sobolev_norm(f, 0.0, Homogeneity::inhomogeneous);
  CHECK(h0.value == doctest::Approx(std::sqrt(L / 2.0)).epsilon(1e-12));
  const auto h1h = sobolev_norm(f, 1.0, Homogeneity::homogeneous);
  CHECK(h1h.value == doctest::Approx(std::sqrt(L / 2.0)).epsilon(1e-12));  // |xi| = 1
  const auto h1 = sobolev_norm(f, 1.0, Homogeneity::inhomogeneous);
  CHECK(h1.value == doctest::Approx(std::sqrt(2.0) * std::sqrt(L / 2.0)).epsilon(1e-12));
  CHECK(h0.zero_mode == doctest::Approx(0.0));

  // constant shifts move only the zero-mode report of the homogeneous norm
  std::vector<double> w = v;
  for (auto& x : w) x += 2.0;
  const Field fs = Field::from_physical(g, w);
  const auto h1hs = sobolev_norm(fs, 1.0, Homogeneity::homogeneous);
  CHECK(h1hs.value == doctest::Approx(h1h.value).epsilon(1e-12));
  CHECK(h1hs.zero_mode == doctest::Approx(2.0 * std::sqrt(L)).epsilon(1e-12));
}

TEST_CASE("lebesgue norms: closed forms for a single cosine") {
  const double L = 2.0 * M_PI;
  const GridSpec g = make_grid(1, 64, L, 2.0);
  std::vector<double> v(64);
  for (int i = 0; i < 64; ++i)
    v[static_cast<std::size_t>(i)] = std::cos(-L / 2 + g.dx() * i);
  const Field f = Field::from_physical(g, v);
  // integral of cos^4 = 3L/8, cos^6 = 5L/16; both are trig polynomials the
  // lattice quadrature integrates exactly
  CHECK(lebesgue_norm(f, 2.0) == doctest::Approx(std::sqrt(L / 2.0)).epsilon(1e-13));
  CHECK(lebesgue_norm(f, 4.0) ==
        doctest::Approx(std::pow(3.0 * L / 8.0, 0.25)).epsilon(1e-13));
  CHECK(lebesgue_norm(f, 6.0) ==
        doctest::Approx(std::pow(5.0 * L / 16.0, 1.0 / 6.0)).epsilon(1e-13));
  CHECK(lebesgue_norm(f, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(lebesgue_norm(f, 0.5), std::invalid_argument);
}

TEST_CASE("bernstein: band-limited fields obey the interpolation ratio") {
  const GridSpec g = make_grid(3, 16, 8.0, 2.0);
  const Field f = random_field(g, 55);
  for (double N : {2.0, 4.0}) {
    const Field banded = littlewood_paley_project(f, N, BandMode::at_most);
    const double l6 = lebesgue_norm(banded, 6.0);
    const double l2 = lebesgue_norm(banded, 2.0);
    // d(1/2 - 1/6) = 1 in three dimensions
    CHECK(l6 / l2 < 5.0 * std::pow(1.6 * N, 1.0));
  }
}

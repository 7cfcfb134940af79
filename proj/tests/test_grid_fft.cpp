#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "doctest.h"
#include "rwave/fft.hpp"
#include "rwave/field.hpp"
#include "rwave/grid.hpp"
#include "rwave/kernels.hpp"
#include "rwave/rng.hpp"

using namespace rwave;

namespace {

std::vector<cx> random_spectrum(std::size_t n, std::uint64_t seed) {
  rng::Stream st(seed, {1});
  std::vector<cx> v(n);
  for (auto& z : v) z = cx(st.next_gaussian(), st.next_gaussian());
  return v;
}

std::vector<double> random_real(std::size_t n, std::uint64_t seed) {
  rng::Stream st(seed, {2});
  std::vector<double> v(n);
  for (auto& x : v) x = st.next_gaussian();
  return v;
}

}  // namespace

TEST_CASE("grid: 8-point unit-spacing line") {
  const GridSpec g = make_grid(1, 8, 2.0 * M_PI, 1.0);
  CHECK(g.total() == 8);
  CHECK(g.freq_spacing() == doctest::Approx(1.0).epsilon(1e-15));
  const int expect[8] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (int i = 0; i < 8; ++i) CHECK(g.wavenumber(i) == expect[i]);
  CHECK(g.dx() == doctest::Approx(2.0 * M_PI / 8.0));
  CHECK(g.xi_max_axis() == doctest::Approx(4.0));
  CHECK(g.freq_norm(4) == doctest::Approx(4.0));
  CHECK(g.freq_bracket(0) == doctest::Approx(1.0));
  CHECK(g.freq_bracket(1) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("grid: unravel and frequency vectors in 3d") {
  const GridSpec g = make_grid(3, 8, 4.0, 2.0);
  // flat index round trip
  for (std::int64_t idx : {0LL, 7LL, 63LL, 100LL, 511LL}) {
    const auto a = g.unravel(idx);
    const std::int64_t back =
        (static_cast<std::int64_t>(a[0]) * 8 + a[1]) * 8 + a[2];
    CHECK(back == idx);
  }
  const auto f = g.freq_of(8 * 8 * 1 + 8 * 2 + 3);
  CHECK(f[0] == doctest::Approx(g.freq(1)));
  CHECK(f[1] == doctest::Approx(g.freq(2)));
  CHECK(f[2] == doctest::Approx(g.freq(3)));
  CHECK(g.xi_max() == doctest::Approx(g.xi_max_axis() * std::sqrt(3.0)));
}

TEST_CASE("grid: validation rejects bad shapes") {
  CHECK_THROWS_AS(make_grid(0, 8, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(4, 8, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(3, 12, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(3, 4, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(3, 16, 0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(3, 16, -1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(3, 16, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("fft: backward(forward(x))/n is the identity") {
  for (int dim = 1; dim <= 3; ++dim) {
    const int n = dim == 1 ? 32 : (dim == 2 ? 16 : 8);
    std::int64_t total = 1;
    for (int a = 0; a < dim; ++a) total *= n;
    const auto in = random_spectrum(static_cast<std::size_t>(total), 11 + dim);
    std::vector<cx> mid(in.size()), out(in.size());
    fft::forward(dim, n, in.data(), mid.data());
    fft::backward(dim, n, mid.data(), out.data());
    double worst = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i)
      worst = std::max(worst, std::abs(out[i] / static_cast<double>(total) - in[i]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("fft: in-place execution is rejected") {
  std::vector<cx> buf(32);
  CHECK_THROWS_AS(fft::forward(1, 32, buf.data(), buf.data()), std::invalid_argument);
  CHECK_THROWS_AS(fft::backward(1, 32, buf.data(), buf.data()), std::invalid_argument);
}

TEST_CASE("field: cosine mode has the textbook spectrum and norms") {
  const double L = 2.0 * M_PI;
  const GridSpec g = make_grid(1, 64, L, 2.0);
  // sample index j carries phase 2*pi*j/n, so a pure cosine splits into
  // exactly +1/2 at the +-1 modes
  std::vector<double> vals(64);
  for (int i = 0; i < 64; ++i)
    vals[static_cast<std::size_t>(i)] = std::cos(2.0 * M_PI * i / 64.0);
  const Field f = Field::from_physical(g, vals);
  const auto& sp = f.spectral();
  CHECK(std::abs(sp[1] - cx(0.5, 0.0)) < 1e-14);
  CHECK(std::abs(sp[63] - cx(0.5, 0.0)) < 1e-14);
  double rest = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i)
    if (i != 1 && i != 63) rest = std::max(rest, std::abs(sp[i]));
  CHECK(rest < 1e-14);
  // |cos|_{L^2}^2 = L/2
  CHECK(f.l2_norm() == doctest::Approx(std::sqrt(L / 2.0)).epsilon(1e-13));
}

TEST_CASE("field: Parseval ties physical and spectral sums") {
  const GridSpec g = make_grid(2, 16, 3.0, 2.0);
  const auto vals = random_real(static_cast<std::size_t>(g.total()), 5);
  const Field f = Field::from_physical(g, vals);
  double phys = 0.0;
  for (double v : vals) phys += v * v;
  phys *= g.cell_volume();
  double spec = 0.0;
  for (const auto& z : f.spectral()) spec += std::norm(z);
  spec *= std::pow(g.box, g.dim);
  CHECK(phys == doctest::Approx(spec).epsilon(1e-12));
  CHECK(f.l2_norm() == doctest::Approx(std::sqrt(phys)).epsilon(1e-12));
}

TEST_CASE("field: physical values round-trip through the spectrum") {
  const GridSpec g = make_grid(3, 8, 5.0, 2.0);
  const auto vals = random_real(static_cast<std::size_t>(g.total()), 17);
  const Field f = Field::from_physical(g, vals);
  const auto& back = f.physical();
  double worst = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i)
    worst = std::max(worst, std::abs(back[i] - vals[i]));
  CHECK(worst < 1e-12);
  CHECK(f.imag_residue() < 1e-12);
  CHECK(f.finite());
}

TEST_CASE("field: a non-Hermitian spectrum refuses to produce real values") {
  const GridSpec g = make_grid(1, 16, 1.0, 2.0);
  std::vector<cx> sp(16, cx(0.0, 0.0));
  sp[3] = cx(1.0, 0.5);  // no conjugate partner at -3
  const Field f = Field::from_spectral(g, sp);
  CHECK_THROWS_WITH_AS(static_cast<void>(f.physical()),
                       doctest::Contains("Hermitian"), std::runtime_error);
}

TEST_CASE("kernels: serial and dispatched flavours agree bit for bit") {
  const std::size_t n = 100000;
  const auto a = random_spectrum(n, 23);
  std::vector<double> re(n);
  for (std::size_t i = 0; i < n; ++i) re[i] = a[i].real();

  CHECK(kernels::sum_sq_serial(a.data(), n) == kernels::sum_sq_omp(a.data(), n));
  CHECK(kernels::sum_abs_pow_serial(re.data(), n, 6.0) ==
        kernels::sum_abs_pow_omp(re.data(), n, 6.0));
  CHECK(kernels::max_abs_serial(re.data(), n) == kernels::max_abs_omp(re.data(), n));
  CHECK(kernels::max_abs_imag_serial(a.data(), n) ==
        kernels::max_abs_imag_omp(a.data(), n));

  // the dispatched name follows the policy and both policies agree bitwise
  kernels::set_exec_policy(kernels::Exec::serial);
  const double s_sum = kernels::sum_sq(a.data(), n);
  kernels::set_exec_policy(kernels::Exec::openmp);
  CHECK(kernels::sum_sq(a.data(), n) == s_sum);
}

TEST_CASE("kernels: fast integer powers match the generic path") {
  const std::size_t n = 4097;  // exercises the tail of the last block
  const auto re = random_real(n, 31);
  for (double p : {1.0, 2.0, 4.0, 5.0, 6.0, 10.0}) {
    double direct = 0.0;
    for (std::size_t i = 0; i < n; ++i) direct += std::pow(std::abs(re[i]), p);
    CHECK(kernels::sum_abs_pow(re.data(), n, p) ==
          doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("kernels: quintic of a sum expands correctly") {
  const std::size_t n = 257;
  const auto u = random_real(n, 41);
  const auto f = random_real(n, 43);
  std::vector<double> out(n);
  kernels::pow5_sum(out.data(), u.data(), f.data(), n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = u[i] + f[i];
    const double ref = s * s * s * s * s;
    worst = std::max(worst, std::abs(out[i] - ref) / (1.0 + std::abs(ref)));
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("kernels: non-finite values are detected") {
  std::vector<cx> v(100, cx(1.0, 2.0));
  CHECK_FALSE(kernels::any_non_finite(v.data(), v.size()));
  v[57] = cx(1.0, std::numeric_limits<double>::quiet_NaN());
  CHECK(kernels::any_non_finite(v.data(), v.size()));
  v[57] = cx(std::numeric_limits<double>::infinity(), 0.0);
  CHECK(kernels::any_non_finite(v.data(), v.size()));
}

TEST_CASE("rng: streams are pure functions of seed and salts") {
  rng::Stream a(99, {1, 2}), b(99, {1, 2}), c(99, {1, 3});
  for (int i = 0; i < 100; ++i) {
    const double x = a.next_gaussian();
    CHECK(x == b.next_gaussian());
    (void)c.next_gaussian();
  }
  rng::Stream a2(99, {1, 2}), c2(99, {1, 3});
  bool differ = false;
  for (int i = 0; i < 8; ++i) differ = differ || a2.next_u64() != c2.next_u64();
  CHECK(differ);
}

TEST_CASE("rng: unit draws stay in [0,1) and gaussians have sane moments") {
  rng::Stream st(7, {5});
  double mean = 0.0, var = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = st.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double z = st.next_gaussian();
    mean += z;
    var += z * z;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));
}

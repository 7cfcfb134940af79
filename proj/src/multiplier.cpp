#include "rwave/multiplier.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rwave/kernels.hpp"

namespace rwave {

namespace {

// C-infinity step: 0 for t <= 0, 1 for t >= 1
double smooth_step(double t) {
  auto h = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  const double a = h(t), b = h(1.0 - t);
  return a / (a + b);
}

double bump(double t) {
  const double s = 1.0 - t * t;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

std::vector<double> radial_symbol(const GridSpec& g, double N, BandMode mode) {
  std::vector<double> sym(g.total());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < g.total(); ++i)
    sym[i] = lp_symbol(g.freq_norm(i), N, mode);
  return sym;
}

}  // namespace

void Multiplier::apply_inplace(Field& f) const {
  if (!f.grid().same_shape(grid))
    throw std::invalid_argument("Multiplier: grid mismatch");
  auto& spec = f.spectral_mut();
  kernels::apply_real_symbol(spec.data(), symbol.data(), spec.size());
}

Field Multiplier::applied(const Field& f) const {
  Field out = f;
  apply_inplace(out);
  return out;
}

double lp_phi(double x) {
  x = std::fabs(x);
  if (x <= 1.25) return 1.0;
  if (x >= 1.6) return 0.0;
  return smooth_step((1.6 - x) / 0.35);
}

bool is_dyadic(double N) {
  if (N < 1.0) return false;
  double m = N;
  while (m > 1.0) m /= 2.0;
  return m == 1.0;
}

double lp_symbol(double xi_norm, double N, BandMode mode) {
  switch (mode) {
    case BandMode::exact:
      return N == 1.0 ? lp_phi(xi_norm)
                      : lp_phi(xi_norm / N) - lp_phi(2.0 * xi_norm / N);
    case BandMode::at_most:
      return lp_phi(xi_norm / N);
    case BandMode::at_least:
      return N == 1.0 ? 1.0 : 1.0 - lp_phi(2.0 * xi_norm / N);
  }
  return 0.0;
}

Multiplier make_lp_multiplier(const GridSpec& g, double N, BandMode mode) {
  if (!is_dyadic(N))
    throw std::invalid_argument("littlewood_paley: N must be dyadic (1, 2, 4, ...)");
  return Multiplier{g, radial_symbol(g, N, mode)};
}

double lp_full_band(const GridSpec& g) {
  double N = 1.0;
  while (1.25 * N < g.xi_max()) N *= 2.0;
  return N;
}

Field littlewood_paley_project(const Field& f, double N, BandMode mode) {
  return make_lp_multiplier(f.grid(), N, mode).applied(f);
}

double cube_psi1(double t) {
  const double num = bump(t);
  if (num == 0.0) return 0.0;
  const int m0 = static_cast<int>(std::floor(t)) - 1;
  double den = 0.0;
  for (int m = m0; m <= m0 + 3; ++m) den += bump(t - m);
  return num / den;
}

int cube_coord(double t) {
  return t >= 0.0 ? static_cast<int>(std::floor(t + 0.5))
                  : -static_cast<int>(std::floor(-t + 0.5));
}

namespace {

// per-axis cube labels that meet the lattice, as a bitmap over [-radius, radius]
std::vector<char> axis_occupancy(const GridSpec& g, int radius, CubeCutoff cutoff) {
  std::vector<char> occ(2 * radius + 1, 0);
  for (int i = 0; i < g.points; ++i) {
    const double xi = g.freq(i);
    if (cutoff == CubeCutoff::sharp) {
      const int n = cube_coord(xi);
      if (std::abs(n) <= radius) occ[n + radius] = 1;
    } else {
      for (int n = cube_coord(xi) - 1; n <= cube_coord(xi) + 1; ++n)
        if (std::abs(n) <= radius && bump(xi - n) > 0.0) occ[n + radius] = 1;
    }
  }
  return occ;
}

int cube_radius(const GridSpec& g) {
  return static_cast<int>(std::ceil(g.xi_max_axis())) + 1;
}

}  // namespace

CubeSet enumerate_cubes(const GridSpec& g, CubeCutoff cutoff) {
  CubeSet set;
  set.radius = cube_radius(g);
  const auto occ = axis_occupancy(g, set.radius, cutoff);
  const int B = set.radius;
  const int lo = -B, hi = B;
  std::array<int, 3> n{0, 0, 0};
  std::int64_t total = 1;
  for (int a = 0; a < g.dim; ++a) total *= (2 * B + 1);

  // odometer over [-B, B]^dim; unused axes stay at 0
  std::vector<int> idx(g.dim, lo);
  for (std::int64_t c = 0; c < total; ++c) {
    bool ok = true;
    for (int a = 0; a < g.dim; ++a) {
      n[a] = idx[a];
      if (!occ[idx[a] + B]) ok = false;
    }
    if (ok) set.cubes.push_back(n);  // unused axes keep their zero init
    for (int a = g.dim - 1; a >= 0; --a) {
      if (++idx[a] <= hi) break;
      idx[a] = lo;
    }
  }
  set.skipped = total - static_cast<std::int64_t>(set.cubes.size());
  return set;
}

Field cube_project(const Field& f, const std::array<int, 3>& n, CubeCutoff cutoff) {
  const GridSpec& g = f.grid();
  const int B = cube_radius(g);
  const auto occ = axis_occupancy(g, B, cutoff);
  for (int a = 0; a < g.dim; ++a) {
    if (std::abs(n[a]) > B || !occ[n[a] + B])
      throw std::invalid_argument("cube_project: cube meets no lattice frequency");
  }
  for (int a = g.dim; a < 3; ++a)
    if (n[a] != 0) throw std::invalid_argument("cube_project: cube label outside grid dim");

  std::vector<double> sym(g.total());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < g.total(); ++i) {
    const auto xi = g.freq_of(i);
    double v = 1.0;
    if (cutoff == CubeCutoff::sharp) {
      for (int a = 0; a < g.dim; ++a)
        if (cube_coord(xi[a]) != n[a]) v = 0.0;
    } else {
      for (int a = 0; a < g.dim; ++a) v *= cube_psi1(xi[a] - n[a]);
    }
    sym[i] = v;
  }
  return Multiplier{g, std::move(sym)}.applied(f);
}

SobolevNorm sobolev_norm(const Field& f, double s, Homogeneity h) {
  const GridSpec& g = f.grid();
  const auto& spec = f.spectral();
  double vol = 1.0;
  for (int a = 0; a < g.dim; ++a) vol *= g.box;

  double sq;
  if (h == Homogeneity::inhomogeneous) {
    sq = kernels::blocked_sum(spec.size(), [&](std::size_t i) {
      const double w = std::pow(g.freq_bracket(i), s);
      return w * w * std::norm(spec[i]);
    });
  } else {
    sq = kernels::blocked_sum(spec.size(), [&](std::size_t i) {
      const double r = g.freq_norm(i);
      if (r == 0.0) return 0.0;
      const double w = std::pow(r, s);
      return w * w * std::norm(spec[i]);
    });
  }
  SobolevNorm out;
  out.value = std::sqrt(vol * sq);
  out.zero_mode = std::sqrt(vol) * std::abs(spec[0]);
  return out;
}

SobolevNorm sobolev_pair_norm(const FieldPair& p, double s, Homogeneity h) {
  const SobolevNorm a = sobolev_norm(p.u, s, h);
  const SobolevNorm b = sobolev_norm(p.ut, s - 1.0, h);
  SobolevNorm out;
  out.value = std::sqrt(a.value * a.value + b.value * b.value);
  out.zero_mode = std::sqrt(a.zero_mode * a.zero_mode + b.zero_mode * b.zero_mode);
  return out;
}

double lebesgue_norm(const Field& f, double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("lebesgue_norm: r must be >= 1");
  const auto& u = f.physical();
  if (std::isinf(r)) return kernels::max_abs(u.data(), u.size());
  const double sum = kernels::sum_abs_pow(u.data(), u.size(), r);
  return std::pow(f.grid().cell_volume() * sum, 1.0 / r);
}

}  // namespace rwave

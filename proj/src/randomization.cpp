#include "rwave/randomization.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rwave/kernels.hpp"
#include "rwave/rng.hpp"

#include <nlohmann/json.hpp>

namespace rwave {

namespace {

std::uint64_t pack_label(const std::array<int, 3>& n) {
  // 21 bits per signed coordinate, biased
  auto enc = [](int v) { return static_cast<std::uint64_t>(v + (1 << 20)) & 0x1fffffULL; };
  return (enc(n[0]) << 42) | (enc(n[1]) << 21) | enc(n[2]);
}

}  // namespace

std::string to_string(DistributionKind k) {
  switch (k) {
    case DistributionKind::gaussian: return "gaussian";
    case DistributionKind::rademacher: return "rademacher";
    case DistributionKind::uniform_disk: return "uniform-disk";
  }
  return "?";
}

DistributionKind distribution_from_string(const std::string& s) {
  if (s == "gaussian") return DistributionKind::gaussian;
  if (s == "rademacher") return DistributionKind::rademacher;
  if (s == "uniform-disk") return DistributionKind::uniform_disk;
  throw std::invalid_argument("unknown distribution: " + s);
}

bool in_half_lattice(const std::array<int, 3>& n, int dim) {
  for (int a = dim - 1; a >= 0; --a) {
    if (n[a] > 0) return true;
    if (n[a] < 0) return false;
  }
  return false;  // zero label
}

std::uint64_t member_seed(std::uint64_t master, int member) {
  return rng::mix64(master ^ rng::mix64(static_cast<std::uint64_t>(member) + 1));
}

cx draw_coefficient(DistributionKind kind, std::uint64_t seed, int component,
                    const std::array<int, 3>& n) {
  bool zero = n[0] == 0 && n[1] == 0 && n[2] == 0;
  std::array<int, 3> canon = n;
  bool mirrored = false;
  if (!zero && !in_half_lattice(n, 3)) {
    canon = {-n[0], -n[1], -n[2]};
    mirrored = true;
  }
  rng::Stream st(seed, {static_cast<std::uint64_t>(component) + 11ULL, pack_label(canon)});
  cx g;
  switch (kind) {
    case DistributionKind::gaussian:
      if (zero) {
        g = cx(st.next_gaussian(), 0.0);
      } else {
        g = cx(st.next_gaussian() * M_SQRT1_2, st.next_gaussian() * M_SQRT1_2);
      }
      break;
    case DistributionKind::rademacher:
      if (zero) {
        g = cx(st.next_sign() ? 1.0 : -1.0, 0.0);
      } else {
        g = cx(st.next_sign() ? M_SQRT1_2 : -M_SQRT1_2,
               st.next_sign() ? M_SQRT1_2 : -M_SQRT1_2);
      }
      break;
    case DistributionKind::uniform_disk:
      if (zero) {
        g = cx((2.0 * st.next_unit() - 1.0) * std::sqrt(3.0), 0.0);
      } else {
        const double rad = std::sqrt(2.0 * st.next_unit());
        const double ang = 2.0 * M_PI * st.next_unit();
        g = cx(rad * std::cos(ang), rad * std::sin(ang));
      }
      break;
  }
  return mirrored ? std::conj(g) : g;
}

const cx& RandomCoefficients::coeff(int component, const std::array<int, 3>& n) const {
  const int side = 2 * radius + 1;
  std::int64_t idx = 0;
  for (int a = 0; a < grid.dim; ++a) idx = idx * side + (n[a] + radius);
  return table[component][idx];
}

std::int64_t RandomCoefficients::box_count() const {
  const int side = 2 * radius + 1;
  std::int64_t t = 1;
  for (int a = 0; a < grid.dim; ++a) t *= side;
  return t;
}

std::string RandomCoefficients::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["distribution"] = to_string(kind);
  j["grid"] = {{"dim", grid.dim},
               {"points", grid.points},
               {"box", grid.box},
               {"dealias_ratio", grid.dealias_ratio}};
  j["radius"] = radius;
  j["skipped_cubes"] = skipped_cubes;
  return j.dump(2);
}

RandomCoefficients RandomCoefficients::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const auto& jg = j.at("grid");
  const GridSpec g = make_grid(jg.at("dim").get<int>(), jg.at("points").get<int>(),
                               jg.at("box").get<double>(),
                               jg.at("dealias_ratio").get<double>());
  return sample_coefficients(g, distribution_from_string(j.at("distribution").get<std::string>()),
                             j.at("seed").get<std::uint64_t>());
}

RandomCoefficients sample_coefficients(const GridSpec& g, DistributionKind kind,
                                       std::uint64_t seed) {
  RandomCoefficients rc;
  rc.grid = g;
  rc.kind = kind;
  rc.seed = seed;
  rc.radius = static_cast<int>(std::ceil(g.xi_max_axis())) + 1;
  rc.skipped_cubes = enumerate_cubes(g, CubeCutoff::smooth).skipped;

  const int side = 2 * rc.radius + 1;
  std::int64_t total = 1;
  for (int a = 0; a < g.dim; ++a) total *= side;

  for (int comp = 0; comp < 2; ++comp) {
    rc.table[comp].resize(total);
#pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < total; ++idx) {
      std::array<int, 3> n{0, 0, 0};
      std::int64_t rem = idx;
      for (int a = g.dim - 1; a >= 0; --a) {
        n[a] = static_cast<int>(rem % side) - rc.radius;
        rem /= side;
      }
      rc.table[comp][idx] = draw_coefficient(kind, seed, comp, n);
    }
  }
  return rc;
}

std::vector<cx> randomization_gain(const RandomCoefficients& coeffs, int component,
                                   CubeCutoff cutoff) {
  const GridSpec& g = coeffs.grid;

  // per-axis list of (label, window value) pairs touching each lattice frequency
  struct AxisEntry {
    int count = 0;
    int label[3];
    double w[3];
  };
  std::vector<AxisEntry> axis(g.points);
  for (int i = 0; i < g.points; ++i) {
    const double xi = g.freq(i);
    const int c = cube_coord(xi);
    AxisEntry e;
    if (cutoff == CubeCutoff::sharp) {
      e.label[0] = c;
      e.w[0] = 1.0;
      e.count = 1;
    } else {
      for (int m = c - 1; m <= c + 1; ++m) {
        const double v = cube_psi1(xi - m);
        if (v > 0.0) {
          e.label[e.count] = m;
          e.w[e.count] = v;
          ++e.count;
        }
      }
    }
    axis[i] = e;
  }

  std::vector<cx> gain(g.total());
#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < g.total(); ++idx) {
    const auto iv = g.unravel(idx);
    cx sum{0.0, 0.0};
    std::array<int, 3> n{0, 0, 0};
    const AxisEntry* e0 = &axis[iv[0]];
    const AxisEntry* e1 = g.dim > 1 ? &axis[iv[1]] : nullptr;
    const AxisEntry* e2 = g.dim > 2 ? &axis[iv[2]] : nullptr;
    for (int a = 0; a < e0->count; ++a) {
      n[0] = e0->label[a];
      const double wa = e0->w[a];
      if (!e1) {
        sum += wa * coeffs.coeff(component, n);
        continue;
      }
      for (int b = 0; b < e1->count; ++b) {
        n[1] = e1->label[b];
        const double wb = wa * e1->w[b];
        if (!e2) {
          sum += wb * coeffs.coeff(component, n);
          continue;
        }
        for (int c = 0; c < e2->count; ++c) {
          n[2] = e2->label[c];
          sum += wb * e2->w[c] * coeffs.coeff(component, n);
        }
      }
    }
    gain[idx] = sum;
  }
  return gain;
}

FieldPair randomize_pair(const FieldPair& p, const RandomCoefficients& coeffs,
                         CubeCutoff cutoff) {
  if (!p.grid().same_shape(coeffs.grid))
    throw std::invalid_argument("randomize_pair: grid mismatch");
  FieldPair out = p;
  for (int comp = 0; comp < 2; ++comp) {
    const auto gain = randomization_gain(coeffs, comp, cutoff);
    auto& spec = (comp == 0 ? out.u : out.ut).spectral_mut();
    kernels::apply_cx_symbol(spec.data(), gain.data(), spec.size());
  }
  return out;
}

FieldPair make_rough_pair(const GridSpec& g, double s, RoughProfile profile,
                          std::uint64_t seed, double eps0) {
  const double d = static_cast<double>(g.dim);
  std::vector<cx> c0(g.total()), c1(g.total());

#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < g.total(); ++idx) {
    const auto iv = g.unravel(idx);
    std::array<int, 3> k{0, 0, 0};
    bool nyquist = false;
    for (int a = 0; a < g.dim; ++a) {
      k[a] = g.wavenumber(iv[a]);
      if (k[a] == -g.points / 2) nyquist = true;
    }
    if (nyquist) {  // unmatched plane: keep spectra exactly Hermitian
      c0[idx] = c1[idx] = cx{0.0, 0.0};
      continue;
    }
    const double br = g.freq_bracket(idx);
    const double a0 = std::pow(br, -s - d / 2.0 - eps0);
    const double a1 = std::pow(br, -(s - 1.0) - d / 2.0 - eps0);
    double theta = 0.0;
    if (profile == RoughProfile::randomized_phase) {
      const bool zero = k[0] == 0 && k[1] == 0 && k[2] == 0;
      if (!zero) {
        std::array<int, 3> canon = k;
        double sign = 1.0;
        if (!in_half_lattice(k, 3)) {
          canon = {-k[0], -k[1], -k[2]};
          sign = -1.0;
        }
        rng::Stream st(seed, {7ULL, pack_label(canon)});
        theta = sign * 2.0 * M_PI * st.next_unit();
      }
    }
    const cx ph{std::cos(theta), std::sin(theta)};
    c0[idx] = a0 * ph;
    c1[idx] = a1 * ph;
  }

  FieldPair out(Field::from_spectral(g, std::move(c0)), Field::from_spectral(g, std::move(c1)));
  const double n0 = sobolev_norm(out.u, s, Homogeneity::inhomogeneous).value;
  const double n1 = sobolev_norm(out.ut, s - 1.0, Homogeneity::inhomogeneous).value;
  kernels::scale(out.u.spectral_mut().data(), 1.0 / n0, out.u.spectral().size());
  kernels::scale(out.ut.spectral_mut().data(), 1.0 / n1, out.ut.spectral().size());
  return out;
}

std::vector<KhintchineRow> khintchine_check(
    DistributionKind kind,
    const std::vector<std::pair<std::array<int, 3>, cx>>& half_coeffs,
    const std::vector<double>& p_list, int samples, std::uint64_t seed) {
  double csq = 0.0;
  for (const auto& [n, c] : half_coeffs) {
    const bool zero = n[0] == 0 && n[1] == 0 && n[2] == 0;
    if (!zero && !in_half_lattice(n, 3))
      throw std::invalid_argument("khintchine_check: labels must lie in the half lattice");
    csq += (zero ? 1.0 : 2.0) * std::norm(c);
  }

  std::vector<double> xs(samples);
#pragma omp parallel for schedule(static)
  for (int m = 0; m < samples; ++m) {
    const std::uint64_t ms = member_seed(seed, m);
    double x = 0.0;
    for (const auto& [n, c] : half_coeffs) {
      const cx gn = draw_coefficient(kind, ms, 0, n);
      const bool zero = n[0] == 0 && n[1] == 0 && n[2] == 0;
      x += zero ? gn.real() * c.real() : 2.0 * (gn * c).real();
    }
    xs[m] = x;
  }

  std::vector<KhintchineRow> rows;
  for (double p : p_list) {
    const double mom = kernels::blocked_sum(
        xs.size(), [&](std::size_t i) { return std::pow(std::fabs(xs[i]), p); });
    KhintchineRow row;
    row.p = p;
    row.moment = std::pow(mom / samples, 1.0 / p);
    row.bound = std::sqrt(p) * std::sqrt(csq);
    row.ratio = row.moment / row.bound;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rwave

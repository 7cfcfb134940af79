#include "rwave/propagator.hpp"

#include <cmath>
#include <stdexcept>

#include "rwave/fft.hpp"
#include "rwave/kernels.hpp"
#include "rwave/multiplier.hpp"

namespace rwave {

namespace {

inline double sinc_t(double t, double w) {  // sin(t w)/w, continued through w = 0
  return w == 0.0 ? t : std::sin(t * w) / w;
}

}  // namespace

FieldPair linear_propagate(const FieldPair& p, double t) {
  const GridSpec& g = p.grid();
  const auto& u0 = p.u.spectral();
  const auto& u1 = p.ut.spectral();
  std::vector<cx> v0(g.total()), v1(g.total());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < g.total(); ++i) {
    const double w = g.freq_norm(i);
    const double c = std::cos(t * w), s = std::sin(t * w);
    v0[i] = c * u0[i] + sinc_t(t, w) * u1[i];
    v1[i] = -w * s * u0[i] + c * u1[i];
  }
  return FieldPair(Field::from_spectral(g, std::move(v0)),
                   Field::from_spectral(g, std::move(v1)));
}

Field tilde_propagate(const FieldPair& p, double t) {
  const GridSpec& g = p.grid();
  const auto& u0 = p.u.spectral();
  const auto& u1 = p.ut.spectral();
  std::vector<cx> v(g.total());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < g.total(); ++i) {
    const double w = g.freq_norm(i);
    const double br = std::sqrt(1.0 + w * w);
    v[i] = (-w / br) * std::sin(t * w) * u0[i] + (std::cos(t * w) / br) * u1[i];
  }
  return Field::from_spectral(g, std::move(v));
}

Field half_wave_propagate(const Field& f, double t, int sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("half_wave_propagate: sign must be +1 or -1");
  const GridSpec& g = f.grid();
  const auto& u = f.spectral();
  std::vector<cx> v(g.total());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < g.total(); ++i) {
    const double ph = sign * t * g.freq_norm(i);
    v[i] = cx(std::cos(ph), std::sin(ph)) * u[i];
  }
  return Field::from_spectral(g, std::move(v));
}

namespace {

// space norm helper working on scratch buffers to keep the dyadic sweep cheap;
// the per-mode frequencies are tabulated once since the sweep revisits every
// mode at each time point
struct FlowNorm {
  const GridSpec& g;
  const std::vector<cx>& u0;
  const std::vector<cx>& u1;
  FlowKind kind;
  double r;
  std::vector<double> w_tab, br_tab;
  std::vector<cx> spec, phys;
  std::vector<double> re;

  FlowNorm(const FieldPair& p, FlowKind k, double rr)
      : g(p.grid()), u0(p.u.spectral()), u1(p.ut.spectral()), kind(k), r(rr),
        w_tab(g.total()), br_tab(g.total()), spec(g.total()), phys(g.total()),
        re(g.total()) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < g.total(); ++i) {
      w_tab[i] = g.freq_norm(i);
      br_tab[i] = std::sqrt(1.0 + w_tab[i] * w_tab[i]);
    }
  }

  // spectrum of flow(t1), or of flow(t1) - flow(t0) when diff is set
  void build(double t1, double t0, bool diff) {
    const std::int64_t n = g.total();
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const double w = w_tab[i];
      double a, b;
      if (kind == FlowKind::position) {
        a = std::cos(t1 * w);
        b = sinc_t(t1, w);
        if (diff) {
          a -= std::cos(t0 * w);
          b -= sinc_t(t0, w);
        }
      } else {
        const double br = br_tab[i];
        a = (-w / br) * std::sin(t1 * w);
        b = std::cos(t1 * w) / br;
        if (diff) {
          a -= (-w / br) * std::sin(t0 * w);
          b -= std::cos(t0 * w) / br;
        }
      }
      spec[i] = a * u0[i] + b * u1[i];
    }
  }

  double norm_at(double t1) { return finish(t1, 0.0, false); }
  double increment_norm(double t1, double t0) { return finish(t1, t0, true); }

  double finish(double t1, double t0, bool diff) {
    build(t1, t0, diff);
    fft::backward(g.dim, g.points, spec.data(), phys.data());
    kernels::real_part(re.data(), phys.data(), re.size());
    if (std::isinf(r)) return kernels::max_abs(re.data(), re.size());
    const double s = kernels::sum_abs_pow(re.data(), re.size(), r);
    return std::pow(g.cell_volume() * s, 1.0 / r);
  }
};

}  // namespace

DyadicSupResult dyadic_time_sup(const FieldPair& p, double a, double b, int K,
                                double r, FlowKind kind, bool with_increments) {
  if (!(b > a)) throw std::invalid_argument("dyadic_time_sup: need b > a");
  if (K < 0 || K > 24) throw std::invalid_argument("dyadic_time_sup: bad depth");
  FlowNorm fn(p, kind, r);

  DyadicSupResult res;
  res.depth = K;
  const std::int64_t npts = (std::int64_t{1} << K) + 1;
  const double span = b - a;
  for (std::int64_t l = 0; l < npts; ++l) {
    const double t = a + span * static_cast<double>(l) / static_cast<double>(npts - 1);
    const double v = fn.norm_at(t);
    if (v > res.sup) {
      res.sup = v;
      res.argmax_t = t;
    }
  }

  if (with_increments) {
    res.level_increment.assign(K, 0.0);
    for (int k = 1; k <= K; ++k) {
      const std::int64_t pts = std::int64_t{1} << k;
      double worst = 0.0;
      for (std::int64_t l = 1; l < pts; l += 2) {  // points new at level k
        const double t = a + span * static_cast<double>(l) / static_cast<double>(pts);
        const double tp = a + span * static_cast<double>((l - 1) / 2) /
                                  static_cast<double>(pts / 2);
        worst = std::max(worst, fn.increment_norm(t, tp));
      }
      res.level_increment[k - 1] = worst;
    }
  }
  return res;
}

}  // namespace rwave

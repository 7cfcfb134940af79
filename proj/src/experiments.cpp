#include "rwave/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include "rwave/fft.hpp"
#include "rwave/kernels.hpp"
#include "rwave/multiplier.hpp"
#include "rwave/solver.hpp"

namespace rwave {

namespace {

using cx = std::complex<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// q-quantile by linear interpolation of the order statistics; v must be sorted.
double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return kNan;
  if (v.size() == 1) return v[0];
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  const double f = pos - static_cast<double>(i);
  return v[i] * (1.0 - f) + v[i + 1] * f;
}

std::vector<double> finite_sorted(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v)
    if (std::isfinite(x)) out.push_back(x);
  std::sort(out.begin(), out.end());
  return out;
}

// Wilson 95% score interval for a binomial proportion.
void wilson95(int k, int n, double& p, double& lo, double& hi) {
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (ph + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / denom;
  p = ph;
  lo = std::max(center - half, 0.0);
  hi = std::min(center + half, 1.0);
}

double max_abs_real(const double* v, std::size_t n) {
  return kernels::blocked_max(n, [v](std::size_t i) { return std::abs(v[i]); });
}

double lebesgue_from_real(const GridSpec& g, const double* v, std::size_t n, double r) {
  if (std::isinf(r)) return max_abs_real(v, n);
  const double sum = kernels::sum_abs_pow(v, n, r);
  return std::pow(g.cell_volume() * sum, 1.0 / r);
}

// Reusable buffers for evaluating the free flows at arbitrary times.
struct FlowEval {
  GridSpec g;
  std::size_t n;
  std::vector<double> w;       // |xi| per mode
  std::vector<double> br;      // <xi> per mode
  std::vector<cx> spec, phys;
  std::vector<double> re;

  explicit FlowEval(const GridSpec& gg)
      : g(gg),
        n(gg.total()),
        w(n),
        br(n),
        spec(n),
        phys(n),
        re(n) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = g.freq_norm(i);
      br[i] = g.freq_bracket(i);
    }
  }

  void build(const FieldPair& p, double t, FlowKind kind) {
    const cx* u0 = p.u.spectral().data();
    const cx* u1 = p.ut.spectral().data();
    cx* out = spec.data();
    const double* ww = w.data();
    const double* bb = br.data();
    const std::size_t m = n;
    if (kind == FlowKind::position) {
#pragma omp parallel for schedule(static) if (kernels::exec_policy() == kernels::Exec::openmp)
      for (long long i = 0; i < static_cast<long long>(m); ++i) {
        const double om = ww[i];
        const double c = std::cos(t * om);
        const double sc = om == 0.0 ? t : std::sin(t * om) / om;
        out[i] = c * u0[i] + sc * u1[i];
      }
    } else {
#pragma omp parallel for schedule(static) if (kernels::exec_policy() == kernels::Exec::openmp)
      for (long long i = 0; i < static_cast<long long>(m); ++i) {
        const double om = ww[i];
        const double s = std::sin(t * om);
        const double c = std::cos(t * om);
        out[i] = (-om * s * u0[i] + c * u1[i]) / bb[i];
      }
    }
  }

  void weight(const std::vector<double>& sym) {
    kernels::apply_real_symbol(spec.data(), sym.data(), n);
  }

  const std::vector<double>& to_physical() {
    fft::backward(g.dim, g.points, spec.data(), phys.data());
    kernels::real_part(re.data(), phys.data(), n);
    return re;
  }

  double lebesgue(double r) const { return lebesgue_from_real(g, re.data(), n, r); }
};

std::vector<double> uniform_times(double a, double b, int count) {
  if (count < 2) throw std::invalid_argument("need at least two sample times");
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    t[static_cast<std::size_t>(i)] =
        a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  return t;
}

NormTrace make_trace(double q, double r, const std::vector<double>& t,
                     std::vector<double> values) {
  NormTrace tr;
  tr.q = q;
  tr.r = r;
  tr.t = t;
  tr.value = std::move(values);
  return tr;
}

// Least-squares fit of y against x with weights wt; returns slope, intercept,
// weighted R^2.
void weighted_fit(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& wt, TailFit& fit) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += wt[i];
    sx += wt[i] * x[i];
    sy += wt[i] * y[i];
    sxx += wt[i] * x[i] * x[i];
    sxy += wt[i] * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  if (sw <= 0.0 || std::abs(det) < 1e-300) return;
  fit.slope = (sw * sxy - sx * sy) / det;
  fit.intercept = (sxx * sy - sx * sxy) / det;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / sw;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double yh = fit.slope * x[i] + fit.intercept;
    ss_res += wt[i] * (y[i] - yh) * (y[i] - yh);
    ss_tot += wt[i] * (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  fit.points = static_cast<int>(x.size());
}

std::vector<double> collect_column(const std::vector<MemberEnergyRow>& rows, double N,
                                   int* nan_count) {
  std::vector<double> v;
  for (const auto& row : rows) {
    if (row.N != N && !(std::isinf(row.N) && std::isinf(N))) continue;
    if (row.nan_aborted) {
      if (nan_count) ++*nan_count;
      continue;
    }
    v.push_back(row.sup_h1);
  }
  std::sort(v.begin(), v.end());
  return v;
}

FieldPair zero_pair(const GridSpec& g) {
  std::vector<cx> z(g.total(), cx(0.0, 0.0));
  return FieldPair{Field::from_spectral(g, z), Field::from_spectral(g, z)};
}

}  // namespace

FieldPair base_pair(const GridSpec& g, const DataSpec& d) {
  return make_rough_pair(g, d.s, d.profile, d.seed, d.eps0);
}

FieldPair member_pair(const GridSpec& g, const EnsembleSpec& e, const DataSpec& d,
                      int member) {
  const FieldPair base = base_pair(g, d);
  const RandomCoefficients coeffs =
      sample_coefficients(g, e.distribution, member_seed(e.seed, member));
  return randomize_pair(base, coeffs, e.cutoff);
}

TailCurve make_tail_curve(const std::vector<double>& samples, int grid_size) {
  TailCurve curve;
  std::vector<double> s = finite_sorted(samples);
  curve.samples = static_cast<int>(s.size());
  if (s.size() < 40 || grid_size < 2) return curve;

  const double lam_lo = quantile_sorted(s, 0.5);
  const double lam_hi = s[s.size() - 10];  // tenth-largest sample
  if (!(lam_hi > lam_lo) || lam_lo < 0.0) return curve;

  const double a2 = lam_lo * lam_lo, b2 = lam_hi * lam_hi;
  const int n = static_cast<int>(s.size());
  std::vector<double> x, y, wt;
  for (int i = 0; i < grid_size; ++i) {
    const double l2 =
        a2 + (b2 - a2) * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    const double lam = std::sqrt(l2);
    const auto it = std::upper_bound(s.begin(), s.end(), lam);
    const int exceed = static_cast<int>(s.end() - it);
    TailPoint pt;
    pt.lambda = lam;
    pt.exceed = exceed;
    wilson95(exceed, n, pt.p, pt.lo, pt.hi);
    curve.points.push_back(pt);
    if (exceed >= 1 && exceed < n && pt.lo > 0.0 && pt.hi > pt.lo) {
      const double se = 0.5 * (std::log(pt.hi) - std::log(pt.lo));
      x.push_back(l2);
      y.push_back(std::log(pt.p));
      wt.push_back(1.0 / (se * se));
    }
  }
  if (x.size() >= 3) {
    weighted_fit(x, y, wt, curve.fit);
    curve.fit.lambda_lo = lam_lo;
    curve.fit.lambda_hi = lam_hi;
  }
  return curve;
}

StrichartzTailResult strichartz_tail(const GridSpec& g, const EnsembleSpec& ens,
                                     const DataSpec& data,
                                     const std::vector<std::pair<double, double>>& qr_list,
                                     const std::vector<std::pair<double, double>>& intervals,
                                     int snapshots) {
  if (ens.members < 1) throw std::invalid_argument("ensemble needs members");
  if (qr_list.empty() || intervals.empty())
    throw std::invalid_argument("need at least one exponent pair and one interval");
  for (const auto& [t0, t1] : intervals)
    if (!(t1 > t0)) throw std::invalid_argument("intervals must have positive length");

  const FieldPair base = base_pair(g, data);
  const std::size_t n_cases = qr_list.size() * intervals.size();

  StrichartzTailResult res;
  res.cases.resize(n_cases);
  for (std::size_t ii = 0; ii < intervals.size(); ++ii)
    for (std::size_t qi = 0; qi < qr_list.size(); ++qi) {
      auto& c = res.cases[ii * qr_list.size() + qi];
      c.q = qr_list[qi].first;
      c.r = qr_list[qi].second;
      c.t0 = intervals[ii].first;
      c.t1 = intervals[ii].second;
      c.member_value.assign(static_cast<std::size_t>(ens.members), 0.0);
    }

  std::vector<double> pair_sizes(static_cast<std::size_t>(ens.members), 0.0);
  std::string error;

#pragma omp parallel for schedule(dynamic) if (kernels::exec_policy() == kernels::Exec::openmp)
  for (int m = 0; m < ens.members; ++m) {
    try {
      const RandomCoefficients coeffs =
          sample_coefficients(g, ens.distribution, member_seed(ens.seed, m));
      const FieldPair p = randomize_pair(base, coeffs, ens.cutoff);
      pair_sizes[static_cast<std::size_t>(m)] =
          sobolev_pair_norm(p, 0.0, Homogeneity::inhomogeneous).value;
      FlowEval ev(g);
      for (std::size_t ii = 0; ii < intervals.size(); ++ii) {
        const auto times = uniform_times(intervals[ii].first, intervals[ii].second,
                                         snapshots);
        // one physical build per time, every requested r read from it
        std::vector<std::vector<double>> traces(qr_list.size());
        for (auto& tr : traces) tr.resize(times.size());
        for (std::size_t k = 0; k < times.size(); ++k) {
          ev.build(p, times[k], FlowKind::position);
          ev.to_physical();
          for (std::size_t qi = 0; qi < qr_list.size(); ++qi)
            traces[qi][k] = ev.lebesgue(qr_list[qi].second);
        }
        for (std::size_t qi = 0; qi < qr_list.size(); ++qi) {
          auto& c = res.cases[ii * qr_list.size() + qi];
          const NormTrace tr = make_trace(c.q, c.r, times, traces[qi]);
          c.member_value[static_cast<std::size_t>(m)] =
              spacetime_norm(tr, c.q, c.t0, c.t1).value;
        }
      }
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error(error);

  std::vector<double> sz = pair_sizes;
  std::sort(sz.begin(), sz.end());
  const double typical = quantile_sorted(sz, 0.5);
  for (auto& c : res.cases) {
    c.curve = make_tail_curve(c.member_value, 25);
    c.pair_size = typical;
    const double len = c.t1 - c.t0;
    c.predicted_scale =
        std::isinf(c.q) ? typical * typical : std::pow(len, 2.0 / c.q) * typical * typical;
  }
  return res;
}

SupTailResult sup_tail(const GridSpec& g, const EnsembleSpec& ens, const DataSpec& data,
                       const std::vector<double>& T_list, double r, int depth,
                       const std::vector<FlowKind>& kinds) {
  if (T_list.empty()) throw std::invalid_argument("need at least one horizon");
  for (double T : T_list)
    if (!(T > 0.0)) throw std::invalid_argument("horizons must be positive");
  if (kinds.empty()) throw std::invalid_argument("need at least one flow kind");

  const FieldPair base = base_pair(g, data);
  const std::size_t nk = kinds.size();

  SupTailResult res;
  res.cases.resize(T_list.size() * nk);
  for (std::size_t ti = 0; ti < T_list.size(); ++ti)
    for (std::size_t kk = 0; kk < nk; ++kk) {
      auto& c = res.cases[ti * nk + kk];
      c.kind = kinds[kk];
      c.T = T_list[ti];
      c.r = r;
      c.depth = depth;
      c.member_sup.assign(static_cast<std::size_t>(ens.members), 0.0);
    }

  std::string error;
#pragma omp parallel for schedule(dynamic) if (kernels::exec_policy() == kernels::Exec::openmp)
  for (int m = 0; m < ens.members; ++m) {
    try {
      const RandomCoefficients coeffs =
          sample_coefficients(g, ens.distribution, member_seed(ens.seed, m));
      const FieldPair p = randomize_pair(base, coeffs, ens.cutoff);
      for (std::size_t ti = 0; ti < T_list.size(); ++ti)
        for (std::size_t kk = 0; kk < nk; ++kk) {
          const auto sup =
              dyadic_time_sup(p, 0.0, T_list[ti], depth, r, kinds[kk], false);
          res.cases[ti * nk + kk].member_sup[static_cast<std::size_t>(m)] = sup.sup;
        }
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error(error);

  for (auto& c : res.cases) c.curve = make_tail_curve(c.member_sup, 25);
  return res;
}

IncrementProbe dyadic_increment_probe(const FieldPair& p, double a, double b, int K,
                                      double r) {
  const GridSpec& g = p.grid();
  IncrementProbe probe;

  const auto& u0 = p.u.spectral();
  const auto& u1 = p.ut.spectral();
  double band = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(g.total()); ++i)
    if (std::abs(u0[i]) + std::abs(u1[i]) > 0.0) band = std::max(band, g.freq_norm(i));
  probe.band = band;

  const auto sup = dyadic_time_sup(p, a, b, K, r, FlowKind::position, true);
  probe.level_increment = sup.level_increment;

  const double vol = std::pow(g.box, g.dim);
  probe.level_cap.resize(static_cast<std::size_t>(K), 0.0);
  for (int k = 1; k <= K; ++k) {
    const double dt = (b - a) / std::pow(2.0, k);
    double acc = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(g.total()); ++i) {
      const double om = g.freq_norm(i);
      const double c0 = std::min(2.0, om * dt) * std::abs(u0[i]);
      const double c1 = (om == 0.0 ? dt : std::min(dt, 2.0 / om)) * std::abs(u1[i]);
      acc += (c0 + c1) * (c0 + c1);
    }
    probe.level_cap[static_cast<std::size_t>(k - 1)] = std::sqrt(vol * acc);
  }
  return probe;
}

UniformEnergyResult uniform_energy(const GridSpec& g, const EnsembleSpec& ens,
                                   const DataSpec& data, const std::vector<double>& N_list,
                                   double T, const SolverConfig& base, double delta,
                                   int z_snapshots) {
  if (N_list.empty()) throw std::invalid_argument("need at least one band");
  if (!(T > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (z_snapshots < 2) throw std::invalid_argument("need at least two forcing snapshots");

  const FieldPair basep = base_pair(g, data);
  const double wexp = data.s - delta;
  std::vector<double> wsym(g.total());
  for (std::size_t i = 0; i < static_cast<std::size_t>(g.total()); ++i)
    wsym[i] = std::pow(g.freq_bracket(i), wexp);

  UniformEnergyResult res;
  res.rows.assign(static_cast<std::size_t>(ens.members) * N_list.size(),
                  MemberEnergyRow{});

  std::string error;
#pragma omp parallel for schedule(dynamic) if (kernels::exec_policy() == kernels::Exec::openmp)
  for (int m = 0; m < ens.members; ++m) {
    try {
      const RandomCoefficients coeffs =
          sample_coefficients(g, ens.distribution, member_seed(ens.seed, m));
      const FieldPair p = randomize_pair(basep, coeffs, ens.cutoff);
      FlowEval ev(g);
      const auto ztimes = uniform_times(0.0, T, z_snapshots);

      for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
        MemberEnergyRow row;
        row.member = m;
        row.N = N_list[ni];
        const FieldPair pn = truncate_data(p, N_list[ni]);

        // forcing statistics along a uniform grid
        std::vector<double> tr10(ztimes.size()), tr6(ztimes.size()),
            trInf(ztimes.size()), trT6(ztimes.size()), trTW(ztimes.size());
        for (std::size_t k = 0; k < ztimes.size(); ++k) {
          ev.build(pn, ztimes[k], FlowKind::position);
          ev.to_physical();
          tr10[k] = ev.lebesgue(10.0);
          tr6[k] = ev.lebesgue(6.0);
          trInf[k] = ev.lebesgue(kInf);
          ev.build(pn, ztimes[k], FlowKind::tilde);
          ev.to_physical();
          trT6[k] = ev.lebesgue(6.0);
          ev.build(pn, ztimes[k], FlowKind::tilde);
          ev.weight(wsym);
          ev.to_physical();
          trTW[k] = ev.lebesgue(kInf);
        }
        row.z_l10_tx = spacetime_norm(make_trace(10, 10, ztimes, tr10), 10.0, 0.0, T).value;
        row.z_linf_l6 = *std::max_element(tr6.begin(), tr6.end());
        row.z_linf_tx = *std::max_element(trInf.begin(), trInf.end());
        row.zt_l6_tx = spacetime_norm(make_trace(6, 6, ztimes, trT6), 6.0, 0.0, T).value;
        row.zt_weighted_linf = *std::max_element(trTW.begin(), trTW.end());
        row.gauge_stat = std::pow(row.z_l10_tx, 10.0) + std::pow(row.z_linf_l6, 6.0) +
                         row.z_linf_tx * row.z_linf_tx + std::pow(row.zt_l6_tx, 6.0) +
                         row.zt_weighted_linf;

        // remainder solve with zero data, forced by the truncated flow
        SolverConfig cfg = base;
        cfg.t_final = T;
        cfg.store_snapshots = false;
        cfg.track_energy = false;
        double sup_h1 = 0.0, worst_ratio = 0.0, run_max_vt = 0.0;
        auto obs = [&](double t, const FieldPair& state) {
          sup_h1 = std::max(
              sup_h1, sobolev_pair_norm(state, 1.0, Homogeneity::inhomogeneous).value);
          const double vl2 = state.u.l2_norm();
          const double vtl2 = state.ut.l2_norm();
          run_max_vt = std::max(run_max_vt, vtl2);
          if (t > 0.0 && run_max_vt > 0.0)
            worst_ratio = std::max(worst_ratio, vl2 / (t * run_max_vt));
        };
        const Trajectory traj = evolve_perturbed(zero_pair(g), pn, cfg, obs);
        row.nan_aborted = traj.nan_aborted;
        row.sup_h1 = sup_h1;
        row.growth_ratio = worst_ratio;

        res.rows[static_cast<std::size_t>(m) * N_list.size() + ni] = row;
      }
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error(error);

  res.envelope.N_list = N_list;
  for (double N : N_list) {
    int nan_count = 0;
    const auto col = collect_column(res.rows, N, &nan_count);
    res.envelope.nan_count += nan_count;
    res.envelope.median.push_back(quantile_sorted(col, 0.5));
    res.envelope.q90.push_back(quantile_sorted(col, 0.9));
    res.envelope.worst.push_back(col.empty() ? kNan : col.back());
  }
  return res;
}

ConvergenceResult truncation_convergence(const GridSpec& g, const EnsembleSpec& ens,
                                         const DataSpec& data,
                                         const std::vector<double>& N_list, double alpha,
                                         double T, int snapshots, bool remainder,
                                         const SolverConfig& base) {
  if (N_list.empty()) throw std::invalid_argument("need at least one band");
  const double maxN = *std::max_element(N_list.begin(), N_list.end());
  if (g.xi_max_axis() < 2.0 * maxN - 1e-9)
    throw std::invalid_argument(
        "reference band is too coarse: need grid band limit >= twice the largest "
        "truncation");

  const FieldPair basep = base_pair(g, data);

  // high-pass symbols 1 - (at-most-N) and the smoothing weight <xi>^alpha
  std::vector<std::vector<double>> hi(N_list.size());
  for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
    hi[ni].resize(g.total());
    for (std::size_t i = 0; i < static_cast<std::size_t>(g.total()); ++i)
      hi[ni][i] = 1.0 - lp_symbol(g.freq_norm(i), N_list[ni], BandMode::at_most);
  }
  std::vector<double> wsym(g.total());
  for (std::size_t i = 0; i < static_cast<std::size_t>(g.total()); ++i)
    wsym[i] = std::pow(g.freq_bracket(i), alpha);

  ConvergenceResult res;
  res.N_list = N_list;
  res.rows.assign(static_cast<std::size_t>(ens.members) * N_list.size(),
                  ConvergenceRow{});

  std::string error;
#pragma omp parallel for schedule(dynamic) if (kernels::exec_policy() == kernels::Exec::openmp)
  for (int m = 0; m < ens.members; ++m) {
    try {
      const RandomCoefficients coeffs =
          sample_coefficients(g, ens.distribution, member_seed(ens.seed, m));
      const FieldPair p = randomize_pair(basep, coeffs, ens.cutoff);
      FlowEval ev(g);
      const auto times = uniform_times(0.0, T, snapshots);

      std::vector<std::vector<double>> diff_tr(N_list.size());
      for (auto& tr : diff_tr) tr.resize(times.size());
      std::vector<double> wtr(times.size());
      std::vector<cx> zsnap(g.total());

      for (std::size_t k = 0; k < times.size(); ++k) {
        ev.build(p, times[k], FlowKind::position);
        zsnap = ev.spec;
        for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
          ev.spec = zsnap;
          ev.weight(hi[ni]);
          ev.to_physical();
          diff_tr[ni][k] = ev.lebesgue(10.0);
        }
        ev.spec = zsnap;
        ev.weight(wsym);
        ev.to_physical();
        wtr[k] = ev.lebesgue(10.0);
      }
      const double smooth_norm =
          spacetime_norm(make_trace(5, 10, times, wtr), 5.0, 0.0, T).value;

      for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
        ConvergenceRow row;
        row.member = m;
        row.N = N_list[ni];
        row.z_diff =
            spacetime_norm(make_trace(5, 10, times, diff_tr[ni]), 5.0, 0.0, T).value;
        row.oracle_rhs = std::pow(N_list[ni], -alpha) * smooth_norm;
        res.rows[static_cast<std::size_t>(m) * N_list.size() + ni] = row;
      }

      if (remainder) {
        SolverConfig cfg = base;
        cfg.t_final = T;
        cfg.store_snapshots = true;
        cfg.track_energy = false;
        const Trajectory full = evolve_perturbed(zero_pair(g), p, cfg, {});
        for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
          const FieldPair pn = truncate_data(p, N_list[ni]);
          SolverConfig cfgn = cfg;
          cfgn.store_snapshots = false;
          double sup_diff = 0.0;
          std::size_t snap_idx = 0;
          bool aligned = true;
          auto obs = [&](double t, const FieldPair& state) {
            if (snap_idx >= full.snaps.size() ||
                std::abs(full.times[snap_idx] - t) > 1e-12) {
              aligned = false;
              return;
            }
            const auto& ref = full.snaps[snap_idx];
            std::vector<cx> du(g.total()), dut(g.total());
            for (std::size_t i = 0; i < static_cast<std::size_t>(g.total()); ++i) {
              du[i] = state.u.spectral()[i] - ref.u.spectral()[i];
              dut[i] = state.ut.spectral()[i] - ref.ut.spectral()[i];
            }
            const FieldPair diff{Field::from_spectral(g, du),
                                 Field::from_spectral(g, dut)};
            sup_diff = std::max(
                sup_diff,
                sobolev_pair_norm(diff, 1.0, Homogeneity::inhomogeneous).value);
            ++snap_idx;
          };
          const Trajectory tn = evolve_perturbed(zero_pair(g), pn, cfgn, obs);
          auto& row = res.rows[static_cast<std::size_t>(m) * N_list.size() + ni];
          row.v_diff =
              (full.nan_aborted || tn.nan_aborted || !aligned) ? kNan : sup_diff;
        }
      }
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error(error);

  std::vector<double> lx, ly, lw;
  for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
    std::vector<double> zc, oc, vc;
    for (int m = 0; m < ens.members; ++m) {
      const auto& row = res.rows[static_cast<std::size_t>(m) * N_list.size() + ni];
      zc.push_back(row.z_diff);
      oc.push_back(row.oracle_rhs);
      if (row.v_diff >= 0.0 && std::isfinite(row.v_diff)) vc.push_back(row.v_diff);
    }
    std::sort(zc.begin(), zc.end());
    std::sort(oc.begin(), oc.end());
    std::sort(vc.begin(), vc.end());
    res.median_z.push_back(quantile_sorted(zc, 0.5));
    res.median_oracle.push_back(quantile_sorted(oc, 0.5));
    res.median_v.push_back(vc.empty() ? kNan : quantile_sorted(vc, 0.5));
    if (res.median_z.back() > 0.0) {
      lx.push_back(std::log(N_list[ni]));
      ly.push_back(std::log(res.median_z.back()));
      lw.push_back(1.0);
    }
  }
  if (lx.size() >= 2) {
    TailFit f;
    weighted_fit(lx, ly, lw, f);
    res.fitted_slope = f.slope;
  }
  return res;
}

ExceptionalResult exceptional_set_probe(const GridSpec& g, const EnsembleSpec& ens,
                                        const DataSpec& data, double alpha, double T,
                                        double tau, double theta, double threshold,
                                        int snapshots, const SolverConfig& base,
                                        int solve_budget) {
  if (!(T > 0.0) || !(tau > 0.0)) throw std::invalid_argument("bad horizon or window");

  const FieldPair basep = base_pair(g, data);
  const double bound_k =
      sobolev_pair_norm(basep, 0.0, Homogeneity::inhomogeneous).value;

  std::vector<double> wsym(g.total());
  for (std::size_t i = 0; i < static_cast<std::size_t>(g.total()); ++i)
    wsym[i] = std::pow(g.freq_bracket(i), alpha);

  ExceptionalResult res;
  res.threshold = threshold;
  res.bound_k = bound_k;
  res.theta = theta;
  res.tau = tau;
  res.alpha = alpha;
  res.rows.assign(static_cast<std::size_t>(ens.members), ExceptionalRow{});

  std::string error;
#pragma omp parallel for schedule(dynamic) if (kernels::exec_policy() == kernels::Exec::openmp)
  for (int m = 0; m < ens.members; ++m) {
    try {
      const RandomCoefficients coeffs =
          sample_coefficients(g, ens.distribution, member_seed(ens.seed, m));
      const FieldPair p = randomize_pair(basep, coeffs, ens.cutoff);
      FlowEval ev(g);
      const auto times = uniform_times(0.0, T, snapshots);
      std::vector<double> plain(times.size()), weighted(times.size());
      std::vector<cx> zsnap(g.total());
      for (std::size_t k = 0; k < times.size(); ++k) {
        ev.build(p, times[k], FlowKind::position);
        zsnap = ev.spec;
        ev.to_physical();
        plain[k] = ev.lebesgue(10.0);
        ev.spec = zsnap;
        ev.weight(wsym);
        ev.to_physical();
        weighted[k] = ev.lebesgue(10.0);
      }
      ExceptionalRow row;
      row.member = m;
      row.weighted_z =
          spacetime_norm(make_trace(5, 10, times, weighted), 5.0, 0.0, T).value;
      const NormTrace ptr = make_trace(5, 10, times, plain);
      const SmallnessReport rep = smallness_condition(ptr, T, bound_k, theta, tau);
      double worst = 0.0;
      for (std::size_t jj = 0; jj < rep.interval_value.size(); ++jj)
        if (rep.interval_bound[jj] > 0.0)
          worst = std::max(worst, rep.interval_value[jj] / rep.interval_bound[jj]);
      row.smallness_ok = rep.all_ok;
      row.worst_ratio = worst;
      row.in_good_set = row.smallness_ok && row.weighted_z <= threshold;
      res.rows[static_cast<std::size_t>(m)] = row;
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error(error);

  // threshold-violation curve over the observed range
  std::vector<double> wz;
  for (const auto& row : res.rows) wz.push_back(row.weighted_z);
  std::sort(wz.begin(), wz.end());
  if (!wz.empty()) {
    const int pts = 20;
    for (int i = 0; i < pts; ++i) {
      const double th =
          wz.front() + (wz.back() - wz.front()) * static_cast<double>(i) /
                           static_cast<double>(pts - 1);
      const auto it = std::upper_bound(wz.begin(), wz.end(), th);
      res.epsilon_curve.emplace_back(
          th, static_cast<double>(wz.end() - it) / static_cast<double>(wz.size()));
    }
  }
  int good = 0;
  for (const auto& row : res.rows) good += row.in_good_set ? 1 : 0;
  res.good_fraction = ens.members > 0
                          ? static_cast<double>(good) / static_cast<double>(ens.members)
                          : 0.0;

  // confirm finiteness of the remainder solve on good members
  int solved = 0;
  for (int m = 0; m < ens.members && solved < solve_budget; ++m) {
    auto& row = res.rows[static_cast<std::size_t>(m)];
    if (!row.in_good_set) continue;
    const RandomCoefficients coeffs =
        sample_coefficients(g, ens.distribution, member_seed(ens.seed, m));
    const FieldPair p = randomize_pair(basep, coeffs, ens.cutoff);
    SolverConfig cfg = base;
    cfg.t_final = T;
    cfg.store_snapshots = false;
    cfg.track_energy = false;
    double sup_h1 = 0.0;
    auto obs = [&](double, const FieldPair& state) {
      sup_h1 = std::max(
          sup_h1, sobolev_pair_norm(state, 1.0, Homogeneity::inhomogeneous).value);
    };
    const Trajectory traj = evolve_perturbed(zero_pair(g), p, cfg, obs);
    row.solve_ran = true;
    row.nan_aborted = traj.nan_aborted;
    row.sup_h1 = sup_h1;
    ++solved;
  }
  return res;
}

}  // namespace rwave

#include "rwave/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "rwave/fft.hpp"
#include "rwave/kernels.hpp"
#include "rwave/multiplier.hpp"

namespace rwave {

namespace {

// Per-mode entries of the linear group over a fixed time offset:
//   position  c u + snc w
//   velocity  msn u + c w
struct StageSymbols {
  std::vector<double> c, snc, msn;

  StageSymbols(const GridSpec& g, double h)
      : c(g.total()), snc(g.total()), msn(g.total()) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < g.total(); ++i) {
      const double w = g.freq_norm(i);
      const double s = std::sin(h * w);
      c[i] = std::cos(h * w);
      snc[i] = w == 0.0 ? h : s / w;
      msn[i] = -w * s;
    }
  }
};

// Scratch for evaluating the quintic pointwise on the padded grid.  The
// unmatched -points/2 planes are always dropped; with a padding ratio below 3
// the truncation additionally applies a per-axis exponential filter of order
// 36 to the product, damping the aliased top of the band.
struct PadWorkspace {
  GridSpec g;
  int M = 0;                          // padded points per axis
  std::int64_t mtotal = 1;
  std::vector<std::int64_t> scatter;  // band index -> padded index, -1 trimmed
  std::vector<double> gather_scale;   // 1/M^dim (filtered where applicable)
  std::vector<cx> pad_spec, pad_phys;
  std::vector<double> re_u, re_f, prod;

  explicit PadWorkspace(const GridSpec& grid) : g(grid) {
    M = static_cast<int>(std::lround(g.dealias_ratio * g.points));
    if (M % 2) ++M;
    if (M < g.points) M = g.points;
    for (int a = 0; a < g.dim; ++a) mtotal *= M;

    const bool filtered = g.dealias_ratio < 3.0;
    scatter.resize(g.total());
    gather_scale.resize(g.total());
    const double inv = 1.0 / static_cast<double>(mtotal);
    for (std::int64_t i = 0; i < g.total(); ++i) {
      const auto iv = g.unravel(i);
      std::int64_t pidx = 0;
      bool trimmed = false;
      double filt = 1.0;
      for (int a = 0; a < g.dim; ++a) {
        const int k = g.wavenumber(iv[a]);
        if (k == -g.points / 2) trimmed = true;
        pidx = pidx * M + (k >= 0 ? k : M + k);
        if (filtered) {
          const double rho = std::fabs(static_cast<double>(k)) / (g.points / 2.0);
          filt *= std::exp(-36.0 * std::pow(rho, 36.0));
        }
      }
      scatter[i] = trimmed ? -1 : pidx;
      gather_scale[i] = inv * filt;
    }
    pad_spec.resize(mtotal);
    pad_phys.resize(mtotal);
    re_u.resize(mtotal);
    re_f.resize(mtotal);
    prod.resize(mtotal);
  }

  // padded physical values of a band spectrum, written to dst
  void to_padded_real(const std::vector<cx>& spec, std::vector<double>& dst) {
    std::fill(pad_spec.begin(), pad_spec.end(), cx{0.0, 0.0});
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(spec.size()); ++i)
      if (scatter[i] >= 0) pad_spec[scatter[i]] = spec[i];
    fft::backward(g.dim, M, pad_spec.data(), pad_phys.data());
    kernels::real_part(dst.data(), pad_phys.data(), dst.size());
  }

  // band spectrum of the padded physical product, including the 1/M^dim
  // forward factor and the dealias filter
  void from_padded_real(const std::vector<double>& src, std::vector<cx>& out) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < mtotal; ++i) pad_phys[i] = cx(src[i], 0.0);
    fft::forward(g.dim, M, pad_phys.data(), pad_spec.data());
    out.resize(scatter.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(out.size()); ++i)
      out[i] = scatter[i] >= 0 ? gather_scale[i] * pad_spec[scatter[i]] : cx{0.0, 0.0};
  }

  // (1/6) integral u^6 by quadrature on the padded grid; expects re_u filled
  double potential_from_re_u() {
    const double cell = std::pow(g.box / M, g.dim);
    return cell * kernels::sum_abs_pow(re_u.data(), re_u.size(), 6.0) / 6.0;
  }
};

// closed-form forcing: position component of the linear group at time t,
// written as padded physical values
void forcing_at(const FieldPair& data, double t, PadWorkspace& ws, std::vector<cx>& scratch) {
  const GridSpec& g = data.grid();
  const auto& z0 = data.u.spectral();
  const auto& z1 = data.ut.spectral();
  scratch.resize(g.total());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < g.total(); ++i) {
    const double w = g.freq_norm(i);
    const double c = std::cos(t * w);
    const double snc = w == 0.0 ? t : std::sin(t * w) / w;
    scratch[i] = c * z0[i] + snc * z1[i];
  }
  ws.to_padded_real(scratch, ws.re_f);
}

Energy energy_impl(const std::vector<cx>& u, const std::vector<cx>& w,
                   const GridSpec& g, PadWorkspace& ws) {
  double vol = 1.0;
  for (int a = 0; a < g.dim; ++a) vol *= g.box;
  Energy e;
  e.kinetic = 0.5 * vol * kernels::sum_sq(w.data(), w.size());
  e.gradient = 0.5 * vol * kernels::blocked_sum(u.size(), [&](std::size_t i) {
    const double r = g.freq_norm(i);
    return r * r * std::norm(u[i]);
  });
  ws.to_padded_real(u, ws.re_u);
  e.potential = ws.potential_from_re_u();
  return e;
}

Trajectory run_solver(const FieldPair& initial, const FieldPair* forcing,
                      const SolverConfig& cfg, const SnapshotFn& obs) {
  const GridSpec& g = initial.grid();
  if (forcing && !forcing->grid().same_shape(g))
    throw std::invalid_argument("evolve: forcing grid mismatch");
  if (!(cfg.dt > 0.0) || !(cfg.t_final > 0.0))
    throw std::invalid_argument("evolve: dt and t_final must be positive");
  if (cfg.dt > 0.5 * g.dx() * (1.0 + 1e-12))
    throw std::invalid_argument("evolve: dt exceeds half the grid spacing");
  if (cfg.snapshot_stride < 1)
    throw std::invalid_argument("evolve: snapshot stride must be >= 1");

  const int nsteps = static_cast<int>(std::ceil(cfg.t_final / cfg.dt - 1e-9));
  const double h = cfg.t_final / nsteps;

  Trajectory traj;
  traj.grid = g;
  traj.dt_used = h;

  const std::int64_t n = g.total();
  std::vector<cx> u = initial.u.spectral();
  std::vector<cx> w = initial.ut.spectral();

  const StageSymbols half(g, h / 2.0), full(g, h);
  PadWorkspace ws(g);
  std::vector<cx> f1(n), f2(n), f3(n), f4(n);       // stage values of -(u+f)^5
  std::vector<cx> s_u(n), s_w(n), uh_u(n), uh_w(n); // stage scratch
  std::vector<cx> forcing_scratch;

  auto record = [&](double t) {
    traj.times.push_back(t);
    if (cfg.track_energy) {
      const Energy e = energy_impl(u, w, g, ws);
      traj.energy.t.push_back(t);
      traj.energy.kinetic.push_back(e.kinetic);
      traj.energy.gradient.push_back(e.gradient);
      traj.energy.potential.push_back(e.potential);
    }
    if (cfg.store_snapshots || obs) {
      FieldPair state(Field::from_spectral(g, u), Field::from_spectral(g, w));
      if (obs) obs(t, state);
      if (cfg.store_snapshots) traj.snaps.push_back(std::move(state));
    }
  };

  // stage quintic: fk = -((state position) + forcing)^5 on the padded grid
  auto stage_rhs = [&](const std::vector<cx>& pos, double t, std::vector<cx>& fk) {
    ws.to_padded_real(pos, ws.re_u);
    if (forcing) {
      forcing_at(*forcing, t, ws, forcing_scratch);
      kernels::pow5_sum(ws.prod.data(), ws.re_u.data(), ws.re_f.data(), ws.prod.size());
    } else {
      kernels::pow5(ws.prod.data(), ws.re_u.data(), ws.prod.size());
    }
    ws.from_padded_real(ws.prod, fk);
    kernels::scale(fk.data(), -1.0, fk.size());
  };

  record(0.0);

  for (int step = 0; step < nsteps; ++step) {
    const double t0 = step * h;

    if (!cfg.nonlinearity_on) {
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < n; ++i) {
        const cx a = u[i], b = w[i];
        u[i] = full.c[i] * a + full.snc[i] * b;
        w[i] = full.msn[i] * a + full.c[i] * b;
      }
    } else {
      stage_rhs(u, t0, f1);

      // S2 = rot_half(U0 + (h/2) N1)
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < n; ++i) {
        const cx a = u[i], b = w[i] + 0.5 * h * f1[i];
        uh_u[i] = half.c[i] * u[i] + half.snc[i] * w[i];   // rot_half(U0)
        uh_w[i] = half.msn[i] * u[i] + half.c[i] * w[i];
        s_u[i] = half.c[i] * a + half.snc[i] * b;
        s_w[i] = half.msn[i] * a + half.c[i] * b;
      }
      stage_rhs(s_u, t0 + 0.5 * h, f2);

      // S3 = rot_half(U0) + (h/2) N2
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < n; ++i) {
        s_u[i] = uh_u[i];
        s_w[i] = uh_w[i] + 0.5 * h * f2[i];
      }
      stage_rhs(s_u, t0 + 0.5 * h, f3);

      // S4 = rot_full(U0) + h rot_half(N3)
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < n; ++i) {
        s_u[i] = full.c[i] * u[i] + full.snc[i] * w[i] + h * half.snc[i] * f3[i];
        s_w[i] = full.msn[i] * u[i] + full.c[i] * w[i] + h * half.c[i] * f3[i];
      }
      stage_rhs(s_u, t0 + h, f4);

      // U1 = rot_full(U0) + (h/6)(rot_full(N1) + 2 rot_half(N2 + N3) + N4)
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < n; ++i) {
        const cx a = u[i], b = w[i];
        const cx n23 = f2[i] + f3[i];
        u[i] = full.c[i] * a + full.snc[i] * b +
               (h / 6.0) * (full.snc[i] * f1[i] + 2.0 * half.snc[i] * n23);
        w[i] = full.msn[i] * a + full.c[i] * b +
               (h / 6.0) * (full.c[i] * f1[i] + 2.0 * half.c[i] * n23 + f4[i]);
      }
    }

    const double t1 = (step + 1) * h;
    if (kernels::any_non_finite(u.data(), n) || kernels::any_non_finite(w.data(), n)) {
      traj.nan_aborted = true;
      traj.nan_time = t1;
      break;
    }
    if ((step + 1) % cfg.snapshot_stride == 0 || step + 1 == nsteps) record(t1);
  }
  return traj;
}

}  // namespace

Energy energy(const FieldPair& p) {
  PadWorkspace ws(p.grid());
  return energy_impl(p.u.spectral(), p.ut.spectral(), p.grid(), ws);
}

Trajectory evolve_nlw(const FieldPair& initial, const SolverConfig& cfg,
                      const SnapshotFn& obs) {
  return run_solver(initial, nullptr, cfg, obs);
}

Trajectory evolve_perturbed(const FieldPair& v_initial, const FieldPair& forcing_data,
                            const SolverConfig& cfg, const SnapshotFn& obs) {
  return run_solver(v_initial, &forcing_data, cfg, obs);
}

FieldPair truncate_data(const FieldPair& p, double N) {
  if (std::isinf(N)) return p;
  const Multiplier m = make_lp_multiplier(p.grid(), N, BandMode::at_most);
  return FieldPair(m.applied(p.u), m.applied(p.ut));
}

std::pair<Field, Field> nonlinearity_split(const Field& z, const Field& v) {
  if (!z.grid().same_shape(v.grid()))
    throw std::invalid_argument("nonlinearity_split: grid mismatch");
  const auto& zs = z.physical();
  const auto& vs = v.physical();
  std::vector<double> lead(zs.size()), rest(zs.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(zs.size()); ++i) {
    const double a = zs[i], b = vs[i];
    const double a2 = a * a, b2 = b * b;
    lead[i] = 5.0 * a * b2 * b2;
    rest[i] = 10.0 * a2 * b2 * b + 10.0 * a2 * a * b2 + 5.0 * a2 * a2 * b + a2 * a2 * a;
  }
  return {Field::from_physical(z.grid(), lead), Field::from_physical(z.grid(), rest)};
}

FieldPair scaling_transform(const FieldPair& p, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scaling_transform: lambda must be positive");
  const GridSpec& g = p.grid();
  GridSpec ng = g;
  ng.box = g.box / lambda;
  std::vector<cx> su = p.u.spectral(), sw = p.ut.spectral();
  kernels::scale(su.data(), std::sqrt(lambda), su.size());
  kernels::scale(sw.data(), lambda * std::sqrt(lambda), sw.size());
  return FieldPair(Field::from_spectral(ng, std::move(su)),
                   Field::from_spectral(ng, std::move(sw)));
}

}  // namespace rwave

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rwave/norms.hpp"
#include "rwave/propagator.hpp"
#include "rwave/randomization.hpp"

namespace rwave {

struct EnsembleSpec {
  int members = 100;
  std::uint64_t seed = 1;
  DistributionKind distribution = DistributionKind::gaussian;
  CubeCutoff cutoff = CubeCutoff::smooth;
};

struct DataSpec {
  double s = 0.75;
  RoughProfile profile = RoughProfile::randomized_phase;
  std::uint64_t seed = 7;  // seed of the shared base pair
  double eps0 = 0.01;
};

FieldPair base_pair(const GridSpec& g, const DataSpec& d);
FieldPair member_pair(const GridSpec& g, const EnsembleSpec& e, const DataSpec& d,
                      int member);

// ---------------------------------------------------------------------------
// Exceedance tails
// ---------------------------------------------------------------------------

struct TailPoint {
  double lambda = 0.0;
  int exceed = 0;
  double p = 0.0, lo = 0.0, hi = 0.0;  // empirical P(X > lambda), Wilson 95%
};

struct TailFit {
  double slope = 0.0;  // d log P / d lambda^2
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
  double lambda_lo = 0.0, lambda_hi = 0.0;
};

struct TailCurve {
  std::vector<TailPoint> points;
  TailFit fit;
  int samples = 0;
};

// Exceedance curve on a lambda grid (uniform in lambda^2) spanning
// [median sample, tenth-largest sample], with a least-squares fit of log P
// against lambda^2 weighted by the Wilson interval widths.
TailCurve make_tail_curve(const std::vector<double>& samples, int grid_size);

// ---------------------------------------------------------------------------
// Free-evolution tail experiments
// ---------------------------------------------------------------------------

struct StrichartzTailCase {
  double q = 5.0, r = 10.0, t0 = 0.0, t1 = 1.0;
  std::vector<double> member_value;
  TailCurve curve;
  double pair_size = 0.0;            // base pair L^2-level size
  double predicted_scale = 0.0;      // |I|^{2/q} * pair_size^2
};

struct StrichartzTailResult {
  std::vector<StrichartzTailCase> cases;
};

// Randomizes the shared base pair per member and measures the L^q_t L^r_x
// norm of its free evolution on each interval.
StrichartzTailResult strichartz_tail(const GridSpec& g, const EnsembleSpec& ens,
                                     const DataSpec& data,
                                     const std::vector<std::pair<double, double>>& qr_list,
                                     const std::vector<std::pair<double, double>>& intervals,
                                     int snapshots);

struct SupTailCase {
  FlowKind kind = FlowKind::position;
  double T = 1.0, r = 6.0;
  int depth = 10;
  std::vector<double> member_sup;
  TailCurve curve;
};

struct SupTailResult {
  std::vector<SupTailCase> cases;
};

// Sup over the dyadic time grid of the requested flows (default: the position
// flow and the companion flow), for each horizon T.
SupTailResult sup_tail(const GridSpec& g, const EnsembleSpec& ens, const DataSpec& data,
                       const std::vector<double>& T_list, double r, int depth,
                       const std::vector<FlowKind>& kinds = {FlowKind::position,
                                                             FlowKind::tilde});

struct IncrementProbe {
  double band = 0.0;                    // data band edge W
  std::vector<double> level_increment;  // measured L^r increment maxima, k = 1..K
  std::vector<double> level_cap;        // rigorous L^2 caps from min(2, W 2^{-k}(b-a))
};

// Chaining diagnostic on band-limited data: per-level increment maxima of the
// position flow together with the spectral upper caps they must respect.
IncrementProbe dyadic_increment_probe(const FieldPair& p, double a, double b, int K,
                                      double r);

// ---------------------------------------------------------------------------
// Remainder-equation ensembles
// ---------------------------------------------------------------------------

struct MemberEnergyRow {
  int member = 0;
  double N = 0.0;  // band of the forcing data (kFullBand for untruncated)
  bool nan_aborted = false;
  double sup_h1 = 0.0;          // sup_t |(v, v_t)|_{H^1 x L^2}
  double z_l10_tx = 0.0;        // |z_N|_{L^10_t L^10_x}
  double z_linf_l6 = 0.0;       // |z_N|_{L^inf_t L^6_x}
  double z_linf_tx = 0.0;       // |z_N|_{L^inf_{t,x}}
  double zt_l6_tx = 0.0;        // companion flow, L^6_t L^6_x
  double zt_weighted_linf = 0.0;  // |<D>^{s-delta} companion|_{L^inf_{t,x}}
  double gauge_stat = 0.0;      // five-term combination defining the good set
  double growth_ratio = 0.0;    // max_t |v(t)|_{L^2} / (t sup_{t'<=t} |v_t|_{L^2})
};

struct EnergyEnvelope {
  std::vector<double> N_list;
  std::vector<double> median, q90, worst;
  int nan_count = 0;
};

struct UniformEnergyResult {
  std::vector<MemberEnergyRow> rows;
  EnergyEnvelope envelope;
};

// Zero-data remainder solves forced by the truncated free evolution, across
// the band list; records the energy-norm sup and the forcing statistics that
// define the good set.
UniformEnergyResult uniform_energy(const GridSpec& g, const EnsembleSpec& ens,
                                   const DataSpec& data, const std::vector<double>& N_list,
                                   double T, const SolverConfig& base, double delta,
                                   int z_snapshots);

struct ConvergenceRow {
  int member = 0;
  double N = 0.0;
  double z_diff = 0.0;      // |z - z_N|_{L^5_t L^10_x}
  double oracle_rhs = 0.0;  // N^{-alpha} |<D>^alpha z|_{L^5_t L^10_x}
  double v_diff = -1.0;     // |v - v_N|_{L^inf_t (H^1 x L^2)}; -1 when not run
};

struct ConvergenceResult {
  std::vector<double> N_list;
  std::vector<ConvergenceRow> rows;
  std::vector<double> median_z, median_oracle, median_v;
  double fitted_slope = 0.0;  // log median_z against log N
};

// Forcing-difference decay in N, with the per-member multiplier-inequality
// oracle; optionally also the remainder-difference decay via matched solves.
// Throws when the grid band is below twice the largest N.
ConvergenceResult truncation_convergence(const GridSpec& g, const EnsembleSpec& ens,
                                         const DataSpec& data,
                                         const std::vector<double>& N_list, double alpha,
                                         double T, int snapshots, bool remainder,
                                         const SolverConfig& base);

struct ExceptionalRow {
  int member = 0;
  double weighted_z = 0.0;   // |<D>^alpha z|_{L^5_t L^10_x}
  double worst_ratio = 0.0;  // max_j interval value / (K |I_j|^theta)
  bool smallness_ok = false;
  bool in_good_set = false;
  bool solve_ran = false;
  bool nan_aborted = false;
  double sup_h1 = -1.0;
};

struct ExceptionalResult {
  double threshold = 0.0, bound_k = 0.0, theta = 0.0, tau = 0.0, alpha = 0.0;
  std::vector<ExceptionalRow> rows;
  std::vector<std::pair<double, double>> epsilon_curve;  // threshold -> P(exceed)
  double good_fraction = 0.0;
};

// Measures the two exclusion statistics per member, the threshold-violation
// curve, and confirms on up to solve_budget good members that the remainder
// solve stays finite.
ExceptionalResult exceptional_set_probe(const GridSpec& g, const EnsembleSpec& ens,
                                        const DataSpec& data, double alpha, double T,
                                        double tau, double theta, double threshold,
                                        int snapshots, const SolverConfig& base,
                                        int solve_budget);

}  // namespace rwave

#pragma once

#include <string>
#include <vector>

#include "rwave/solver.hpp"

namespace rwave {

struct AdmissibleCheck {
  bool ok = false;
  bool sharp = false;  // equality in the gap condition
  std::string reason;
};

// Wave admissibility in dim space dimensions: q >= 2, 2 <= r < infinity,
// 1/q + (dim-1)/(2r) <= (dim-1)/4, and the scaling relation
// 1/q + dim/r = dim/2 - s.  q may be infinity.
AdmissibleCheck admissible_pair_check(double q, double r, double s, int dim);

// A recorded time series of space norms |u(t)|_{L^r}.
struct NormTrace {
  double q = 2.0;  // time exponent this trace is meant for (infinity allowed)
  double r = 2.0;
  std::vector<double> t;
  std::vector<double> value;
};

struct QuadResult {
  double value = 0.0;
  double error_est = 0.0;  // stride-halving (Richardson) estimate on value
};

// L^q_t([a,b]) of the piecewise-linear interpolant of the recorded space
// norms: trapezoid rule on the q-th power, max for q = infinity.  [a, b] must
// lie inside the recorded range; endpoints may fall between samples.
QuadResult spacetime_norm(const NormTrace& tr, double q, double a, double b);

enum class Component { position, velocity };

// space norms of the stored snapshots
NormTrace space_norm_trace(const Trajectory& traj, double r, Component which);

// convenience: trace + quadrature in one call
QuadResult spacetime_norm(const Trajectory& traj, double q, double r, double a, double b);

struct IntervalPartition {
  std::vector<double> cuts;     // a = cuts.front(), b = cuts.back()
  bool budget_exceeded = false; // more than j_max intervals would be needed
};

// Greedy left-to-right partition of [a,b] into intervals whose L^q norm of
// the trace is at most 4*eta each (cuts may fall inside sample cells; the
// interpolated mass splits exactly).  Gives up after j_max intervals.
IntervalPartition subdivide_until_small(const NormTrace& tr, double a, double b,
                                        double eta, int j_max);

struct SmallnessReport {
  double tau = 0.0, bound_k = 0.0, theta = 0.0;
  std::vector<double> interval_value;  // L^q norm on [j tau, (j+1) tau] cap [0, T]
  std::vector<double> interval_bound;  // K |I_j|^theta
  bool all_ok = true;
};

// checks |trace|_{L^q(I_j)} <= K |I_j|^theta on the tau-grid partition of [0, T]
SmallnessReport smallness_condition(const NormTrace& tr, double T, double K,
                                    double theta, double tau);

}  // namespace rwave

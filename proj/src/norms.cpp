#include "rwave/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwave/multiplier.hpp"

namespace rwave {

AdmissibleCheck admissible_pair_check(double q, double r, double s, int dim) {
  AdmissibleCheck res;
  if (!(q >= 2.0)) {
    res.reason = "q must be >= 2";
    return res;
  }
  if (!(r >= 2.0) || std::isinf(r)) {
    res.reason = "r must satisfy 2 <= r < infinity";
    return res;
  }
  const double d = dim;
  const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  const double gap = iq + (d - 1.0) / (2.0 * r) - (d - 1.0) / 4.0;
  if (gap > 1e-12) {
    res.reason = "gap condition 1/q + (d-1)/(2r) <= (d-1)/4 fails";
    return res;
  }
  const double scaling = iq + d / r - (d / 2.0 - s);
  if (std::fabs(scaling) > 1e-9) {
    res.reason = "scaling relation 1/q + d/r = d/2 - s fails";
    return res;
  }
  res.ok = true;
  res.sharp = std::fabs(gap) <= 1e-12;
  return res;
}

namespace {

// piecewise-linear interpolation of the trace at time t (t inside range)
double pl_value(const NormTrace& tr, double t) {
  const auto& ts = tr.t;
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  if (it == ts.begin()) return tr.value.front();
  if (it == ts.end()) return tr.value.back();
  const std::size_t hi = it - ts.begin(), lo = hi - 1;
  const double span = ts[hi] - ts[lo];
  if (span <= 0.0) return tr.value[lo];
  const double w = (t - ts[lo]) / span;
  return (1.0 - w) * tr.value[lo] + w * tr.value[hi];
}

void check_range(const NormTrace& tr, double a, double b) {
  if (tr.t.size() < 2 || tr.t.size() != tr.value.size())
    throw std::invalid_argument("spacetime_norm: trace needs >= 2 samples");
  if (!(b > a)) throw std::invalid_argument("spacetime_norm: need b > a");
  const double tol = 1e-9 * std::max(1.0, std::fabs(tr.t.back()));
  if (a < tr.t.front() - tol || b > tr.t.back() + tol)
    throw std::invalid_argument("spacetime_norm: interval outside recorded range");
}

// integral of the PL interpolant of value^q over [a,b], with node values
// raised to q first (trapezoid on the q-th power)
double power_integral(const NormTrace& tr, double q, double a, double b, int stride) {
  const auto& ts = tr.t;
  // collect node indices participating with the given stride
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ts.size(); i += stride) idx.push_back(i);
  if (idx.back() != ts.size() - 1) idx.push_back(ts.size() - 1);

  auto fq = [&](std::size_t i) { return std::pow(tr.value[i], q); };
  auto fq_at = [&](double t, std::size_t lo, std::size_t hi) {
    const double span = ts[idx[hi]] - ts[idx[lo]];
    if (span <= 0.0) return fq(idx[lo]);
    const double w = (t - ts[idx[lo]]) / span;
    return (1.0 - w) * fq(idx[lo]) + w * fq(idx[hi]);
  };

  double sum = 0.0;
  for (std::size_t c = 0; c + 1 < idx.size(); ++c) {
    const double t0 = ts[idx[c]], t1 = ts[idx[c + 1]];
    if (t1 <= a || t0 >= b) continue;
    const double lo = std::max(a, t0), hi = std::min(b, t1);
    const double f0 = fq_at(lo, c, c + 1), f1 = fq_at(hi, c, c + 1);
    sum += 0.5 * (f0 + f1) * (hi - lo);
  }
  return sum;
}

}  // namespace

QuadResult spacetime_norm(const NormTrace& tr, double q, double a, double b) {
  check_range(tr, a, b);
  QuadResult res;
  if (std::isinf(q)) {
    double m = std::max(pl_value(tr, a), pl_value(tr, b));
    for (std::size_t i = 0; i < tr.t.size(); ++i)
      if (tr.t[i] >= a && tr.t[i] <= b) m = std::max(m, tr.value[i]);
    res.value = m;
    res.error_est = 0.0;
    return res;
  }
  if (!(q >= 1.0)) throw std::invalid_argument("spacetime_norm: q must be >= 1");
  const double fine = power_integral(tr, q, a, b, 1);
  const double coarse = power_integral(tr, q, a, b, 2);
  res.value = std::pow(fine, 1.0 / q);
  // trapezoid is second order: the halved-stride comparison over-estimates
  // the fine error by about 3x
  const double int_err = std::fabs(fine - coarse) / 3.0;
  res.error_est = fine > 0.0 ? res.value * int_err / (q * fine) : 0.0;
  return res;
}

NormTrace space_norm_trace(const Trajectory& traj, double r, Component which) {
  if (traj.snaps.empty())
    throw std::invalid_argument("space_norm_trace: trajectory has no snapshots");
  NormTrace tr;
  tr.r = r;
  tr.t = traj.times;
  tr.value.reserve(traj.snaps.size());
  for (const auto& s : traj.snaps)
    tr.value.push_back(lebesgue_norm(which == Component::position ? s.u : s.ut, r));
  return tr;
}

QuadResult spacetime_norm(const Trajectory& traj, double q, double r, double a, double b) {
  return spacetime_norm(space_norm_trace(traj, r, Component::position), q, a, b);
}

IntervalPartition subdivide_until_small(const NormTrace& tr, double a, double b,
                                        double eta, int j_max) {
  check_range(tr, a, b);
  if (!(eta > 0.0) || j_max < 1)
    throw std::invalid_argument("subdivide_until_small: bad eta or j_max");
  const double q = tr.q;
  const double budget = std::pow(4.0 * eta, q);

  IntervalPartition part;
  part.cuts.push_back(a);
  double cursor = a;
  const auto& ts = tr.t;
  auto fq = [&](double t) { return std::pow(pl_value(tr, t), q); };

  while (cursor < b) {
    if (static_cast<int>(part.cuts.size()) - 1 >= j_max) {
      part.budget_exceeded = true;
      return part;
    }
    // walk cells until the accumulated mass would exceed the budget
    double acc = 0.0, pos = cursor;
    double end = b;
    bool cut_inside = false;
    auto it = std::upper_bound(ts.begin(), ts.end(), cursor);
    for (;;) {
      const double cell_end = it == ts.end() ? b : std::min(*it, b);
      const double f0 = fq(pos), f1 = fq(cell_end);
      const double mass = 0.5 * (f0 + f1) * (cell_end - pos);
      if (acc + mass > budget) {
        // solve 0.5*(2 f0 + m s) * s = budget - acc for s in (0, cell width]
        const double width = cell_end - pos;
        const double m = width > 0.0 ? (f1 - f0) / width : 0.0;
        const double rem = budget - acc;
        double s;
        if (std::fabs(m) < 1e-300) {
          s = f0 > 0.0 ? rem / f0 : width;
        } else {
          const double disc = f0 * f0 + 2.0 * m * rem;
          s = disc >= 0.0 ? (std::sqrt(disc) - f0) / m : width;
        }
        s = std::clamp(s, 0.0, width);
        end = pos + s;
        cut_inside = true;
        break;
      }
      acc += mass;
      pos = cell_end;
      if (cell_end >= b) {
        end = b;
        break;
      }
      ++it;
    }
    if (end <= cursor + 1e-15 * std::max(1.0, std::fabs(b))) {
      // no forward progress possible (trace blows up at the cursor)
      part.budget_exceeded = true;
      return part;
    }
    (void)cut_inside;
    part.cuts.push_back(end);
    cursor = end;
  }
  return part;
}

SmallnessReport smallness_condition(const NormTrace& tr, double T, double K,
                                    double theta, double tau) {
  if (!(tau > 0.0) || !(T > 0.0))
    throw std::invalid_argument("smallness_condition: need positive T and tau");
  SmallnessReport rep;
  rep.tau = tau;
  rep.bound_k = K;
  rep.theta = theta;
  for (double a = 0.0; a < T; a += tau) {
    const double b = std::min(a + tau, T);
    if (!(b > a)) break;
    const double v = spacetime_norm(tr, tr.q, a, b).value;
    const double bound = K * std::pow(b - a, theta);
    rep.interval_value.push_back(v);
    rep.interval_bound.push_back(bound);
    if (v > bound) rep.all_ok = false;
  }
  return rep;
}

}  // namespace rwave

#pragma once

#include <vector>

#include "rwave/field.hpp"

namespace rwave {

// Linear wave group, diagonal in frequency and exact in time:
//   position  cos(t|xi|) u0_hat + (sin(t|xi|)/|xi|) u1_hat   (t at xi = 0)
//   velocity  -|xi| sin(t|xi|) u0_hat + cos(t|xi|) u1_hat
FieldPair linear_propagate(const FieldPair& p, double t);

// Companion flow with the bracket weight:
//   -(|xi|/<xi>) sin(t|xi|) u0_hat + (cos(t|xi|)/<xi>) u1_hat
// Its bracket-derivative identity d/dt(position flow) = <D> (this flow)
// holds exactly mode by mode.
Field tilde_propagate(const FieldPair& p, double t);

// e^{+-i t |xi|}; output is genuinely complex
Field half_wave_propagate(const Field& f, double t, int sign);

enum class FlowKind { position, tilde };

struct DyadicSupResult {
  double sup = 0.0;        // max of the space norm over the finest dyadic grid
  double argmax_t = 0.0;
  int depth = 0;
  // level_increment[k-1] = max over the new points of level k of
  // |flow(t) - flow(parent t)|_{L^r}, parent spacing 2^{-k} (b-a)
  std::vector<double> level_increment;
};

// Evaluates the chosen flow of the pair on the dyadic grid
// t = a + l (b-a) 2^{-K}, l = 0..2^K, and returns the max L^r norm; with
// with_increments also the per-level increment maxima used by the chaining
// diagnostic.
DyadicSupResult dyadic_time_sup(const FieldPair& p, double a, double b, int K,
                                double r, FlowKind kind, bool with_increments);

}  // namespace rwave

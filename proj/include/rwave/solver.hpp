#pragma once

#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "rwave/field.hpp"

namespace rwave {

struct Energy {
  double kinetic = 0.0;    // (1/2) integral (du/dt)^2
  double gradient = 0.0;   // (1/2) integral |grad u|^2
  double potential = 0.0;  // (1/6) integral u^6
  double total() const { return kinetic + gradient + potential; }
};

// Kinetic and gradient parts are spectral sums (equal to the quadrature by
// Parseval); the potential is quadrature on the dealias-padded grid so the
// sixth power is evaluated essentially alias-free.
Energy energy(const FieldPair& p);

struct EnergyTrace {
  std::vector<double> t;
  std::vector<double> kinetic, gradient, potential;
};

struct SolverConfig {
  double dt = 1e-2;
  double t_final = 1.0;
  int snapshot_stride = 1;       // record every stride-th step (0 and final always)
  bool nonlinearity_on = true;   // off: pure linear group, for validation
  bool store_snapshots = true;   // off: times/energy only (observer still runs)
  bool track_energy = true;
};

struct Trajectory {
  GridSpec grid;
  double dt_used = 0.0;
  std::vector<double> times;       // snapshot times
  std::vector<FieldPair> snaps;    // empty when store_snapshots is off
  EnergyTrace energy;
  bool nan_aborted = false;
  double nan_time = -1.0;
};

// called at every snapshot time with the current state
using SnapshotFn = std::function<void(double t, const FieldPair& state)>;

// d^2u/dt^2 - Lap u + u^5 = 0 from the given data.  Fourth-order
// integrating-factor RK4: the linear group is applied exactly per mode, only
// the quintic term is integrated numerically, on the padded product grid.
// Throws if dt exceeds half the grid spacing.
Trajectory evolve_nlw(const FieldPair& initial, const SolverConfig& cfg,
                      const SnapshotFn& obs = {});

// d^2v/dt^2 - Lap v + (v + f)^5 = 0 where f(t) is the free evolution of
// forcing_data, evaluated in closed form at every stage time.
Trajectory evolve_perturbed(const FieldPair& v_initial, const FieldPair& forcing_data,
                            const SolverConfig& cfg, const SnapshotFn& obs = {});

// sentinel: keep the full band (identity projection)
inline constexpr double kFullBand = std::numeric_limits<double>::infinity();

// band projection of both components (dyadic N, or kFullBand for a copy)
FieldPair truncate_data(const FieldPair& p, double N);

// pointwise split of (v + z)^5 - v^5 into the leading term 5 z v^4 and the
// remainder 10 z^2 v^3 + 10 z^3 v^2 + 5 z^4 v + z^5
std::pair<Field, Field> nonlinearity_split(const Field& z, const Field& v);

// u(x) -> lambda^{1/2} u(lambda x) with velocities scaled by lambda^{3/2};
// returns the pair on the rescaled box (length / lambda), same mode indices
FieldPair scaling_transform(const FieldPair& p, double lambda);

}  // namespace rwave

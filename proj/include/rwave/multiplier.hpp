#pragma once

#include <array>
#include <optional>
#include <vector>

#include "rwave/field.hpp"

namespace rwave {

// ---------------------------------------------------------------------------
// Fourier multipliers diagonal in frequency: real symbol evaluated on the
// grid's lattice, applied mode by mode.
// ---------------------------------------------------------------------------

struct Multiplier {
  GridSpec grid;
  std::vector<double> symbol;

  void apply_inplace(Field& f) const;
  Field applied(const Field& f) const;
};

// Radial profile of the dyadic decomposition: smooth, 1 on [0, 5/4],
// 0 on [8/5, inf), monotone in between.
double lp_phi(double x);

enum class BandMode { exact, at_most, at_least };

bool is_dyadic(double N);  // 1, 2, 4, 8, ...

// Symbol value of the band projector at radial frequency |xi|.
//   exact:    N == 1: phi(|xi|),  N >= 2: phi(|xi|/N) - phi(2|xi|/N)
//   at_most:  phi(|xi|/N)   (telescoped sum of exact bands up to N)
//   at_least: 1 - at_most(N/2) for N >= 2, identically 1 for N == 1
double lp_symbol(double xi_norm, double N, BandMode mode);

Multiplier make_lp_multiplier(const GridSpec& g, double N, BandMode mode);

// smallest dyadic N whose at_most projector is the identity on this grid
double lp_full_band(const GridSpec& g);

// Projects onto the dyadic band; throws on non-dyadic N.
Field littlewood_paley_project(const Field& f, double N, BandMode mode);

// ---------------------------------------------------------------------------
// Unit cube decomposition.  Cubes are n + [-1/2, 1/2)^dim over integer n.
// The smooth window is a normalized product bump: psi1(t) = b(t) / sum_m
// b(t - m) with b(t) = exp(-1/(1-t^2)) on (-1,1), so that sum_n psi(xi - n)
// is identically 1 and supp psi lies in [-1,1]^dim.
// ---------------------------------------------------------------------------

enum class CubeCutoff { smooth, sharp };

double cube_psi1(double t);  // one-dimensional normalized window

// Integer cube label of a frequency.  Ties at half-integer boundaries round
// away from zero so that the label is odd under xi -> -xi, which keeps
// randomized spectra Hermitian; off the boundary this is the usual
// n + [-1/2, 1/2) membership.
int cube_coord(double t);

struct CubeSet {
  int radius = 0;                           // labels range over [-radius, radius]^dim
  std::vector<std::array<int, 3>> cubes;    // cubes meeting the lattice (window sense)
  std::int64_t skipped = 0;                 // labels in range with empty overlap
};

// Enumerates cube labels with |n_i| <= ceil(per-axis max frequency) + 1 and
// records which of them actually meet the lattice.
CubeSet enumerate_cubes(const GridSpec& g, CubeCutoff cutoff);

// Projects onto cube n.  Throws if the cube does not meet the lattice in the
// sense of the chosen cutoff.
Field cube_project(const Field& f, const std::array<int, 3>& n, CubeCutoff cutoff);

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

enum class Homogeneity { inhomogeneous, homogeneous };

struct SobolevNorm {
  double value = 0.0;      // homogeneous: zero mode excluded
  double zero_mode = 0.0;  // |u_hat(0)| * box^{dim/2}, reported separately
};

// Weight <xi>^s (inhomogeneous) or |xi|^s (homogeneous, zero mode dropped).
SobolevNorm sobolev_norm(const Field& f, double s, Homogeneity h);

// Pair norm: sqrt(|u|_{s}^2 + |du/dt|_{s-1}^2) with the same homogeneity.
SobolevNorm sobolev_pair_norm(const FieldPair& p, double s, Homogeneity h);

// Cell-volume weighted l^r norm of the physical values; r may be
// infinity (max).  Requires r >= 1.
double lebesgue_norm(const Field& f, double r);

}  // namespace rwave

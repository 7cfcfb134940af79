#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rwave/multiplier.hpp"

namespace rwave {

// Complex coefficient law for the cube decomposition.  All three have unit
// second moment E|g|^2 = 1 and even exponential moments.
enum class DistributionKind { gaussian, rademacher, uniform_disk };

std::string to_string(DistributionKind k);
DistributionKind distribution_from_string(const std::string& s);

// One independent coefficient per cube label and data component, drawn as a
// pure function of (seed, component, label).  Labels with a positive last
// nonzero coordinate are drawn directly; their mirrors are conjugated; the
// zero label is real.  That makes randomized spectra of real fields Hermitian
// by construction.
cx draw_coefficient(DistributionKind kind, std::uint64_t seed, int component,
                    const std::array<int, 3>& n);

// per-member seed derived from the ensemble master seed
std::uint64_t member_seed(std::uint64_t master, int member);

// true when the last nonzero coordinate of n is positive
bool in_half_lattice(const std::array<int, 3>& n, int dim);

// Dense table of coefficients over the label box [-radius, radius]^dim for
// both data components.
struct RandomCoefficients {
  GridSpec grid;
  DistributionKind kind = DistributionKind::gaussian;
  std::uint64_t seed = 0;
  int radius = 0;
  std::int64_t skipped_cubes = 0;            // labels with no lattice overlap
  std::vector<cx> table[2];                  // component 0: positions, 1: velocities

  const cx& coeff(int component, const std::array<int, 3>& n) const;
  std::int64_t box_count() const;

  // serialization: seed, distribution tag and grid key only (values are
  // re-derived, never stored)
  std::string to_json() const;
  static RandomCoefficients from_json(const std::string& text);
};

RandomCoefficients sample_coefficients(const GridSpec& g, DistributionKind kind,
                                       std::uint64_t seed);

// Multiplies each component's spectrum by the cube-summed coefficient gain
// G_j(xi) = sum_n g_{n,j} psi(xi - n) (smooth) or g_{cube(xi),j} (sharp).
FieldPair randomize_pair(const FieldPair& p, const RandomCoefficients& coeffs,
                         CubeCutoff cutoff);

// the per-mode gain vectors themselves (used by tests and diagnostics)
std::vector<cx> randomization_gain(const RandomCoefficients& coeffs, int component,
                                   CubeCutoff cutoff);

enum class RoughProfile { power_law, randomized_phase };

// Synthesizes a pair whose spectra follow |u0_hat| ~ <xi>^{-s-dim/2-eps0} and
// |u1_hat| ~ <xi>^{-(s-1)-dim/2-eps0}, each component normalized to unit
// Sobolev norm (H^s and H^{s-1}).  The unmatched -points/2 planes are zeroed.
// power_law uses constant phase; randomized_phase draws Hermitian phases from
// the seed.
FieldPair make_rough_pair(const GridSpec& g, double s, RoughProfile profile,
                          std::uint64_t seed, double eps0 = 0.01);

// Monte Carlo comparison of (E|sum_n g_n c_n|^p)^{1/p} against sqrt(p)*|c|_2.
// Coefficients are given on half-lattice labels plus optionally the zero
// label; the mirrored half is implied by conjugation.
struct KhintchineRow {
  double p = 0.0;
  double moment = 0.0;  // (E|X|^p)^{1/p} estimate
  double bound = 0.0;   // sqrt(p) * |c|_{l^2}
  double ratio = 0.0;   // moment / bound
};

std::vector<KhintchineRow> khintchine_check(
    DistributionKind kind,
    const std::vector<std::pair<std::array<int, 3>, cx>>& half_coeffs,
    const std::vector<double>& p_list, int samples, std::uint64_t seed);

}  // namespace rwave

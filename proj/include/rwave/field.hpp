#pragma once

#include <vector>

#include "rwave/grid.hpp"

namespace rwave {

// A scalar field on a GridSpec.  The spectral representation (full complex
// lattice in FFT layout, forward transform normalized by 1/points^dim) is the
// authoritative state; the physical representation is a cache.  Real-valued
// fields keep a Hermitian spectrum; physical() enforces that by checking the
// imaginary residue of the inverse transform.  Genuinely complex fields (half
// wave flows) use complex_physical() instead.
class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& g) : grid_(g), spec_(g.total(), cx{0.0, 0.0}) {}

  static Field from_physical(const GridSpec& g, const std::vector<double>& values);
  static Field from_spectral(const GridSpec& g, std::vector<cx> coeffs);

  const GridSpec& grid() const { return grid_; }

  const std::vector<cx>& spectral() const { return spec_; }
  // mutable access; invalidates the physical cache
  std::vector<cx>& spectral_mut() {
    phys_ok_ = false;
    return spec_;
  }

  // physical values of a real-valued field; throws if the spectrum is not
  // Hermitian (imaginary residue above 1e-10 relative to the field size)
  const std::vector<double>& physical() const;
  // physical values without the realness requirement
  std::vector<cx> complex_physical() const;
  // largest |Im| of the inverse transform (realness diagnostic)
  double imag_residue() const;

  double l2_norm() const;  // cell-volume weighted
  bool finite() const;

 private:
  GridSpec grid_;
  std::vector<cx> spec_;
  mutable std::vector<double> phys_;
  mutable bool phys_ok_ = false;
};

// (u, du/dt) position/velocity pair
struct FieldPair {
  Field u;
  Field ut;

  FieldPair() = default;
  FieldPair(Field a, Field b) : u(std::move(a)), ut(std::move(b)) {}
  explicit FieldPair(const GridSpec& g) : u(g), ut(g) {}
  const GridSpec& grid() const { return u.grid(); }
};

}  // namespace rwave

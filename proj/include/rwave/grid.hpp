#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace rwave {

using cx = std::complex<double>;

// Uniform periodic grid on [-L/2, L/2)^dim with a power-of-two number of
// points per axis.  Spectral data lives on the dual lattice (2*pi/L)*k with
// k in [-n/2, n/2-1] per axis, stored in FFT layout (k = i for i < n/2,
// k = i - n otherwise).  dealias_ratio is the padding factor used when the
// quintic nonlinearity is evaluated pointwise.
struct GridSpec {
  int dim = 3;
  int points = 16;          // per axis
  double box = 16.0;        // L
  double dealias_ratio = 2.0;

  std::int64_t total() const {
    std::int64_t t = 1;
    for (int a = 0; a < dim; ++a) t *= points;
    return t;
  }
  double dx() const { return box / points; }
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= dx();
    return v;
  }
  double freq_spacing() const { return 2.0 * M_PI / box; }
  // largest per-axis frequency magnitude present (the unmatched -n/2 mode)
  double xi_max_axis() const { return freq_spacing() * (points / 2); }
  // largest |xi| over the full lattice
  double xi_max() const;

  int wavenumber(int i) const { return i < points / 2 ? i : i - points; }
  double freq(int i) const { return freq_spacing() * wavenumber(i); }

  // decompose a flat row-major index into per-axis indices
  std::array<int, 3> unravel(std::int64_t idx) const;
  // frequency vector of a flat index (unused axes are zero)
  std::array<double, 3> freq_of(std::int64_t idx) const;
  double freq_norm(std::int64_t idx) const;     // |xi|
  double freq_bracket(std::int64_t idx) const;  // <xi> = sqrt(1+|xi|^2)

  bool same_shape(const GridSpec& o) const {
    return dim == o.dim && points == o.points && box == o.box;
  }
  // stable identifier used in caches, manifests and coefficient files
  std::string key() const;

  bool operator==(const GridSpec& o) const = default;
};

// Validates and returns a GridSpec.  Throws std::invalid_argument on a bad
// combination (dim outside 1..3, points not a power of two or < 8,
// non-positive box, dealias_ratio < 1).
GridSpec make_grid(int dim, int points, double box_length, double dealias_ratio);

}  // namespace rwave

#include "rwave/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rwave {

std::array<int, 3> GridSpec::unravel(std::int64_t idx) const {
  std::array<int, 3> out{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    out[a] = static_cast<int>(idx % points);
    idx /= points;
  }
  return out;
}

std::array<double, 3> GridSpec::freq_of(std::int64_t idx) const {
  auto iv = unravel(idx);
  std::array<double, 3> xi{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) xi[a] = freq(iv[a]);
  return xi;
}

double GridSpec::freq_norm(std::int64_t idx) const {
  auto xi = freq_of(idx);
  return std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
}

double GridSpec::freq_bracket(std::int64_t idx) const {
  auto xi = freq_of(idx);
  return std::sqrt(1.0 + xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
}

double GridSpec::xi_max() const {
  return xi_max_axis() * std::sqrt(static_cast<double>(dim));
}

std::string GridSpec::key() const {
  std::ostringstream os;
  os << "d" << dim << "n" << points << "L" << box << "r" << dealias_ratio;
  return os.str();
}

GridSpec make_grid(int dim, int points, double box_length, double dealias_ratio) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("make_grid: dim must be 1, 2 or 3");
  if (points < 8 || (points & (points - 1)) != 0)
    throw std::invalid_argument("make_grid: points must be a power of two >= 8");
  if (!(box_length > 0.0))
    throw std::invalid_argument("make_grid: box length must be positive");
  if (!(dealias_ratio >= 1.0))
    throw std::invalid_argument("make_grid: dealias ratio must be >= 1");
  GridSpec g;
  g.dim = dim;
  g.points = points;
  g.box = box_length;
  g.dealias_ratio = dealias_ratio;
  return g;
}

}  // namespace rwave

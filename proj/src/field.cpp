#include "rwave/field.hpp"

#include <cmath>
#include <stdexcept>

#include "rwave/fft.hpp"
#include "rwave/kernels.hpp"

namespace rwave {

Field Field::from_physical(const GridSpec& g, const std::vector<double>& values) {
  if (static_cast<std::int64_t>(values.size()) != g.total())
    throw std::invalid_argument("Field::from_physical: size mismatch");
  Field f(g);
  std::vector<cx> scratch(values.begin(), values.end());
  fft::forward(g.dim, g.points, scratch.data(), f.spec_.data());
  kernels::scale(f.spec_.data(), 1.0 / static_cast<double>(g.total()), f.spec_.size());
  f.phys_ = values;
  f.phys_ok_ = true;
  return f;
}

Field Field::from_spectral(const GridSpec& g, std::vector<cx> coeffs) {
  if (static_cast<std::int64_t>(coeffs.size()) != g.total())
    throw std::invalid_argument("Field::from_spectral: size mismatch");
  Field f(g);
  f.spec_ = std::move(coeffs);
  return f;
}

const std::vector<double>& Field::physical() const {
  if (phys_ok_) return phys_;
  std::vector<cx> scratch(spec_.size());
  fft::backward(grid_.dim, grid_.points, spec_.data(), scratch.data());
  double scale = 0.0;
  for (const cx& c : spec_) scale = std::max(scale, std::abs(c));
  const double residue = kernels::max_abs_imag(scratch.data(), scratch.size());
  if (residue > 1e-10 * std::max(1.0, scale * grid_.total()))
    throw std::runtime_error("Field::physical: spectrum is not Hermitian");
  phys_.resize(scratch.size());
  kernels::real_part(phys_.data(), scratch.data(), scratch.size());
  phys_ok_ = true;
  return phys_;
}

std::vector<cx> Field::complex_physical() const {
  std::vector<cx> out(spec_.size());
  fft::backward(grid_.dim, grid_.points, spec_.data(), out.data());
  return out;
}

double Field::imag_residue() const {
  std::vector<cx> scratch(spec_.size());
  fft::backward(grid_.dim, grid_.points, spec_.data(), scratch.data());
  return kernels::max_abs_imag(scratch.data(), scratch.size());
}

double Field::l2_norm() const {
  // Parseval: cell_volume * sum_x |u|^2 == box^dim * sum_k |u_hat|^2
  double vol = 1.0;
  for (int a = 0; a < grid_.dim; ++a) vol *= grid_.box;
  return std::sqrt(vol * kernels::sum_sq(spec_.data(), spec_.size()));
}

bool Field::finite() const { return !kernels::any_non_finite(spec_.data(), spec_.size()); }

}  // namespace rwave

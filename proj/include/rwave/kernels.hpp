#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

// Data-parallel inner loops.  Every kernel comes in an OpenMP flavour and a
// plain serial flavour; the unsuffixed name dispatches on the global policy.
// Reductions are accumulated over fixed-size blocks whose partial sums are
// combined in index order, so the two flavours (and any thread count) produce
// bit-identical results.  The serial flavour is kept as the reference the
// tests and the benchmark compare against.

namespace rwave::kernels {

using cx = std::complex<double>;

enum class Exec { serial, openmp };

Exec exec_policy();
void set_exec_policy(Exec e);
int thread_count();  // threads the openmp flavour will use (1 without OpenMP)

// y[i] *= s[i]
void apply_real_symbol_serial(cx* y, const double* s, std::size_t n);
void apply_real_symbol_omp(cx* y, const double* s, std::size_t n);
void apply_real_symbol(cx* y, const double* s, std::size_t n);

// y[i] *= s[i]
void apply_cx_symbol_serial(cx* y, const cx* s, std::size_t n);
void apply_cx_symbol_omp(cx* y, const cx* s, std::size_t n);
void apply_cx_symbol(cx* y, const cx* s, std::size_t n);

// y[i] += a * x[i]
void accum_scaled_serial(cx* y, const cx* x, cx a, std::size_t n);
void accum_scaled_omp(cx* y, const cx* x, cx a, std::size_t n);
void accum_scaled(cx* y, const cx* x, cx a, std::size_t n);

// y[i] *= a
void scale_serial(cx* y, double a, std::size_t n);
void scale_omp(cx* y, double a, std::size_t n);
void scale(cx* y, double a, std::size_t n);

// out[i] = u[i]^5
void pow5_serial(double* out, const double* u, std::size_t n);
void pow5_omp(double* out, const double* u, std::size_t n);
void pow5(double* out, const double* u, std::size_t n);

// out[i] = (u[i] + f[i])^5
void pow5_sum_serial(double* out, const double* u, const double* f, std::size_t n);
void pow5_sum_omp(double* out, const double* u, const double* f, std::size_t n);
void pow5_sum(double* out, const double* u, const double* f, std::size_t n);

// sum_i |u[i]|^p for real u, p >= 1 (fast paths for small integer p)
double sum_abs_pow_serial(const double* u, std::size_t n, double p);
double sum_abs_pow_omp(const double* u, std::size_t n, double p);
double sum_abs_pow(const double* u, std::size_t n, double p);

// sum_i |u[i]|^2 for complex u
double sum_sq_serial(const cx* u, std::size_t n);
double sum_sq_omp(const cx* u, std::size_t n);
double sum_sq(const cx* u, std::size_t n);

// sum_i w[i] * |u[i]|^2 for complex u, real weights
double weighted_sum_sq_serial(const cx* u, const double* w, std::size_t n);
double weighted_sum_sq_omp(const cx* u, const double* w, std::size_t n);
double weighted_sum_sq(const cx* u, const double* w, std::size_t n);

// max_i |u[i]|
double max_abs_serial(const double* u, std::size_t n);
double max_abs_omp(const double* u, std::size_t n);
double max_abs(const double* u, std::size_t n);

// max_i |Im u[i]|
double max_abs_imag_serial(const cx* u, std::size_t n);
double max_abs_imag_omp(const cx* u, std::size_t n);
double max_abs_imag(const cx* u, std::size_t n);

// out[i] = Re in[i]
void real_part_serial(double* out, const cx* in, std::size_t n);
void real_part_omp(double* out, const cx* in, std::size_t n);
void real_part(double* out, const cx* in, std::size_t n);

bool any_non_finite(const cx* u, std::size_t n);

// Fixed reduction block size shared by every summation in the library.
inline constexpr std::size_t kReduceBlock = 8192;

// sum_i f(i), accumulated per block and combined in block order.  Results are
// identical for both policies and any thread count.
template <class F>
double blocked_sum(std::size_t n, F&& f) {
  const std::size_t nb = (n + kReduceBlock - 1) / kReduceBlock;
  if (exec_policy() == Exec::openmp) {
    std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(nb); ++b) {
      const std::size_t lo = b * kReduceBlock;
      const std::size_t hi = std::min(n, lo + kReduceBlock);
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += f(i);
      partial[b] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
  }
  double total = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t lo = b * kReduceBlock;
    const std::size_t hi = std::min(n, lo + kReduceBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    total += s;
  }
  return total;
}

// max_i f(i) over f >= 0
template <class F>
double blocked_max(std::size_t n, F&& f) {
  const std::size_t nb = (n + kReduceBlock - 1) / kReduceBlock;
  if (exec_policy() == Exec::openmp) {
    std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(nb); ++b) {
      const std::size_t lo = b * kReduceBlock;
      const std::size_t hi = std::min(n, lo + kReduceBlock);
      double m = 0.0;
      for (std::size_t i = lo; i < hi; ++i) m = std::max(m, f(i));
      partial[b] = m;
    }
    double m = 0.0;
    for (double p : partial) m = std::max(m, p);
    return m;
  }
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, f(i));
  return m;
}

}  // namespace rwave::kernels

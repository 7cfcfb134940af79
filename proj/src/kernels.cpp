#include "rwave/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rwave::kernels {

namespace {

std::atomic<Exec> g_policy{Exec::openmp};

// Reduction block size.  Partial sums are formed per block and combined in
// block order, independent of how blocks are assigned to threads.
constexpr std::size_t kBlock = 8192;

inline std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

template <class F>
double blocked_reduce_serial(std::size_t n, F&& block_sum) {
  double total = 0.0;
  for (std::size_t b = 0; b < block_count(n); ++b)
    total += block_sum(b * kBlock, std::min(n, (b + 1) * kBlock));
  return total;
}

template <class F>
double blocked_reduce_omp(std::size_t n, F&& block_sum) {
  const std::size_t nb = block_count(n);
  std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nb); ++b)
    partial[b] = block_sum(b * kBlock, std::min(n, (b + 1) * kBlock));
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

template <class F>
double blocked_max_serial(std::size_t n, F&& block_max) {
  double m = 0.0;
  for (std::size_t b = 0; b < block_count(n); ++b)
    m = std::max(m, block_max(b * kBlock, std::min(n, (b + 1) * kBlock)));
  return m;
}

template <class F>
double blocked_max_omp(std::size_t n, F&& block_max) {
  const std::size_t nb = block_count(n);
  std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nb); ++b)
    partial[b] = block_max(b * kBlock, std::min(n, (b + 1) * kBlock));
  double m = 0.0;
  for (double p : partial) m = std::max(m, p);
  return m;
}

inline double abs_pow(double x, double p) {
  const double a = std::fabs(x);
  if (p == 2.0) return a * a;
  if (p == 1.0) return a;
  if (p == 4.0) { double s = a * a; return s * s; }
  if (p == 5.0) { double s = a * a; return s * s * a; }
  if (p == 6.0) { double s = a * a; return s * s * s; }
  if (p == 10.0) { double s = a * a; double q = s * s; return q * q * s; }
  return std::pow(a, p);
}

}  // namespace

Exec exec_policy() { return g_policy.load(std::memory_order_relaxed); }
void set_exec_policy(Exec e) { g_policy.store(e, std::memory_order_relaxed); }

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void apply_real_symbol_serial(cx* y, const double* s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] *= s[i];
}
void apply_real_symbol_omp(cx* y, const double* s, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) y[i] *= s[i];
}
void apply_real_symbol(cx* y, const double* s, std::size_t n) {
  exec_policy() == Exec::openmp ? apply_real_symbol_omp(y, s, n)
                                : apply_real_symbol_serial(y, s, n);
}

void apply_cx_symbol_serial(cx* y, const cx* s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] *= s[i];
}
void apply_cx_symbol_omp(cx* y, const cx* s, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) y[i] *= s[i];
}
void apply_cx_symbol(cx* y, const cx* s, std::size_t n) {
  exec_policy() == Exec::openmp ? apply_cx_symbol_omp(y, s, n)
                                : apply_cx_symbol_serial(y, s, n);
}

void accum_scaled_serial(cx* y, const cx* x, cx a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}
void accum_scaled_omp(cx* y, const cx* x, cx a, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) y[i] += a * x[i];
}
void accum_scaled(cx* y, const cx* x, cx a, std::size_t n) {
  exec_policy() == Exec::openmp ? accum_scaled_omp(y, x, a, n)
                                : accum_scaled_serial(y, x, a, n);
}

void scale_serial(cx* y, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] *= a;
}
void scale_omp(cx* y, double a, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) y[i] *= a;
}
void scale(cx* y, double a, std::size_t n) {
  exec_policy() == Exec::openmp ? scale_omp(y, a, n) : scale_serial(y, a, n);
}

void pow5_serial(double* out, const double* u, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double x = u[i], x2 = x * x;
    out[i] = x2 * x2 * x;
  }
}
void pow5_omp(double* out, const double* u, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    double x = u[i], x2 = x * x;
    out[i] = x2 * x2 * x;
  }
}
void pow5(double* out, const double* u, std::size_t n) {
  exec_policy() == Exec::openmp ? pow5_omp(out, u, n) : pow5_serial(out, u, n);
}

void pow5_sum_serial(double* out, const double* u, const double* f, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double x = u[i] + f[i], x2 = x * x;
    out[i] = x2 * x2 * x;
  }
}
void pow5_sum_omp(double* out, const double* u, const double* f, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    double x = u[i] + f[i], x2 = x * x;
    out[i] = x2 * x2 * x;
  }
}
void pow5_sum(double* out, const double* u, const double* f, std::size_t n) {
  exec_policy() == Exec::openmp ? pow5_sum_omp(out, u, f, n)
                                : pow5_sum_serial(out, u, f, n);
}

double sum_abs_pow_serial(const double* u, std::size_t n, double p) {
  return blocked_reduce_serial(n, [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t i = a; i < b; ++i) s += abs_pow(u[i], p);
    return s;
  });
}
double sum_abs_pow_omp(const double* u, std::size_t n, double p) {
  return blocked_reduce_omp(n, [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t i = a; i < b; ++i) s += abs_pow(u[i], p);
    return s;
  });
}
double sum_abs_pow(const double* u, std::size_t n, double p) {
  return exec_policy() == Exec::openmp ? sum_abs_pow_omp(u, n, p)
                                       : sum_abs_pow_serial(u, n, p);
}

double sum_sq_serial(const cx* u, std::size_t n) {
  return blocked_reduce_serial(n, [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t i = a; i < b; ++i) s += std::norm(u[i]);
    return s;
  });
}
double sum_sq_omp(const cx* u, std::size_t n) {
  return blocked_reduce_omp(n, [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t i = a; i < b; ++i) s += std::norm(u[i]);
    return s;
  });
}
double sum_sq(const cx* u, std::size_t n) {
  return exec_policy() == Exec::openmp ? sum_sq_omp(u, n) : sum_sq_serial(u, n);
}

double weighted_sum_sq_serial(const cx* u, const double* w, std::size_t n) {
  return blocked_reduce_serial(n, [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t i = a; i < b; ++i) s += w[i] * std::norm(u[i]);
    return s;
  });
}
double weighted_sum_sq_omp(const cx* u, const double* w, std::size_t n) {
  return blocked_reduce_omp(n, [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t i = a; i < b; ++i) s += w[i] * std::norm(u[i]);
    return s;
  });
}
double weighted_sum_sq(const cx* u, const double* w, std::size_t n) {
  return exec_policy() == Exec::openmp ? weighted_sum_sq_omp(u, w, n)
                                       : weighted_sum_sq_serial(u, w, n);
}

double max_abs_serial(const double* u, std::size_t n) {
  return blocked_max_serial(n, [&](std::size_t a, std::size_t b) {
    double m = 0.0;
    for (std::size_t i = a; i < b; ++i) m = std::max(m, std::fabs(u[i]));
    return m;
  });
}
double max_abs_omp(const double* u, std::size_t n) {
  return blocked_max_omp(n, [&](std::size_t a, std::size_t b) {
    double m = 0.0;
    for (std::size_t i = a; i < b; ++i) m = std::max(m, std::fabs(u[i]));
    return m;
  });
}
double max_abs(const double* u, std::size_t n) {
  return exec_policy() == Exec::openmp ? max_abs_omp(u, n) : max_abs_serial(u, n);
}

double max_abs_imag_serial(const cx* u, std::size_t n) {
  return blocked_max_serial(n, [&](std::size_t a, std::size_t b) {
    double m = 0.0;
    for (std::size_t i = a; i < b; ++i) m = std::max(m, std::fabs(u[i].imag()));
    return m;
  });
}
double max_abs_imag_omp(const cx* u, std::size_t n) {
  return blocked_max_omp(n, [&](std::size_t a, std::size_t b) {
    double m = 0.0;
    for (std::size_t i = a; i < b; ++i) m = std::max(m, std::fabs(u[i].imag()));
    return m;
  });
}
double max_abs_imag(const cx* u, std::size_t n) {
  return exec_policy() == Exec::openmp ? max_abs_imag_omp(u, n)
                                       : max_abs_imag_serial(u, n);
}

void real_part_serial(double* out, const cx* in, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i].real();
}
void real_part_omp(double* out, const cx* in, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) out[i] = in[i].real();
}
void real_part(double* out, const cx* in, std::size_t n) {
  exec_policy() == Exec::openmp ? real_part_omp(out, in, n)
                                : real_part_serial(out, in, n);
}

bool any_non_finite(const cx* u, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(u[i].real()) || !std::isfinite(u[i].imag())) return true;
  return false;
}

}  // namespace rwave::kernels

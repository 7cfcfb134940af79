// Timing comparison of the serial reference kernels against the OpenMP
// flavours, plus the transform and flow-evaluation hot paths they feed.
// Usage: bench_kernels [repeats]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "rwave/fft.hpp"
#include "rwave/kernels.hpp"
#include "rwave/propagator.hpp"
#include "rwave/randomization.hpp"
#include "rwave/rng.hpp"

using namespace rwave;

namespace {

double now_seconds() {
  const auto t = std::chrono::steady_clock::now().time_since_epoch();
  return std::chrono::duration<double>(t).count();
}

// best-of-k wall time of a callable, in seconds
template <class Fn>
double best_time(int repeats, Fn&& fn) {
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < repeats; ++r) {
    const double t0 = now_seconds();
    fn();
    best = std::min(best, now_seconds() - t0);
  }
  return best;
}

volatile double g_sink = 0.0;  // defeat dead-code elimination

void report(const char* name, std::size_t n, double serial_s, double omp_s) {
  std::printf("%-22s %10zu %12.3f us %12.3f us %8.2fx\n", name, n, serial_s * 1e6,
              omp_s * 1e6, serial_s / omp_s);
}

void bench_reductions(int repeats) {
  std::printf("%-22s %10s %15s %15s %9s\n", "kernel", "n", "serial", "openmp",
              "speedup");
  for (const std::size_t n : {std::size_t{1} << 14, std::size_t{1} << 18,
                              std::size_t{1} << 22}) {
    rng::Stream st(42u, {n});
    std::vector<double> re(n);
    std::vector<cx> z(n);
    for (auto& v : re) v = st.next_gaussian();
    for (auto& v : z) v = cx{st.next_gaussian(), st.next_gaussian()};

    report("sum_abs_pow r=6", n,
           best_time(repeats, [&] { g_sink = kernels::sum_abs_pow_serial(re.data(), n, 6.0); }),
           best_time(repeats, [&] { g_sink = kernels::sum_abs_pow_omp(re.data(), n, 6.0); }));
    report("sum_sq", n,
           best_time(repeats, [&] { g_sink = kernels::sum_sq_serial(z.data(), n); }),
           best_time(repeats, [&] { g_sink = kernels::sum_sq_omp(z.data(), n); }));
    report("max_abs", n,
           best_time(repeats, [&] { g_sink = kernels::max_abs_serial(re.data(), n); }),
           best_time(repeats, [&] { g_sink = kernels::max_abs_omp(re.data(), n); }));
    report("max_abs_imag", n,
           best_time(repeats, [&] { g_sink = kernels::max_abs_imag_serial(z.data(), n); }),
           best_time(repeats, [&] { g_sink = kernels::max_abs_imag_omp(z.data(), n); }));
  }
}

void bench_transform(int repeats) {
  std::printf("\n%-22s %10s %15s\n", "transform", "n", "round trip");
  for (const int pts : {16, 32, 64}) {
    const GridSpec g = make_grid(3, pts, 8.0, 2.0);
    rng::Stream st(7u, {static_cast<std::uint64_t>(pts)});
    std::vector<cx> spec(g.total()), phys(g.total());
    for (auto& v : spec) v = cx{st.next_gaussian(), st.next_gaussian()};
    const double t = best_time(repeats, [&] {
      fft::backward(g.dim, g.points, spec.data(), phys.data());
      fft::forward(g.dim, g.points, phys.data(), spec.data());
    });
    std::printf("%-22s %10lld %12.3f us\n", "c2c fwd+bwd", // NOLINT
                static_cast<long long>(g.total()), t * 1e6);
  }
}

void bench_flow(int repeats) {
  std::printf("\n%-22s %10s %15s\n", "flow sweep", "grid", "per time point");
  for (const int pts : {16, 32}) {
    const GridSpec g = make_grid(3, pts, 8.0, 2.0);
    const FieldPair p = make_rough_pair(g, 0.75, RoughProfile::randomized_phase, 7u);
    const int depth = 6;  // 65 evaluation points
    const double t = best_time(repeats, [&] {
      const auto res = dyadic_time_sup(p, 0.0, 1.0, depth, 6.0, FlowKind::position,
                                       false);
      g_sink = res.sup;
    });
    std::printf("%-22s %7d^3 %12.3f us\n", "dyadic position L6", pts,
                t / ((1 << depth) + 1) * 1e6);
  }
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
  std::printf("repeats: %d (best-of timing)\n\n", repeats);
  bench_reductions(repeats);
  bench_transform(repeats);
  bench_flow(repeats);
  return 0;
}

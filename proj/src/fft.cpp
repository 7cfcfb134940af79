#include "rwave/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace rwave::fft {

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex g_mutex;
std::map<std::pair<int, int>, PlanPair> g_plans;

std::int64_t total_points(int dim, int points) {
  std::int64_t t = 1;
  for (int a = 0; a < dim; ++a) t *= points;
  return t;
}

// Plan creation is not thread safe in FFTW; execution via the new-array
// interface is.  Plans are made once per shape on scratch buffers.
const PlanPair& plans_for(int dim, int points) {
  std::lock_guard<std::mutex> lock(g_mutex);
  auto it = g_plans.find({dim, points});
  if (it != g_plans.end()) return it->second;

  const std::int64_t n = total_points(dim, points);
  std::vector<cx> a(n), b(n);
  int dims[3] = {points, points, points};
  PlanPair p;
  p.fwd = fftw_plan_dft(dim, dims,
                        reinterpret_cast<fftw_complex*>(a.data()),
                        reinterpret_cast<fftw_complex*>(b.data()),
                        FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.bwd = fftw_plan_dft(dim, dims,
                        reinterpret_cast<fftw_complex*>(a.data()),
                        reinterpret_cast<fftw_complex*>(b.data()),
                        FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p.fwd || !p.bwd) throw std::runtime_error("fftw planning failed");
  return g_plans.emplace(std::make_pair(dim, points), p).first->second;
}

}  // namespace

void forward(int dim, int points, const cx* in, cx* out) {
  if (in == out) throw std::invalid_argument("fft: in-place transform not supported");
  const PlanPair& p = plans_for(dim, points);
  fftw_execute_dft(p.fwd,
                   reinterpret_cast<fftw_complex*>(const_cast<cx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void backward(int dim, int points, const cx* in, cx* out) {
  if (in == out) throw std::invalid_argument("fft: in-place transform not supported");
  const PlanPair& p = plans_for(dim, points);
  fftw_execute_dft(p.bwd,
                   reinterpret_cast<fftw_complex*>(const_cast<cx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace rwave::fft

#pragma once

#include <complex>
#include <cstdint>

namespace rwave {

// Thin wrapper over FFTW complex-to-complex transforms.  Plans are cached per
// (dim, points) shape, created with FFTW_ESTIMATE so the chosen algorithm
// (and hence the roundoff pattern) is reproducible, and with FFTW_UNALIGNED
// so they can be executed on any buffer.  Transforms are out-of-place and
// unnormalized; callers apply the 1/points^dim forward factor themselves.
namespace fft {

using cx = std::complex<double>;

void forward(int dim, int points, const cx* in, cx* out);   // e^{-i xi x} sum
void backward(int dim, int points, const cx* in, cx* out);  // e^{+i xi x} sum

}  // namespace fft
}  // namespace rwave

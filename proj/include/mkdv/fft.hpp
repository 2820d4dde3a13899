#pragma once

#include <complex>
#include <vector>

namespace mkdv {

// Real-to-complex transforms on periodic grids, backed by a per-size plan
// cache. Forward/inverse pairs are unnormalized (inverse(forward(u)) == n*u).
// Safe to call from multiple threads; plans are shared, buffers are not.
namespace fft {

// out has n/2+1 entries.
void forward(int n, const double* in, std::complex<double>* out);

// in has n/2+1 entries and is left untouched.
void inverse(int n, const std::complex<double>* in, double* out);

}  // namespace fft

}  // namespace mkdv

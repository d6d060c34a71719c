#pragma once

#include <complex>
#include <vector>

#include "jumpdiff/common.hpp"

namespace jumpdiff {

// In-place radix-2 Cooley-Tukey; n must be a power of two. Forward applies
// exp(-2*pi*i*jk/n) with no scaling; inverse applies the conjugate kernel and
// divides by n.
void fft_inplace(std::complex<double>* a, int n, bool inverse);

// d-dimensional transform of a row-major cube with m points per axis
// (data.size() == m^d), one 1-d pass per axis.
void fft_nd(std::vector<std::complex<double>>& data, int dim, int m, bool inverse);

}  // namespace jumpdiff

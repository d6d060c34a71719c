#include "jumpdiff/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace jumpdiff {

void fft_inplace(std::complex<double>* a, int n, bool inverse) {
  if (!is_power_of_two(n)) throw std::invalid_argument("fft: length must be a power of two");
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * kPi / len * (inverse ? 1.0 : -1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (int j = 0; j < len / 2; ++j) {
        std::complex<double> u = a[i + j];
        std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    double inv = 1.0 / n;
    for (int i = 0; i < n; ++i) a[i] *= inv;
  }
}

void fft_nd(std::vector<std::complex<double>>& data, int dim, int m, bool inverse) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("fft_nd: dim must be 1, 2, or 3");
  long total = 1;
  for (int i = 0; i < dim; ++i) total *= m;
  if (static_cast<long>(data.size()) != total)
    throw std::invalid_argument("fft_nd: size does not match m^dim");

  std::vector<std::complex<double>> line(m);
  long stride = 1;  // row-major: last axis contiguous, transformed first
  for (int axis = dim - 1; axis >= 0; --axis) {
    long lines = total / m;
    for (long l = 0; l < lines; ++l) {
      // Coordinates of this line with the transform axis pinned at zero.
      long idx[3] = {0, 0, 0};
      long q = l;
      for (int k = dim - 1; k >= 0; --k) {
        if (k == axis) continue;
        idx[k] = q % m;
        q /= m;
      }
      long off = 0, s = 1;
      for (int k = dim - 1; k >= 0; --k) {
        off += idx[k] * s;
        s *= m;
      }
      for (int j = 0; j < m; ++j) line[j] = data[off + j * stride];
      fft_inplace(line.data(), m, inverse);
      for (int j = 0; j < m; ++j) data[off + j * stride] = line[j];
    }
    stride *= m;
  }
}

}  // namespace jumpdiff

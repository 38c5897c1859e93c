#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "opra/core/bands.hpp"

namespace opra::dsp {

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place radix-2 Cooley-Tukey transform. Length must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw ValidationError("fft: length must be a nonzero power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double pi = 3.14159265358979323846;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double angle = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wl(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& v : a) v /= static_cast<double>(n);
}

/// Linear convolution via zero-padded FFTs.
inline std::vector<double> fft_convolve(const std::vector<double>& x,
                                        const std::vector<double>& y) {
  if (x.empty() || y.empty()) throw ValidationError("fft_convolve: empty input");
  std::size_t out_len = x.size() + y.size() - 1;
  std::size_t n = next_pow2(out_len);
  std::vector<std::complex<double>> a(n), b(n);
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = x[i];
  for (std::size_t i = 0; i < y.size(); ++i) b[i] = y[i];
  fft_inplace(a, false);
  fft_inplace(b, false);
  for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
  fft_inplace(a, true);
  std::vector<double> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = a[i].real();
  return out;
}

}  // namespace opra::dsp

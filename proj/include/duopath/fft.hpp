#pragma once

#include <span>
#include <vector>

#include "duopath/common.hpp"

namespace duopath {

/// Complex FFT plan for a fixed size n. Handles any n via mixed-radix
/// Cooley-Tukey (generic DFT for prime factors), so non-power-of-two frame
/// sizes such as 320 run in O(n log n) without zero padding.
///
/// forward() computes X[k] = sum_n x[n] e^{-2 pi i k n / N};
/// inverse() is the unscaled conjugate transform divided by N, so
/// inverse(forward(x)) == x.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    require_config(n >= 1, "Fft: size must be >= 1");
    twiddle_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const double ang = -2.0 * kPi * static_cast<double>(j) / static_cast<double>(n_);
      twiddle_[j] = cplx(std::cos(ang), std::sin(ang));
    }
  }

  std::size_t size() const { return n_; }

  void forward(std::span<const cplx> in, std::span<cplx> out) const {
    require(in.size() == n_ && out.size() == n_, "Fft::forward: size mismatch");
    // scratch bound: S(n) <= 2n for the recursion below
    std::vector<cplx> scratch(2 * n_);
    transform(in.data(), 1, out.data(), n_, 1, scratch.data());
  }

  void inverse(std::span<const cplx> in, std::span<cplx> out) const {
    require(in.size() == n_ && out.size() == n_, "Fft::inverse: size mismatch");
    std::vector<cplx> tmp(in.begin(), in.end());
    for (auto& v : tmp) v = std::conj(v);
    std::vector<cplx> scratch(2 * n_);
    transform(tmp.data(), 1, out.data(), n_, 1, scratch.data());
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (auto& v : out) v = std::conj(v) * inv_n;
  }

 private:
  static std::size_t smallest_factor(std::size_t n) {
    if (n % 2 == 0) return 2;
    for (std::size_t p = 3; p * p <= n; p += 2) {
      if (n % p == 0) return p;
    }
    return n;
  }

  // DFT of in[0], in[stride], ..., in[(n-1)*stride] into out[0..n).
  // tw_stride * n == n_, so w_n^j == twiddle_[(j * tw_stride) % n_].
  void transform(const cplx* in, std::size_t stride, cplx* out, std::size_t n,
                 std::size_t tw_stride, cplx* scratch) const {
    if (n == 1) {
      out[0] = in[0];
      return;
    }
    const std::size_t p = smallest_factor(n);
    if (p == n) {
      // prime size: direct DFT
      for (std::size_t k = 0; k < n; ++k) {
        cplx acc = in[0];
        for (std::size_t j = 1; j < n; ++j) {
          acc += in[j * stride] * twiddle_[(j * k * tw_stride) % n_];
        }
        out[k] = acc;
      }
      return;
    }
    const std::size_t m = n / p;
    // sub-DFTs of the p decimated sequences land in scratch[r*m .. r*m+m)
    for (std::size_t r = 0; r < p; ++r) {
      transform(in + r * stride, stride * p, scratch + r * m, m, tw_stride * p,
                scratch + n);
    }
    // out[k] = sum_r w_n^{r k} * sub_r[k mod m]
    for (std::size_t k = 0; k < n; ++k) {
      cplx acc = scratch[k % m];
      for (std::size_t r = 1; r < p; ++r) {
        acc += scratch[r * m + k % m] * twiddle_[(r * k * tw_stride) % n_];
      }
      out[k] = acc;
    }
  }

  std::size_t n_;
  std::vector<cplx> twiddle_;
};

}  // namespace duopath

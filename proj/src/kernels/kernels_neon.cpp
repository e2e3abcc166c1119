// NEON variants (aarch64 baseline, no runtime feature check needed).

#include "paraicl/kernels.hpp"

#if defined(PARAICL_HAVE_NEON_KERNELS)

#include <arm_neon.h>

#include <cassert>

namespace paraicl::kernels::neon {

double sum(std::span<const double> x) {
  const double* p = x.data();
  const std::size_t n = x.size();
  const std::size_t vend = n / 2 * 2;
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < vend; i += 2) {
    acc = vaddq_f64(acc, vld1q_f64(p + i));
  }
  double total = vaddvq_f64(acc);
  for (std::size_t i = vend; i < n; ++i) total += p[i];
  return total;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  const double* pa = a.data();
  const double* pb = b.data();
  const std::size_t n = a.size();
  const std::size_t vend = n / 2 * 2;
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < vend; i += 2) {
    acc = vfmaq_f64(acc, vld1q_f64(pa + i), vld1q_f64(pb + i));
  }
  double total = vaddvq_f64(acc);
  for (std::size_t i = vend; i < n; ++i) total += pa[i] * pb[i];
  return total;
}

void scale(std::span<double> x, double c) {
  double* p = x.data();
  const std::size_t n = x.size();
  const std::size_t vend = n / 2 * 2;
  const float64x2_t vc = vdupq_n_f64(c);
  for (std::size_t i = 0; i < vend; i += 2) {
    vst1q_f64(p + i, vmulq_f64(vld1q_f64(p + i), vc));
  }
  for (std::size_t i = vend; i < n; ++i) p[i] *= c;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const double* px = x.data();
  double* py = y.data();
  const std::size_t n = x.size();
  const std::size_t vend = n / 2 * 2;
  const float64x2_t va = vdupq_n_f64(a);
  for (std::size_t i = 0; i < vend; i += 2) {
    float64x2_t vy = vld1q_f64(py + i);
    vy = vfmaq_f64(vy, va, vld1q_f64(px + i));
    vst1q_f64(py + i, vy);
  }
  for (std::size_t i = vend; i < n; ++i) py[i] += a * px[i];
}

double max_value(std::span<const double> x) {
  assert(!x.empty());
  const double* p = x.data();
  const std::size_t n = x.size();
  double best = p[0];
  const std::size_t vend = n / 2 * 2;
  if (vend >= 2) {
    float64x2_t vbest = vld1q_f64(p);
    for (std::size_t i = 2; i < vend; i += 2) {
      vbest = vmaxq_f64(vbest, vld1q_f64(p + i));
    }
    best = vmaxvq_f64(vbest);
  }
  for (std::size_t i = vend; i < n; ++i) {
    if (p[i] > best) best = p[i];
  }
  return best;
}

std::size_t argmax(std::span<const double> x) {
  const double best = max_value(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == best) return i;
  }
  return 0;
}

}  // namespace paraicl::kernels::neon

#endif  // PARAICL_HAVE_NEON_KERNELS

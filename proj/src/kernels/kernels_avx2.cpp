// AVX2 variants. This file is compiled with -mavx2; callers must gate on
// __builtin_cpu_supports("avx2") before reaching these symbols.

#include "paraicl/kernels.hpp"

#if defined(PARAICL_HAVE_AVX2_KERNELS)

#include <immintrin.h>

#include <cassert>

namespace paraicl::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

double sum(std::span<const double> x) {
  const double* p = x.data();
  const std::size_t n = x.size();
  const std::size_t vend = n / 4 * 4;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < vend; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(p + i));
  }
  double total = hsum(acc);
  for (std::size_t i = vend; i < n; ++i) total += p[i];
  return total;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  const double* pa = a.data();
  const double* pb = b.data();
  const std::size_t n = a.size();
  const std::size_t vend = n / 4 * 4;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < vend; i += 4) {
    __m256d va = _mm256_loadu_pd(pa + i);
    __m256d vb = _mm256_loadu_pd(pb + i);
    acc = _mm256_fmadd_pd(va, vb, acc);
  }
  double total = hsum(acc);
  for (std::size_t i = vend; i < n; ++i) total += pa[i] * pb[i];
  return total;
}

void scale(std::span<double> x, double c) {
  double* p = x.data();
  const std::size_t n = x.size();
  const std::size_t vend = n / 4 * 4;
  const __m256d vc = _mm256_set1_pd(c);
  for (std::size_t i = 0; i < vend; i += 4) {
    _mm256_storeu_pd(p + i, _mm256_mul_pd(_mm256_loadu_pd(p + i), vc));
  }
  for (std::size_t i = vend; i < n; ++i) p[i] *= c;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const double* px = x.data();
  double* py = y.data();
  const std::size_t n = x.size();
  const std::size_t vend = n / 4 * 4;
  const __m256d va = _mm256_set1_pd(a);
  // mul+add, not fmadd: keeps results bit-identical to the scalar kernel.
  for (std::size_t i = 0; i < vend; i += 4) {
    __m256d vy = _mm256_loadu_pd(py + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(px + i)));
    _mm256_storeu_pd(py + i, vy);
  }
  for (std::size_t i = vend; i < n; ++i) py[i] += a * px[i];
}

double max_value(std::span<const double> x) {
  assert(!x.empty());
  const double* p = x.data();
  const std::size_t n = x.size();
  double best = p[0];
  const std::size_t vend = n / 4 * 4;
  if (vend >= 4) {
    __m256d vbest = _mm256_loadu_pd(p);
    for (std::size_t i = 4; i < vend; i += 4) {
      vbest = _mm256_max_pd(vbest, _mm256_loadu_pd(p + i));
    }
    double lanes[4];
    _mm256_storeu_pd(lanes, vbest);
    for (double v : lanes) {
      if (v > best) best = v;
    }
  }
  for (std::size_t i = vend; i < n; ++i) {
    if (p[i] > best) best = p[i];
  }
  return best;
}

// Two passes: vector max, then a scalar scan for the first index holding it.
// Keeps the lowest-index tie-break exact.
std::size_t argmax(std::span<const double> x) {
  const double best = max_value(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == best) return i;
  }
  return 0;  // unreachable for non-empty x without NaN
}

}  // namespace paraicl::kernels::avx2

#endif  // PARAICL_HAVE_AVX2_KERNELS

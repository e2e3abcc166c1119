#pragma once

/**
 * Data-parallel double-precision kernels used by the hot loops:
 * embedding dot products, distribution normalization and the per-step
 * weighted-average accumulation over vocabulary-sized arrays.
 *
 * Every kernel has a scalar reference implementation plus SIMD variants
 * (AVX2 on x86-64, NEON on aarch64). The active variant is picked once at
 * runtime from CPU features; set PARAICL_FORCE_SCALAR=1 to pin the scalar
 * path. SIMD sum/dot reassociate the additions, so they may differ from
 * scalar in the last bits; scale/axpy are element-wise and bit-identical.
 * argmax returns the first (lowest) index of the maximum in all variants.
 */

#include <cstddef>
#include <span>
#include <string>

namespace paraicl::kernels {

double sum(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
void scale(std::span<double> x, double c);
// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
double max_value(std::span<const double> x);
// First index holding the maximum; x must be non-empty.
std::size_t argmax(std::span<const double> x);

// Name of the variant in use: "scalar", "avx2" or "neon".
const std::string& active_isa();

namespace scalar {
double sum(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
void scale(std::span<double> x, double c);
void axpy(double a, std::span<const double> x, std::span<double> y);
double max_value(std::span<const double> x);
std::size_t argmax(std::span<const double> x);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define PARAICL_HAVE_AVX2_KERNELS 1
namespace avx2 {
double sum(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
void scale(std::span<double> x, double c);
void axpy(double a, std::span<const double> x, std::span<double> y);
double max_value(std::span<const double> x);
std::size_t argmax(std::span<const double> x);
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define PARAICL_HAVE_NEON_KERNELS 1
namespace neon {
double sum(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
void scale(std::span<double> x, double c);
void axpy(double a, std::span<const double> x, std::span<double> y);
double max_value(std::span<const double> x);
std::size_t argmax(std::span<const double> x);
}  // namespace neon
#endif

}  // namespace paraicl::kernels

#include "paraicl/kernels.hpp"

#include <cassert>
#include <cstdlib>

namespace paraicl::kernels {

namespace scalar {

double sum(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void scale(std::span<double> x, double c) {
  for (double& v : x) v *= c;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

double max_value(std::span<const double> x) {
  assert(!x.empty());
  double best = x[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > best) best = x[i];
  }
  return best;
}

std::size_t argmax(std::span<const double> x) {
  assert(!x.empty());
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > x[best]) best = i;
  }
  return best;
}

}  // namespace scalar

namespace {

struct Dispatch {
  double (*sum)(std::span<const double>);
  double (*dot)(std::span<const double>, std::span<const double>);
  void (*scale)(std::span<double>, double);
  void (*axpy)(double, std::span<const double>, std::span<double>);
  double (*max_value)(std::span<const double>);
  std::size_t (*argmax)(std::span<const double>);
  std::string isa;
};

Dispatch select_dispatch() {
  const char* force = std::getenv("PARAICL_FORCE_SCALAR");
  const bool forced_scalar = force && force[0] == '1';
#if defined(PARAICL_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  if (!forced_scalar && __builtin_cpu_supports("avx2")) {
    return {avx2::sum,  avx2::dot,    avx2::scale, avx2::axpy,
            avx2::max_value, avx2::argmax, "avx2"};
  }
#endif
#if defined(PARAICL_HAVE_NEON_KERNELS)
  if (!forced_scalar) {
    return {neon::sum,  neon::dot,    neon::scale, neon::axpy,
            neon::max_value, neon::argmax, "neon"};
  }
#endif
  (void)forced_scalar;
  return {scalar::sum,  scalar::dot,    scalar::scale, scalar::axpy,
          scalar::max_value, scalar::argmax, "scalar"};
}

const Dispatch& dispatch() {
  static const Dispatch d = select_dispatch();
  return d;
}

}  // namespace

double sum(std::span<const double> x) { return dispatch().sum(x); }
double dot(std::span<const double> a, std::span<const double> b) {
  return dispatch().dot(a, b);
}
void scale(std::span<double> x, double c) { dispatch().scale(x, c); }
void axpy(double a, std::span<const double> x, std::span<double> y) {
  dispatch().axpy(a, x, y);
}
double max_value(std::span<const double> x) { return dispatch().max_value(x); }
std::size_t argmax(std::span<const double> x) { return dispatch().argmax(x); }

const std::string& active_isa() { return dispatch().isa; }

}  // namespace paraicl::kernels

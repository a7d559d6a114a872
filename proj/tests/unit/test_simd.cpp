#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "ldes/simd/kernels.hpp"

using namespace ldes::simd;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<const Kernels*> variants() {
  std::vector<const Kernels*> out;
  if (auto* k = avx2_kernels()) out.push_back(k);
  if (auto* k = neon_kernels()) out.push_back(k);
  return out;
}

}  // namespace

TEST_CASE("elementwise kernels are bitwise equal to the scalar reference") {
  std::mt19937_64 rng(11);
  const Kernels& ref = scalar_kernels();
  for (const Kernels* k : variants()) {
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 31u, 257u}) {
      auto x = random_vec(rng, n);
      auto y1 = random_vec(rng, n);
      auto y2 = y1;
      ref.axpy(-1.7, x.data(), y1.data(), n);
      k->axpy(-1.7, x.data(), y2.data(), n);
      CHECK(std::memcmp(y1.data(), y2.data(), n * sizeof(double)) == 0);
      ref.scale(0.3, y1.data(), n);
      k->scale(0.3, y2.data(), n);
      CHECK(std::memcmp(y1.data(), y2.data(), n * sizeof(double)) == 0);
    }
  }
}

TEST_CASE("reductions agree with the scalar reference to rounding") {
  std::mt19937_64 rng(12);
  const Kernels& ref = scalar_kernels();
  for (const Kernels* k : variants()) {
    for (std::size_t n : {0u, 1u, 5u, 16u, 33u, 1000u}) {
      auto x = random_vec(rng, n);
      auto y = random_vec(rng, n);
      auto w = random_vec(rng, n);
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(w[i] * x[i] * y[i]) + x[i] * x[i];
      const double tol = 1e-14 * (1.0 + mag);
      CHECK(std::abs(ref.dot(x.data(), y.data(), n) - k->dot(x.data(), y.data(), n)) <= tol);
      CHECK(std::abs(ref.sum_squares(x.data(), n) - k->sum_squares(x.data(), n)) <= tol);
      CHECK(std::abs(ref.weighted_dot(w.data(), x.data(), y.data(), n) -
                     k->weighted_dot(w.data(), x.data(), y.data(), n)) <= tol);
    }
  }
}

TEST_CASE("selection honours availability") {
  const Isa before = active().isa;
  CHECK(select(Isa::Scalar));
  CHECK(active().isa == Isa::Scalar);
  if (avx2_kernels() == nullptr) CHECK_FALSE(select(Isa::Avx2));
  if (neon_kernels() == nullptr) CHECK_FALSE(select(Isa::Neon));
  CHECK(select(before));
  CHECK(isa_name(Isa::Avx2) == "avx2");
}

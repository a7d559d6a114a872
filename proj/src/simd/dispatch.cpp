#include <atomic>
#include <cstdlib>
#include <string>

#include "ldes/simd/kernels.hpp"

namespace ldes::simd {

#if !defined(LDES_HAVE_AVX2)
const Kernels* avx2_kernels() { return nullptr; }
#endif
#if !defined(LDES_HAVE_NEON)
const Kernels* neon_kernels() { return nullptr; }
#endif

namespace {

const Kernels* best_available() {
  if (const Kernels* k = avx2_kernels()) return k;
  if (const Kernels* k = neon_kernels()) return k;
  return &scalar_kernels();
}

const Kernels* by_isa(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return &scalar_kernels();
    case Isa::Avx2: return avx2_kernels();
    case Isa::Neon: return neon_kernels();
  }
  return nullptr;
}

const Kernels* initial_selection() {
  if (const char* env = std::getenv("LDES_SIMD")) {
    const std::string v(env);
    const Kernels* k = nullptr;
    if (v == "scalar") k = by_isa(Isa::Scalar);
    if (v == "avx2") k = by_isa(Isa::Avx2);
    if (v == "neon") k = by_isa(Isa::Neon);
    if (k != nullptr) return k;
  }
  return best_available();
}

std::atomic<const Kernels*>& slot() {
  static std::atomic<const Kernels*> s{initial_selection()};
  return s;
}

}  // namespace

const Kernels& active() { return *slot().load(std::memory_order_relaxed); }

bool select(Isa isa) {
  const Kernels* k = by_isa(isa);
  if (k == nullptr) return false;
  slot().store(k, std::memory_order_relaxed);
  return true;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

}  // namespace ldes::simd

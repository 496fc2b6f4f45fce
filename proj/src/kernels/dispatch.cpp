#include <atomic>
#include <cstdlib>
#include <string>

#include "bandgap_qed/errors.hpp"
#include "bandgap_qed/kernels.hpp"

namespace bgq::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(BGQ_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("BANDGAP_QED_SIMD")) {
    if (std::string(env) == "scalar") return Isa::Scalar;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

bool isa_available(Isa isa) noexcept {
  return isa == Isa::Scalar || cpu_has_avx2();
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw NumericalError(ErrorCode::InvalidArgument,
                         "instruction set " + std::string(to_string(isa)) + " is not available");
  }
  current().store(isa, std::memory_order_relaxed);
}

#if !defined(BGQ_HAVE_AVX2)
namespace avx2 {
cplx history_dot(std::span<const cplx> w, std::span<const cplx> h) noexcept {
  return scalar::history_dot(w, h);
}
cplx complex_dot(std::span<const cplx> x, std::span<const cplx> y) noexcept {
  return scalar::complex_dot(x, y);
}
}  // namespace avx2
#endif

cplx history_dot(std::span<const cplx> weights, std::span<const cplx> history) {
  if (weights.size() != history.size()) {
    throw NumericalError(ErrorCode::InvalidArgument, "history_dot: length mismatch");
  }
  return active_isa() == Isa::Avx2 ? avx2::history_dot(weights, history)
                                   : scalar::history_dot(weights, history);
}

cplx complex_dot(std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size()) {
    throw NumericalError(ErrorCode::InvalidArgument, "complex_dot: length mismatch");
  }
  return active_isa() == Isa::Avx2 ? avx2::complex_dot(x, y) : scalar::complex_dot(x, y);
}

}  // namespace bgq::kernels

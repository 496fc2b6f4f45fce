#pragma once

#include <span>
#include <string_view>

#include "bandgap_qed/numerics.hpp"

// Hot inner loops of the solvers. Each kernel has a scalar reference
// implementation and, on x86-64, an AVX2+FMA variant; the dispatcher picks one
// once per process (BANDGAP_QED_SIMD=scalar forces the reference path).
namespace bgq::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

/// True when the variant was compiled in and the CPU supports it.
bool isa_available(Isa isa) noexcept;

Isa active_isa() noexcept;

/// Override the dispatch choice. Throws NumericalError if unavailable.
void force_isa(Isa isa);

/// sum_{m=0}^{n-1} weights[m] * history[n-1-m]; both spans must have length n.
cplx history_dot(std::span<const cplx> weights, std::span<const cplx> history);

/// sum_j x[j] * y[j].
cplx complex_dot(std::span<const cplx> x, std::span<const cplx> y);

namespace scalar {
cplx history_dot(std::span<const cplx> weights, std::span<const cplx> history) noexcept;
cplx complex_dot(std::span<const cplx> x, std::span<const cplx> y) noexcept;
}  // namespace scalar

namespace avx2 {
// Only callable when isa_available(Isa::Avx2).
cplx history_dot(std::span<const cplx> weights, std::span<const cplx> history) noexcept;
cplx complex_dot(std::span<const cplx> x, std::span<const cplx> y) noexcept;
}  // namespace avx2

}  // namespace bgq::kernels

#include "bandgap_qed/kernels.hpp"

namespace bgq::kernels::scalar {

cplx history_dot(std::span<const cplx> weights, std::span<const cplx> history) noexcept {
  const std::size_t n = weights.size();
  double re = 0.0, im = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const cplx w = weights[m];
    const cplx h = history[n - 1 - m];
    re += w.real() * h.real() - w.imag() * h.imag();
    im += w.real() * h.imag() + w.imag() * h.real();
  }
  return {re, im};
}

cplx complex_dot(std::span<const cplx> x, std::span<const cplx> y) noexcept {
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    re += x[j].real() * y[j].real() - x[j].imag() * y[j].imag();
    im += x[j].real() * y[j].imag() + x[j].imag() * y[j].real();
  }
  return {re, im};
}

}  // namespace bgq::kernels::scalar

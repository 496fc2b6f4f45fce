// Complex error function. Two regimes: the Maclaurin series where it is free
// of cancellation (small |z|, or a thin strip around the imaginary axis where
// all terms share a phase), and the Laplace continued fraction for erfcx
// elsewhere. Everything is evaluated in the first quadrant and mapped out by
// the odd and conjugate symmetries, so those hold bit-exactly.

#include <cmath>
#include <limits>

#include "bandgap_qed/numerics.hpp"

namespace bgq::num {
namespace {

constexpr double kTwoOverSqrtPi = 1.1283791670955125739;
constexpr double kEps = std::numeric_limits<double>::epsilon();

bool use_series(cplx z) {
  const double r = std::abs(z);
  return r < 2.0 || (z.real() < 1.0 && r < 8.0);
}

cplx erf_series(cplx z) {
  const cplx minus_z2 = -z * z;
  cplx term = z;
  cplx sum = z;
  const double peak = std::norm(z);
  for (int n = 1; n < 2000; ++n) {
    term *= minus_z2 / static_cast<double>(n);
    const cplx contrib = term / static_cast<double>(2 * n + 1);
    sum += contrib;
    if (n > peak && std::abs(contrib) <= 0.25 * kEps * std::abs(sum)) break;
  }
  return kTwoOverSqrtPi * sum;
}

// erfcx(z) = 1 / (sqrt(pi) * (z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))), Re z >= 0.
cplx erfcx_continued_fraction(cplx z) {
  constexpr double tiny = 1e-300;
  cplx f = z;
  if (f == 0.0) f = tiny;
  cplx c = f;
  cplx d = 0.0;
  for (int k = 1; k < 20000; ++k) {
    const double a = 0.5 * k;
    d = z + a * d;
    if (d == 0.0) d = tiny;
    c = z + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const cplx delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 0.5 * kEps) break;
  }
  return 1.0 / (kSqrtPi * f);
}

// First quadrant only.
cplx erfcx_q1(cplx z) {
  if (use_series(z)) return std::exp(z * z) * (1.0 - erf_series(z));
  return erfcx_continued_fraction(z);
}

cplx erf_q1(cplx z) {
  if (use_series(z)) return erf_series(z);
  return 1.0 - std::exp(-z * z) * erfcx_continued_fraction(z);
}

}  // namespace

cplx erf_complex(cplx z) {
  if (z.imag() < 0.0) return std::conj(erf_complex(std::conj(z)));
  if (z.real() < 0.0) return -erf_q1(-z);
  return erf_q1(z);
}

cplx erfc_scaled(cplx z) {
  if (z.imag() < 0.0) return std::conj(erfc_scaled(std::conj(z)));
  if (z.real() < 0.0) return 2.0 * std::exp(z * z) - erfcx_q1(-z);
  return erfcx_q1(z);
}

ScaledErfc erfc_scaled_checked(cplx z) {
  const bool guaranteed = z.real() >= -50.0 || std::abs(z) <= 10.0;
  return {erfc_scaled(z), !guaranteed};
}

}  // namespace bgq::num

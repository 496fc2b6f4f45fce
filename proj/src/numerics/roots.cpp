#include <algorithm>
#include <cmath>
#include <limits>

#include "bandgap_qed/errors.hpp"
#include "bandgap_qed/numerics.hpp"

namespace bgq {

void ToleranceConfig::validate() const {
  if (!(root_tol > 0.0) || !(quad_tol > 0.0) || !(erf_tol > 0.0) || max_iter < 1) {
    throw NumericalError(ErrorCode::InvalidArgument,
                         "tolerances must be positive and max_iter >= 1");
  }
}

namespace num {

cplx principal_sqrt(cplx z) {
  // std::sqrt already follows the principal branch; -0.0 imaginary parts are
  // normalized so that the negative real axis maps to +i sqrt(|z|).
  if (z.imag() == 0.0) z = cplx(z.real(), 0.0);
  return std::sqrt(z);
}

cplx principal_cbrt(cplx z) {
  if (z == 0.0) return 0.0;
  double arg = std::arg(z);
  if (arg == -kPi) arg = kPi;
  return std::polar(std::cbrt(std::abs(z)), arg / 3.0);
}

std::array<cplx, 3> cubic_roots_complex(cplx c2, cplx c1, cplx c0) {
  // Depress: x = t - c2/3  ->  t^3 + p t + q = 0.
  const cplx shift = c2 / 3.0;
  const cplx p = c1 - c2 * shift;
  const cplx q = c0 - c1 * shift + 2.0 * shift * shift * shift;

  std::array<cplx, 3> roots;
  const cplx disc = principal_sqrt(q * q / 4.0 + p * p * p / 27.0);
  // Pick the larger of -q/2 +- disc to avoid cancellation in u^3.
  cplx u3 = -q / 2.0 + disc;
  const cplx alt = -q / 2.0 - disc;
  if (std::abs(alt) > std::abs(u3)) u3 = alt;
  if (std::abs(u3) == 0.0) {
    roots = {-shift, -shift, -shift};
  } else {
    const cplx u = principal_cbrt(u3);
    const cplx omega(-0.5, std::sqrt(3.0) / 2.0);
    cplx uk = u;
    for (int k = 0; k < 3; ++k) {
      roots[k] = uk - p / (3.0 * uk) - shift;
      uk *= omega;
    }
  }

  // Two Newton steps on the undepressed polynomial tidy up rounding.
  for (cplx& x : roots) {
    for (int it = 0; it < 2; ++it) {
      const cplx f = ((x + c2) * x + c1) * x + c0;
      const cplx df = (3.0 * x + 2.0 * c2) * x + c1;
      if (std::abs(df) == 0.0) break;
      const cplx step = f / df;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      const cplx next = x - step;
      const cplx fn = ((next + c2) * next + c1) * next + c0;
      if (std::abs(fn) < std::abs(f)) x = next;
    }
  }

  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  return roots;
}

double brent_root(const std::function<double(double)>& f, double lo, double hi,
                  const ToleranceConfig& tol) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw NumericalError(ErrorCode::NoSignChange, "brent_root: f(lo) and f(hi) share a sign");
  }
  if (std::abs(fa) < std::abs(fb)) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  double c = a, fc = fa, d = b - a;
  bool bisected = true;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (int iter = 0; iter < tol.max_iter; ++iter) {
    const double width_tol = std::max(4.0 * eps * std::abs(b), tol.root_tol * std::max(1.0, std::abs(b)));
    if (fb == 0.0 || std::abs(b - a) <= width_tol) return b;

    double s;
    if (fa != fc && fb != fc) {
      s = a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) +
          c * fa * fb / ((fc - fa) * (fc - fb));
    } else {
      s = b - fb * (b - a) / (fb - fa);
    }
    const double m = 0.25 * (3.0 * a + b);
    const bool outside = !((s > std::min(m, b) && s < std::max(m, b)));
    if (outside || (bisected && std::abs(s - b) >= 0.5 * std::abs(b - c)) ||
        (!bisected && std::abs(s - b) >= 0.5 * std::abs(c - d)) ||
        (bisected && std::abs(b - c) < width_tol) || (!bisected && std::abs(c - d) < width_tol)) {
      s = 0.5 * (a + b);
      bisected = true;
    } else {
      bisected = false;
    }
    const double fs = f(s);
    d = c;
    c = b;
    fc = fb;
    if ((fa > 0.0) != (fs > 0.0)) {
      b = s;
      fb = fs;
    } else {
      a = s;
      fa = fs;
    }
    if (std::abs(fa) < std::abs(fb)) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
  }
  throw NumericalError(ErrorCode::MaxIterations, "brent_root did not converge");
}

}  // namespace num
}  // namespace bgq

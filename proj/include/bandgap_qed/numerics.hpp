#pragma once

#include <array>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace bgq {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrtPi = 1.7724538509055160273;

/// Tolerances shared by the root finders, quadratures and special functions.
struct ToleranceConfig {
  double root_tol = 1e-12;
  double quad_tol = 1e-8;
  double erf_tol = 1e-10;
  int max_iter = 200;

  /// Throws NumericalError(InvalidArgument) unless all tolerances are positive.
  void validate() const;
};

namespace num {

// Branch policy: every complex square and cube root in the library goes through
// these two helpers. Both use the principal branch, argument in (-pi, pi].
cplx principal_sqrt(cplx z);
cplx principal_cbrt(cplx z);

/// Error function of a complex argument.
cplx erf_complex(cplx z);

/// exp(z^2) * erfc(z), evaluated without forming exp(z^2) where that would
/// overflow.
cplx erfc_scaled(cplx z);

struct ScaledErfc {
  cplx value;
  bool accuracy_loss;  // set outside Re(z) >= -50 or |z| <= 10
};
ScaledErfc erfc_scaled_checked(cplx z);

/// Roots of x^3 + c2 x^2 + c1 x + c0, sorted lexicographically by (Re, Im).
std::array<cplx, 3> cubic_roots_complex(cplx c2, cplx c1, cplx c0);

/// Brent's method on [lo, hi]. Requires f(lo) * f(hi) <= 0.
double brent_root(const std::function<double(double)>& f, double lo, double hi,
                  const ToleranceConfig& tol = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

/// Integral of a smooth function on [a, b] by composite Gauss-Legendre.
template <class F>
auto integrate_gl(F&& f, double a, double b, int panels = 1, int order = 16) {
  const GaussRule& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  decltype(f(a)) sum{};
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      sum += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    }
  }
  return sum * (0.5 * h);
}

/// Integral of f(t) exp(i w t) over a piecewise-linear interpolant of samples
/// on a (possibly nonuniform) grid. Exact for linear f at any frequency.
cplx filon_linear(std::span<const double> t, std::span<const cplx> f, double w);

}  // namespace num
}  // namespace bgq

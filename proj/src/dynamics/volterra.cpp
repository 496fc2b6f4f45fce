#include <cmath>
#include <string>

#include "bandgap_qed/dynamics.hpp"
#include "bandgap_qed/errors.hpp"
#include "bandgap_qed/kernels.hpp"

namespace bgq::dynamics {
namespace {

// Integrated kernel Q(tau) = int_0^tau e^{i d x} x^{-1/2} dx = (sqrt(pi) / p) erf(p sqrt(tau)),
// p = sqrt(-i d). The Taylor series covers small |d tau|, where erf would cancel.
cplx integrated_kernel(double d, double tau) {
  const double root = std::sqrt(tau);
  const cplx w(0.0, d * tau);
  if (std::abs(w) <= 1.0) {
    cplx term = 1.0, sum = 1.0;
    for (int k = 1; k < 30; ++k) {
      term *= w / static_cast<double>(k);
      sum += term / static_cast<double>(2 * k + 1);
    }
    return 2.0 * root * sum;
  }
  const cplx p = num::principal_sqrt(cplx(0.0, -d));
  const cplx z = p * root;
  return kSqrtPi / p * (1.0 - num::erfc_scaled(z) * std::exp(-z * z));
}

// Moments of Q(h u) on the cell [m, m + 1] against the two linear hat pieces:
// rising (u - m) and falling (m + 1 - u). The first cell carries the sqrt(u)
// branch point and is integrated in r = sqrt(u), where the integrand is smooth.
struct CellMoments {
  cplx rising, falling;
};

CellMoments cell_moments(const num::GaussRule& rule, double d, double h, double m) {
  CellMoments out{0.0, 0.0};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = 0.5 * (rule.nodes[i] + 1.0);
    double u = m + x, jac = 1.0;
    if (m == 0.0) {
      u = x * x;
      jac = 2.0 * x;
    }
    const cplx q = 0.5 * rule.weights[i] * jac * integrated_kernel(d, h * u);
    out.rising += (u - m) * q;
    out.falling += (m + 1.0 - u) * q;
  }
  return out;
}

// Dimensionless solve of a' = -c int_0^t e^{i d s} s^{-1/2} a(t - s) ds on t_n = n h.
// One exact integration in time gives the second-kind equation
//   a(t) = 1 - c int_0^t Q(t - s) a(s) ds,
// discretized by product integration of the piecewise-linear interpolant of a.
std::vector<cplx> march(double delta_hat, double scale, std::size_t steps, double h) {
  const cplx c = scale * std::polar(1.0 / kSqrtPi, -kPi / 4.0);
  const num::GaussRule& rule = num::gauss_legendre(12);

  // In u = (t_n - s) / h the node a_j sits at u = n - j.
  std::vector<CellMoments> cells(steps);
  for (std::size_t m = 0; m < steps; ++m) cells[m] = cell_moments(rule, delta_hat, h, static_cast<double>(m));
  // omega[m - 1] weights a_{n-m} for 1 <= m < n.
  std::vector<cplx> omega(steps > 1 ? steps - 1 : 0);
  for (std::size_t m = 1; m < steps; ++m) omega[m - 1] = cells[m - 1].rising + cells[m].falling;

  std::vector<cplx> a(steps + 1);
  a[0] = 1.0;
  const cplx ch = c * h;
  const cplx lhs = 1.0 + ch * cells[0].falling;
  for (std::size_t n = 1; n <= steps; ++n) {
    cplx history = cells[n - 1].rising * a[0];
    if (n > 1) {
      history += kernels::history_dot(std::span<const cplx>(omega).first(n - 1),
                                      std::span<const cplx>(a).subspan(1, n - 1));
    }
    a[n] = (1.0 - ch * history) / lhs;
  }
  return a;
}

}  // namespace

DecayTrace volterra_solve(const EmitterSpec& em, double t_max, double dt, const VolterraOptions& opts) {
  if (!(dt > 0.0) || !(t_max > 0.0)) {
    throw NumericalError(ErrorCode::InvalidArgument, "volterra_solve needs t_max > 0 and dt > 0");
  }
  const double ratio = t_max / dt;
  if (ratio > 1e7) throw NumericalError(ErrorCode::InvalidArgument, "t_max / dt exceeds 1e7");
  const std::size_t steps = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
  const double h = em.beta() * dt;

  std::vector<cplx> a = march(em.detuning_hat(), opts.coupling_scale, steps, h);
  std::optional<double> estimate;
  if (opts.estimate_error) {
    const std::vector<cplx> fine = march(em.detuning_hat(), opts.coupling_scale, 2 * steps, 0.5 * h);
    double worst = 0.0;
    for (std::size_t n = 0; n <= steps; ++n) worst = std::max(worst, std::abs(a[n] - fine[2 * n]));
    // Second order: the coarse error is 4/3 of the coarse-fine difference.
    estimate = worst * 4.0 / 3.0;
    if (*estimate > opts.tolerance) {
      throw NumericalError(ErrorCode::StepTooCoarse, "step-halving error " + std::to_string(*estimate) +
                                                         " exceeds tolerance " + std::to_string(opts.tolerance));
    }
  }

  std::vector<double> times(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) times[n] = static_cast<double>(n) * dt;
  DecayTrace trace(Method::Volterra, em.beta(), std::move(times), std::move(a));
  trace.error_estimate = estimate;
  return trace;
}

}  // namespace bgq::dynamics

#include <cmath>
#include <string>

#include "bandgap_qed/dynamics.hpp"
#include "bandgap_qed/errors.hpp"

namespace bgq::dynamics {
namespace {

constexpr cplx kI(0.0, 1.0);

// The two dressed-state exponentials, without the common e^{i d t} factor.
// The x2 term drops out when y2 = -x2.
cplx dressed_terms(const RootSet& r, double bt) {
  cplx sum = 2.0 * r.b[0] * r.x[0] * std::exp(r.x[0] * r.x[0] * bt);
  const cplx c2 = r.x[1] + r.y[1];
  if (std::abs(c2) > 1e-12 * std::abs(r.x[1])) sum += r.b[1] * c2 * std::exp(r.x[1] * r.x[1] * bt);
  return sum;
}

void require_finite(cplx v, double bt) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw NumericalError(ErrorCode::EvaluationOverflow, "amplitude overflowed at beta t = " + std::to_string(bt));
  }
}

}  // namespace

cplx a2_analytic_at(const RootSet& r, double bt) {
  if (!(bt >= 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "time must be nonnegative");
  const double root_t = std::sqrt(bt);
  cplx branch = 0.0;
  // [1 - erf(y sqrt t)] e^{x^2 t} = erfcx(y sqrt t) since y^2 = x^2; Re y >= 0
  // keeps the scaled function bounded.
  for (int j = 0; j < 3; ++j) branch += r.b[j] * r.y[j] * num::erfc_scaled(r.y[j] * root_t);
  const cplx a = (dressed_terms(r, bt) - branch) * std::polar(1.0, r.delta_hat * bt);
  require_finite(a, bt);
  return a;
}

DecayTrace a2_analytic(const EmitterSpec& em, std::span<const double> times) {
  const RootSet r = dressed_roots(em.detuning_hat());
  std::vector<cplx> amp(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) amp[i] = a2_analytic_at(r, em.beta() * times[i]);
  return DecayTrace(Method::Analytic, em.beta(), {times.begin(), times.end()}, std::move(amp));
}

cplx branch_tail_coefficient(const RootSet& r) {
  cplx sum = 0.0;
  for (int j = 0; j < 3; ++j) sum += r.b[j] / (r.x[j] * r.x[j]);
  return sum / (2.0 * kSqrtPi);
}

DecayTrace a2_asymptotic(const EmitterSpec& em, std::span<const double> times, double min_beta_t) {
  const RootSet r = dressed_roots(em.detuning_hat());
  const cplx tail = branch_tail_coefficient(r);
  std::vector<cplx> amp(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double bt = em.beta() * times[i];
    if (!(bt >= min_beta_t)) {
      throw NumericalError(ErrorCode::TooEarly, "asymptotic form needs beta t >= " + std::to_string(min_beta_t) +
                                                    " (got " + std::to_string(bt) + ")");
    }
    amp[i] = (dressed_terms(r, bt) + tail / (bt * std::sqrt(bt))) * std::polar(1.0, r.delta_hat * bt);
    require_finite(amp[i], bt);
  }
  return DecayTrace(Method::Asymptotic, em.beta(), {times.begin(), times.end()}, std::move(amp));
}

cplx a2_laplace(const EmitterSpec& em, cplx s) {
  const cplx sigma = s - kI * em.detuning();
  if (sigma.imag() == 0.0 && sigma.real() <= 0.0) {
    throw NumericalError(ErrorCode::OnSingularity, "s lies on the branch cut");
  }
  const cplx root = num::principal_sqrt(sigma);
  const cplx coupling = em.beta_three_halves() * std::polar(1.0, 3.0 * kPi / 4.0);
  const cplx den = s * root - coupling;
  if (std::abs(den) <= 1e-14 * (std::abs(s * root) + std::abs(coupling))) {
    throw NumericalError(ErrorCode::OnSingularity, "s is a pole of the amplitude");
  }
  return root / den;
}

}  // namespace bgq::dynamics

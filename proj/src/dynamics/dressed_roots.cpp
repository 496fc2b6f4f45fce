#include <cmath>
#include <string>

#include "bandgap_qed/dynamics.hpp"
#include "bandgap_qed/errors.hpp"

namespace bgq::dynamics {
namespace {

constexpr cplx kI(0.0, 1.0);

cplx unit(double angle) { return std::polar(1.0, angle); }

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::Analytic: return "analytic";
    case Method::Asymptotic: return "asymptotic";
    case Method::Volterra: return "volterra";
    case Method::Talbot: return "talbot";
    case Method::WeisskopfWigner: return "weisskopf_wigner";
  }
  return "unknown";
}

DecayTrace::DecayTrace(Method method, double beta, std::vector<double> times, std::vector<cplx> amplitude)
    : method_(method), beta_(beta), times_(std::move(times)), amplitude_(std::move(amplitude)) {
  if (times_.size() != amplitude_.size()) {
    throw NumericalError(ErrorCode::InvalidArgument, "trace times and amplitudes differ in length");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      throw NumericalError(ErrorCode::InvalidArgument, "trace times must be strictly increasing");
    }
  }
}

std::vector<double> DecayTrace::population() const {
  std::vector<double> p(amplitude_.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amplitude_[i]);
  return p;
}

DecayTrace ww_decay(double gamma, std::span<const double> times, double beta) {
  if (!(gamma >= 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "gamma must be nonnegative");
  std::vector<cplx> amp(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) amp[i] = std::exp(-0.5 * gamma * times[i]);
  return DecayTrace(Method::WeisskopfWigner, beta, {times.begin(), times.end()}, std::move(amp));
}

RootSet dressed_roots(double delta_hat) {
  if (!std::isfinite(delta_hat)) throw NumericalError(ErrorCode::InvalidArgument, "detuning must be finite");
  RootSet r{};
  r.delta_hat = delta_hat;

  // Cardano on w^3 + d w - 1 = 0 with x = w e^{i pi/4}: A+^3 and A-^3 are the
  // roots of z^2 - z - d^3/27, and A+ A- = -d/3 fixes the branch of A-.
  const cplx disc = num::principal_sqrt(cplx(1.0 + 4.0 * delta_hat * delta_hat * delta_hat / 27.0));
  r.Aplus = num::principal_cbrt(0.5 + 0.5 * disc);
  r.Aminus = -delta_hat / (3.0 * r.Aplus);

  r.x[0] = (r.Aplus + r.Aminus) * unit(kPi / 4.0);
  r.x[1] = (r.Aplus * unit(-kPi / 6.0) - r.Aminus * unit(kPi / 6.0)) * unit(-kPi / 4.0);
  r.x[2] = (r.Aplus * unit(kPi / 6.0) - r.Aminus * unit(-kPi / 6.0)) * unit(3.0 * kPi / 4.0);

  const std::array<cplx, 3> direct = num::cubic_roots_complex(0.0, kI * delta_hat, -unit(3.0 * kPi / 4.0));
  std::array<bool, 3> used{};
  for (const cplx& x : r.x) {
    int best = -1;
    for (int j = 0; j < 3; ++j) {
      if (!used[j] && (best < 0 || std::abs(direct[j] - x) < std::abs(direct[best] - x))) best = j;
    }
    used[best] = true;
    const double gap = std::abs(direct[best] - x);
    if (!(gap <= 1e-9 * std::max(1.0, std::abs(x)))) {
      throw NumericalError(ErrorCode::RootMismatch, "A+/- roots differ from the cubic roots by " +
                                                        std::to_string(gap) + " at detuning " +
                                                        std::to_string(delta_hat));
    }
  }

  for (int j = 0; j < 3; ++j) {
    const cplx other1 = r.x[(j + 1) % 3], other2 = r.x[(j + 2) % 3];
    r.b[j] = r.x[j] / ((r.x[j] - other1) * (r.x[j] - other2));
    r.y[j] = num::principal_sqrt(r.x[j] * r.x[j]);
  }
  return r;
}

double trapped_fraction(const EmitterSpec& em) {
  const RootSet r = dressed_roots(em.detuning_hat());
  if (std::real(r.x[0] * r.x[0]) < -1e-10) return 0.0;
  return std::norm(2.0 * r.b[0] * r.x[0]);
}

}  // namespace bgq::dynamics

#include <cmath>
#include <string>
#include <vector>

#include "bandgap_qed/dynamics.hpp"
#include "bandgap_qed/errors.hpp"

namespace bgq::dynamics {
namespace {

constexpr cplx kI(0.0, 1.0);

struct Pole {
  cplx sigma;
  cplx residue;
};

// Transform of a2(t) e^{-i d t} in the shifted variable sigma = s - i d, with
// the physical-sheet poles removed so that only the cut on (-inf, 0] remains.
class ShiftedTransform {
 public:
  explicit ShiftedTransform(double delta_hat) : d_(delta_hat) {
    const RootSet r = dressed_roots(delta_hat);
    for (const cplx& x : r.x) {
      if (std::abs(x.real()) <= 1e-7 * std::abs(x)) {
        throw NumericalError(ErrorCode::ContourFailure,
                             "a pole sits on the branch cut at detuning " + std::to_string(delta_hat));
      }
      // A root is a pole of the principal branch only when sqrt(x^2) = x.
      if (x.real() > 0.0) {
        const cplx sigma = x * x;
        const cplx derivative = x + (sigma + kI * d_) / (2.0 * x);
        poles_.push_back({sigma, x / derivative});
      }
    }
  }

  cplx regular(cplx sigma) const {
    const cplx root = num::principal_sqrt(sigma);
    cplx value = root / ((sigma + kI * d_) * root + std::polar(1.0, -kPi / 4.0));
    for (const Pole& p : poles_) value -= p.residue / (sigma - p.sigma);
    return value;
  }

  cplx pole_part(double t) const {
    cplx sum = 0.0;
    for (const Pole& p : poles_) sum += p.residue * std::exp(p.sigma * t);
    return sum;
  }

 private:
  double d_;
  std::vector<Pole> poles_;
};

// Fixed Talbot contour s = r theta (cot theta + i), trapezoid in theta.
cplx talbot(const ShiftedTransform& f, double t, int nodes) {
  const double r = 2.0 * nodes / (5.0 * t);
  cplx sum = 0.0;
  for (int k = -(nodes - 1); k <= nodes - 1; ++k) {
    cplx s, weight;
    if (k == 0) {
      s = r;
      weight = 1.0;
    } else {
      const double theta = kPi * k / nodes;
      const double cot = std::cos(theta) / std::sin(theta);
      s = r * theta * cplx(cot, 1.0);
      const double sigma = theta / (std::sin(theta) * std::sin(theta)) - cot;
      weight = cplx(1.0, sigma);
    }
    sum += std::exp(s * t) * f.regular(s) * weight;
  }
  return sum * (r / (2.0 * nodes));
}

}  // namespace

DecayTrace a2_talbot(const EmitterSpec& em, std::span<const double> times, const TalbotOptions& opts) {
  if (opts.nodes < 8) throw NumericalError(ErrorCode::InvalidArgument, "Talbot needs at least 8 nodes");
  const ShiftedTransform f(em.detuning_hat());
  std::vector<cplx> amp(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double bt = em.beta() * times[i];
    if (bt < 0.0) throw NumericalError(ErrorCode::InvalidArgument, "Talbot inversion needs t >= 0");
    if (bt == 0.0) {
      amp[i] = 1.0;
      continue;
    }
    const cplx base = talbot(f, bt, opts.nodes);
    const cplx check = talbot(f, bt, opts.nodes + 8);
    if (!(std::abs(base - check) <= opts.tolerance)) {
      throw NumericalError(ErrorCode::ContourFailure, "Talbot sums disagree by " +
                                                          std::to_string(std::abs(base - check)) +
                                                          " at beta t = " + std::to_string(bt));
    }
    amp[i] = (f.pole_part(bt) + base) * std::polar(1.0, em.detuning_hat() * bt);
  }
  return DecayTrace(Method::Talbot, em.beta(), {times.begin(), times.end()}, std::move(amp));
}

}  // namespace bgq::dynamics

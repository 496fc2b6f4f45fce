#include <cmath>
#include <string>

#include "bandgap_qed/dynamics.hpp"
#include "bandgap_qed/errors.hpp"
#include "bandgap_qed/kernels.hpp"

namespace bgq::dynamics {
namespace {

constexpr cplx kI(0.0, 1.0);

// int_T^inf t^{-3/2} e^{i w t} dt.
cplx power_tail(double w, double T) {
  const cplx head = 2.0 / std::sqrt(T) * std::polar(1.0, w * T);
  if (w == 0.0) return head;
  const cplx p = num::principal_sqrt(cplx(0.0, -w));
  // 2 i w int_T^inf t^{-1/2} e^{i w t} dt, with erfc(z) e^{-z^2} folded into erfcx.
  return head + 2.0 * kI * w * (kSqrtPi / p) * std::polar(1.0, w * T) * num::erfc_scaled(p * std::sqrt(T));
}

// Fourier transform F(w) = int_0^inf a2(t) e^{i w t} dt of a decay trace with
// the bound-state term continued analytically and the tail taken from the
// large-time form. Times are in units of 1/beta.
class TraceTransform {
 public:
  TraceTransform(const DecayTrace& trace, const EmitterSpec& em, const SpectrumOptions& opts)
      : roots_(dressed_roots(em.detuning_hat())) {
    if (trace.method() != Method::Analytic && trace.method() != Method::Volterra) {
      throw NumericalError(ErrorCode::InvalidArgument, "spectrum needs an analytic or Volterra trace");
    }
    if (trace.size() < 2 || !(trace.beta_t(trace.size() - 1) >= opts.min_beta_t)) {
      throw NumericalError(ErrorCode::TraceTooShort,
                           "spectrum needs a trace reaching beta t >= " + std::to_string(opts.min_beta_t));
    }
    const double d = roots_.delta_hat;
    const cplx x1 = roots_.x[0], x2 = roots_.x[1];
    bound_ = 2.0 * roots_.b[0] * x1;
    bound_rate_ = x1 * x1 + kI * d;
    const cplx c2 = x2 + roots_.y[1];
    if (std::abs(c2) > 1e-12 * std::abs(x2)) {
      second_ = roots_.b[1] * c2;
      second_rate_ = x2 * x2 + kI * d;
    }
    tail_ = branch_tail_coefficient(roots_);

    t_.resize(trace.size());
    f_.resize(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
      t_[i] = trace.beta_t(i);
      f_[i] = trace.amplitude()[i] - bound_ * std::exp(bound_rate_ * t_[i]);
    }
    end_ = t_.back();

    const double h = t_[1] - t_[0];
    uniform_ = t_.front() == 0.0;
    for (std::size_t i = 1; i < t_.size() && uniform_; ++i) {
      uniform_ = std::abs((t_[i] - t_[i - 1]) - h) <= 1e-9 * h;
    }
    if (uniform_) {
      step_ = h;
      head_.assign(f_.begin(), f_.end() - 1);
      diff_.resize(head_.size());
      for (std::size_t j = 0; j < diff_.size(); ++j) diff_[j] = f_[j + 1] - f_[j];
    }
  }

  double bound_weight() const { return std::abs(bound_); }

  cplx operator()(double w) const {
    cplx sum = uniform_ ? uniform_filon(w) : num::filon_linear(t_, f_, w);
    // Remainder of the decaying part past the trace end.
    sum += tail_ * power_tail(roots_.delta_hat + w, end_);
    if (second_ != 0.0) {
      const cplx rate = second_rate_ + kI * w;
      sum -= second_ * std::exp(rate * end_) / rate;
    }
    // Abel-regularized transform of the bound-state term over [0, inf).
    return sum - bound_ / (bound_rate_ + kI * w);
  }

 private:
  // Linear Filon on the uniform grid as two dot products against e^{i w t_j}.
  cplx uniform_filon(double w) const {
    const double theta = w * step_;
    cplx e0, e1;
    if (std::abs(theta) < 1e-3) {
      e0 = cplx(1.0, 0.5 * theta);
      e1 = cplx(0.5 - theta * theta / 8.0, theta / 3.0);
    } else {
      const cplx e = std::exp(kI * theta);
      e0 = (e - 1.0) / (kI * theta);
      e1 = (e - e0) / (kI * theta);
    }
    std::vector<cplx>& phase = phase_buffer();
    phase.resize(head_.size());
    const cplx rotate = std::polar(1.0, theta);
    for (std::size_t j = 0; j < phase.size(); ++j) {
      // Re-anchor periodically so rounding in the recurrence cannot build up.
      phase[j] = (j % 512 == 0) ? std::polar(1.0, w * t_[j]) : phase[j - 1] * rotate;
    }
    return step_ * (e0 * kernels::complex_dot(phase, head_) + e1 * kernels::complex_dot(phase, diff_));
  }

  static std::vector<cplx>& phase_buffer() {
    thread_local std::vector<cplx> buffer;
    return buffer;
  }

  RootSet roots_;
  cplx bound_, bound_rate_, second_ = 0.0, second_rate_ = 0.0, tail_;
  std::vector<double> t_;
  std::vector<cplx> f_;
  double end_ = 0.0;
  bool uniform_ = false;
  double step_ = 0.0;
  std::vector<cplx> head_, diff_;
};

}  // namespace

SpectrumTrace emission_spectrum(const DecayTrace& trace, const EmitterSpec& em,
                                std::span<const double> detunings, const SpectrumOptions& opts) {
  const TraceTransform transform(trace, em, opts);
  SpectrumTrace out{{detunings.begin(), detunings.end()}, std::vector<double>(detunings.size(), 0.0),
                    transform.bound_weight()};
  const double d = em.detuning_hat();
  for (std::size_t i = 0; i < detunings.size(); ++i) {
    // Photon frequency above the band edge: omega_k - omega_g = delta_k + d.
    const double above_edge = detunings[i] + d;
    if (above_edge <= 0.0) continue;
    out.density[i] = std::norm(transform(detunings[i])) / (kPi * std::sqrt(above_edge));
  }
  return out;
}

double spectral_weight(const DecayTrace& trace, const EmitterSpec& em, const SpectrumOptions& opts) {
  const TraceTransform transform(trace, em, opts);
  const double d = em.detuning_hat();
  // With delta_k + d = u^2 the edge singularity cancels:
  // weight = (2 / pi) int_0^inf |F(u^2 - d)|^2 du.
  constexpr double kUpper = 20.0;
  const double body = num::integrate_gl([&](double u) { return std::norm(transform(u * u - d)); }, 0.0, kUpper, 200, 8);
  // Beyond the cutoff |F|^2 ~ 1/u^4.
  const double tail = 1.0 / (3.0 * kUpper * kUpper * kUpper);
  return 2.0 / kPi * (body + tail);
}

}  // namespace bgq::dynamics

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bandgap_qed/bandedge.hpp"
#include "bandgap_qed/numerics.hpp"

// Excited-state amplitude a2(t) of a two-level emitter. Internally time is
// measured in units of 1/beta and detunings in units of beta.
namespace bgq::dynamics {

using bandedge::EmitterSpec;

enum class Method { Analytic, Asymptotic, Volterra, Talbot, WeisskopfWigner };

std::string_view to_string(Method m) noexcept;

class DecayTrace {
 public:
  DecayTrace(Method method, double beta, std::vector<double> times, std::vector<cplx> amplitude);

  Method method() const noexcept { return method_; }
  double beta() const noexcept { return beta_; }
  /// Physical times; beta_t(i) gives the dimensionless value.
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<cplx>& amplitude() const noexcept { return amplitude_; }
  std::size_t size() const noexcept { return times_.size(); }

  double beta_t(std::size_t i) const noexcept { return beta_ * times_[i]; }
  double population(std::size_t i) const noexcept { return std::norm(amplitude_[i]); }
  std::vector<double> population() const;

  /// Step-halving estimate of the max amplitude error (Volterra only).
  std::optional<double> error_estimate;

 private:
  Method method_;
  double beta_;
  std::vector<double> times_;
  std::vector<cplx> amplitude_;
};

/// a2(t) = exp(-gamma t / 2). `beta` only labels the trace's time unit.
DecayTrace ww_decay(double gamma, std::span<const double> times, double beta = 1.0);

/// Roots of the pole cubic x^3 + i d x - e^{i 3pi/4} = 0 (d = detuning_hat),
/// labeled by the A+/A- construction, with their residue weights.
struct RootSet {
  double delta_hat;
  std::array<cplx, 3> x;
  std::array<cplx, 3> b;  // b_j = x_j / prod_{i != j} (x_j - x_i)
  std::array<cplx, 3> y;  // principal sqrt(x_j^2)
  cplx Aplus, Aminus;
};

/// Builds the roots from A+/- and checks them against a direct cubic solve.
/// Throws RootMismatch if the two disagree by more than 1e-9.
RootSet dressed_roots(double delta_hat);

/// Closed-form amplitude, evaluated with exp(z^2) erfc(z) to avoid overflow.
DecayTrace a2_analytic(const EmitterSpec& em, std::span<const double> times);
cplx a2_analytic_at(const RootSet& roots, double beta_t);

/// Large-time form: dressed exponentials plus the t^{-3/2} branch-cut tail.
/// Throws TooEarly if any beta t is below `min_beta_t`.
DecayTrace a2_asymptotic(const EmitterSpec& em, std::span<const double> times, double min_beta_t = 10.0);
/// Coefficient C of the branch-cut tail C e^{i d t} (beta t)^{-3/2}.
cplx branch_tail_coefficient(const RootSet& roots);

struct VolterraOptions {
  double tolerance = 1e-4;      // on the step-halving error estimate
  bool estimate_error = true;   // false skips the half-step run
  double coupling_scale = 1.0;  // multiplies the kernel; 0 switches it off
};

/// Product-integration solve of  a' = -int_0^t K(t - t') a(t') dt'  on the
/// uniform grid t_n = n dt. Throws StepTooCoarse if the error estimate
/// exceeds the tolerance.
DecayTrace volterra_solve(const EmitterSpec& em, double t_max, double dt, const VolterraOptions& opts = {});

/// Laplace transform of a2 at complex s. Throws OnSingularity on the branch
/// cut or at a pole.
cplx a2_laplace(const EmitterSpec& em, cplx s);

struct TalbotOptions {
  int nodes = 32;
  double tolerance = 1e-8;  // agreement required between nodes and nodes + 8
};

/// Numerical Bromwich inversion on a Talbot contour. Poles on the physical
/// sheet are subtracted and restored analytically. Throws ContourFailure.
DecayTrace a2_talbot(const EmitterSpec& em, std::span<const double> times, const TalbotOptions& opts = {});

/// Long-time excited population |2 b1 x1|^2, or 0 without a non-decaying root.
double trapped_fraction(const EmitterSpec& em);

struct SpectrumTrace {
  std::vector<double> detunings;  // delta_k in units of beta
  std::vector<double> density;
  /// Weight of the non-decaying dressed state, 2 b1 x1.
  double bound_weight;
};

struct SpectrumOptions {
  double min_beta_t = 100.0;
};

/// Emitted-photon spectrum |b_k(inf)|^2 per unit detuning delta_k = omega_k - omega12.
/// The bound-state term is removed from the trace before quadrature and
/// reported as bound_weight. Throws TraceTooShort.
SpectrumTrace emission_spectrum(const DecayTrace& trace, const EmitterSpec& em,
                                std::span<const double> detunings, const SpectrumOptions& opts = {});

/// Integral of the spectral density over all in-band detunings.
double spectral_weight(const DecayTrace& trace, const EmitterSpec& em, const SpectrumOptions& opts = {});

}  // namespace bgq::dynamics

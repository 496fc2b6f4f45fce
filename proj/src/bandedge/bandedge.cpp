#include <cmath>
#include <string>

#include "bandgap_qed/bandedge.hpp"
#include "bandgap_qed/errors.hpp"

namespace bgq::bandedge {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw NumericalError(ErrorCode::InvalidArgument, what);
}

// Slope of the sampled branch at its end point, relative to the mean slope
// over the whole branch, above which the end point is not an extremum.
constexpr double kSlopeTolerance = 1e-3;

}  // namespace

double BandEdgeModel::omega(double k) const noexcept {
  const double d = k - k0;
  return edge == Edge::Lower ? omega_g + A * d * d : omega_g - A * d * d;
}

BandEdgeModel band_edge_from_structure(const lattice::BandStructure& bs, int branch, Edge edge) {
  require(branch >= 0 && branch < static_cast<int>(bs.bands.size()), "branch out of range");
  const std::vector<double>& w = bs.bands[branch];
  const std::size_t n = w.size();
  require(n >= 8 && bs.k.size() == n, "band structure needs at least 8 k samples");

  // The extrema of a 1-D branch sit at the zone center or boundary; pick the
  // end that matches the requested edge.
  const bool lower_at_start = w.front() <= w.back();
  const bool at_start = (edge == Edge::Lower) == lower_at_start;
  const auto sample = [&](std::size_t j) { return at_start ? w[j] : w[n - 1 - j]; };
  const double k0 = at_start ? bs.k.front() : bs.k.back();
  const double h = bs.k[1] - bs.k[0];
  const double w0 = sample(0);

  // Branches are even about k0, so one-sided samples give centered differences.
  const auto second = [&](std::size_t j) {
    const double hj = static_cast<double>(j) * h;
    return 2.0 * (sample(j) - w0) / (hj * hj);
  };
  // Extrapolate D2(h) = w'' + c h^2 + d h^4 from h, 2h, 3h to h = 0.
  const double curvature = 1.5 * second(1) - 0.6 * second(2) + 0.1 * second(3);

  // One-sided slope, Richardson-extrapolated: vanishes at a true extremum.
  const auto first = [&](std::size_t j) { return (sample(j) - w0) / (static_cast<double>(j) * h); };
  const double slope = 2.0 * first(1) - first(2);
  const double mean_slope = std::abs(w.back() - w.front()) / std::abs(bs.k.back() - bs.k.front());
  if (!(std::abs(slope) <= kSlopeTolerance * mean_slope) || curvature == 0.0) {
    throw NumericalError(ErrorCode::NotAnExtremum,
                         "branch " + std::to_string(branch) + " has slope " + std::to_string(slope) +
                             " at k = " + std::to_string(k0));
  }
  const bool opens_up = curvature > 0.0;
  if (opens_up != (edge == Edge::Lower)) {
    throw NumericalError(ErrorCode::NotAnExtremum, "curvature sign does not match the requested edge");
  }
  return {w0, k0, 0.5 * std::abs(curvature), edge};
}

DosModel DosModel::free_space(double scale) {
  require(std::isfinite(scale) && scale > 0.0, "free-space DOS scale must be positive");
  return DosModel(Kind::FreeSpace, 0.0, scale);
}

DosModel DosModel::isotropic_band_edge(double omega_g, double strength) {
  require(std::isfinite(omega_g) && omega_g >= 0.0, "band edge frequency must be nonnegative");
  require(std::isfinite(strength) && strength > 0.0, "DOS strength must be positive");
  return DosModel(Kind::IsotropicBandEdge, omega_g, strength);
}

DosModel DosModel::isotropic_band_edge(double omega_g, const EmitterSpec& em) {
  return isotropic_band_edge(omega_g, em.beta_three_halves() / kPi);
}

double dos_eval(const DosModel& model, double omega) {
  switch (model.kind()) {
    case DosModel::Kind::FreeSpace: return omega >= 0.0 ? model.strength() * omega * omega : 0.0;
    case DosModel::Kind::IsotropicBandEdge: {
      const double x = omega - model.omega_g();
      return x > 0.0 ? model.strength() / std::sqrt(x) : 0.0;
    }
  }
  return 0.0;
}

namespace {

double dipole_prefactor(const PhysicalBlock& p) {
  return p.dipole * p.dipole / (kPi * p.epsilon0 * p.hbar * p.c * p.c * p.c);
}

void validate(const PhysicalBlock& p) {
  require(std::isfinite(p.omega12) && p.omega12 > 0.0, "omega12 must be positive");
  require(std::isfinite(p.dipole) && p.dipole > 0.0, "dipole must be positive");
  require(p.epsilon0 > 0.0 && p.hbar > 0.0 && p.c > 0.0, "physical constants must be positive");
}

}  // namespace

double beta_from_physical(const PhysicalBlock& block) {
  validate(block);
  const double beta32 = std::pow(block.omega12, 3.5) * dipole_prefactor(block) / 6.0;
  return std::cbrt(beta32 * beta32);
}

double dipole_from_beta(double beta, const PhysicalBlock& block) {
  require(beta > 0.0, "beta must be positive");
  const double beta32 = beta * std::sqrt(beta);
  const double mu2 =
      beta32 * 6.0 * kPi * block.epsilon0 * block.hbar * block.c * block.c * block.c / std::pow(block.omega12, 3.5);
  return std::sqrt(mu2);
}

EmitterSpec EmitterSpec::from_coupling(double beta, double detuning) {
  require(std::isfinite(beta) && beta > 0.0, "beta must be positive");
  require(std::isfinite(detuning), "detuning must be finite");
  return EmitterSpec(beta, detuning, std::nullopt, std::nullopt);
}

EmitterSpec EmitterSpec::from_physical(const PhysicalBlock& block, double detuning) {
  const double beta = beta_from_physical(block);
  require(std::isfinite(detuning), "detuning must be finite");
  const double gamma = std::pow(block.omega12, 3.0) * dipole_prefactor(block) / 3.0;
  return EmitterSpec(beta, detuning, block, gamma);
}

double gamma_free_space(const EmitterSpec& em) {
  if (!em.physical()) {
    throw NumericalError(ErrorCode::MissingPhysicalBlock, "free-space rate needs omega12 and the dipole");
  }
  const PhysicalBlock& p = *em.physical();
  return std::pow(p.omega12, 3.0) * dipole_prefactor(p) / 3.0;
}

DeltaKernel free_space_kernel(const EmitterSpec& em) { return {0.5 * gamma_free_space(em)}; }

cplx kernel_band_edge(const EmitterSpec& em, double tau) {
  if (!(tau > 0.0)) {
    throw NumericalError(ErrorCode::SingularAtZero, "band-edge kernel is singular at tau <= 0");
  }
  const double phase = kPi / 4.0 + em.band_edge_offset() * tau;
  return em.beta_three_halves() / std::sqrt(kPi * tau) * std::polar(1.0, -phase);
}

}  // namespace bgq::bandedge

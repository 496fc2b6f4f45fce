#pragma once

#include <optional>

#include "bandgap_qed/lattice1d.hpp"
#include "bandgap_qed/numerics.hpp"

namespace bgq::bandedge {

enum class Edge { Lower, Upper };

/// Effective-mass expansion omega(k) = omega_g +/- A (k - k0)^2 around a band
/// extremum; the sign is + at a band bottom (Lower) and - at a band top.
struct BandEdgeModel {
  double omega_g;
  double k0;
  double A;  // > 0
  Edge edge;

  double omega(double k) const noexcept;
  /// The rough curvature omega_g / k0^2 (undefined for k0 = 0).
  double rough_curvature() const noexcept { return omega_g / (k0 * k0); }
};

/// Fits the expansion at the extremum of `branch` (k = 0 or pi/L) using
/// centered second differences at 1, 2 and 3 mesh spacings, Richardson
/// extrapolated. Throws NotAnExtremum if the slope there does not vanish.
BandEdgeModel band_edge_from_structure(const lattice::BandStructure& bs, int branch, Edge edge);

class EmitterSpec;

class DosModel {
 public:
  enum class Kind { FreeSpace, IsotropicBandEdge };

  /// rho(w) = scale * w^2.
  static DosModel free_space(double scale);
  /// rho(w) = strength * Theta(w - omega_g) / sqrt(w - omega_g).
  static DosModel isotropic_band_edge(double omega_g, double strength);
  /// Band-edge density normalized so that its memory kernel is exactly
  /// kernel_band_edge(em, .): strength = beta^{3/2} / pi.
  static DosModel isotropic_band_edge(double omega_g, const EmitterSpec& em);

  Kind kind() const noexcept { return kind_; }
  double omega_g() const noexcept { return omega_g_; }
  double strength() const noexcept { return strength_; }

 private:
  DosModel(Kind kind, double omega_g, double strength) : kind_(kind), omega_g_(omega_g), strength_(strength) {}
  Kind kind_;
  double omega_g_;
  double strength_;
};

double dos_eval(const DosModel& model, double omega);

/// SI description of the transition, from which beta and gamma21 follow.
struct PhysicalBlock {
  double omega12;  // rad/s
  double dipole;   // C m
  double epsilon0 = 8.8541878128e-12;
  double hbar = 1.054571817e-34;
  double c = 299792458.0;
};

/// Two-level emitter near an isotropic band edge.
///
/// `detuning` is measured in the convention of the Laplace-domain amplitude
/// and the closed-form solution: detuning = omega12 - omega_g, so negative
/// values put the transition inside the gap. The memory kernel carries the
/// opposite quantity, band_edge_offset() = omega_g - omega12.
class EmitterSpec {
 public:
  static EmitterSpec from_coupling(double beta, double detuning);
  static EmitterSpec from_physical(const PhysicalBlock& block, double detuning);

  double beta() const noexcept { return beta_; }
  double detuning() const noexcept { return detuning_; }
  double detuning_hat() const noexcept { return detuning_ / beta_; }
  double band_edge_offset() const noexcept { return -detuning_; }
  double beta_three_halves() const noexcept { return beta_ * std::sqrt(beta_); }

  const std::optional<PhysicalBlock>& physical() const noexcept { return physical_; }
  /// Free-space rate stored at construction (physical block only).
  std::optional<double> gamma21() const noexcept { return gamma21_; }

 private:
  EmitterSpec(double beta, double detuning, std::optional<PhysicalBlock> block, std::optional<double> gamma)
      : beta_(beta), detuning_(detuning), physical_(block), gamma21_(gamma) {}
  double beta_;
  double detuning_;
  std::optional<PhysicalBlock> physical_;
  std::optional<double> gamma21_;
};

/// beta^{3/2} = omega12^{7/2} mu^2 / (6 pi eps0 hbar c^3).
double beta_from_physical(const PhysicalBlock& block);
/// Inverse of beta_from_physical for the dipole magnitude.
double dipole_from_beta(double beta, const PhysicalBlock& block);

/// gamma21 = omega12^3 mu^2 / (3 pi eps0 hbar c^3). Throws MissingPhysicalBlock.
double gamma_free_space(const EmitterSpec& em);

/// Free-space reservoir: K(tau) = weight * delta(tau) with weight gamma21 / 2.
struct DeltaKernel {
  double weight;
};
DeltaKernel free_space_kernel(const EmitterSpec& em);

/// K(tau) = beta^{3/2} exp(-i [pi/4 + (omega_g - omega12) tau]) / sqrt(pi tau).
/// Throws SingularAtZero for tau <= 0.
cplx kernel_band_edge(const EmitterSpec& em, double tau);

enum class CutoffShape {
  Exponential,  // density multiplied by exp(-(w - w_start) / (cutoff - w_start))
  Sharp,        // density truncated at cutoff
};

struct KernelQuadratureOptions {
  CutoffShape shape = CutoffShape::Exponential;
  double tolerance = 1e-8;  // relative, on the step-refinement error estimate
};

struct KernelEstimate {
  cplx value;
  double error_estimate;
};

/// Memory kernel integral  int rho(w) exp(-i (w - omega12) tau) dw  of a
/// density model, regularized at `cutoff`. For the band-edge density the
/// reference omega12 is omega_g - band_edge_offset(); for free space it is
/// the physical omega12 (MissingPhysicalBlock otherwise). Throws
/// QuadratureFailure if the error estimate exceeds the tolerance.
KernelEstimate kernel_from_dos_detailed(const DosModel& model, const EmitterSpec& em, double tau,
                                        double cutoff, const KernelQuadratureOptions& opts = {});
cplx kernel_from_dos(const DosModel& model, const EmitterSpec& em, double tau, double cutoff,
                     const KernelQuadratureOptions& opts = {});

}  // namespace bgq::bandedge

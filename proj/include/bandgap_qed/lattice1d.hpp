#pragma once

#include <array>
#include <vector>

#include "bandgap_qed/numerics.hpp"

// One-dimensional photonic crystal: scatterers of index n and width 2a
// separated by spacers of width b, lattice constant L = 2a + b. Units have
// c = 1, so an angular frequency and its vacuum wavenumber coincide.
namespace bgq::lattice {

class LatticeSpec {
 public:
  /// Throws NumericalError(InvalidArgument) unless n >= 1, a > 0, b >= 0.
  LatticeSpec(double n, double a, double b);

  /// The quarter-wave-like stack b = 2na for which the dispersion inverts in closed form.
  static LatticeSpec isotropic(double n, double a);

  double n() const noexcept { return n_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double L() const noexcept { return L_; }

  /// |b - 2na| <= 1e-12 L.
  bool isotropic_case() const noexcept;

 private:
  double n_, a_, b_, L_;
};

struct DispersionConfig {
  /// Scan points per pi/L when locating band extrema and gaps.
  int scan_points_per_unit = 4096;
  /// Upper end of the root-search window. Zero selects (branch + 2) pi / L.
  double scan_window = 0.0;
  ToleranceConfig tol{};
};

/// n^2 - 1 inside a scatterer (periodically extended), zero in the spacers.
double epsilon_fluct(const LatticeSpec& spec, double x);

/// Phi(x) = -omega^2 epsilon_fluct(x).
double scattering_potential(const LatticeSpec& spec, double x, double omega);

/// cos(2na w) cos(b w) - (n^2 + 1)/(2n) sin(2na w) sin(b w). Real Bloch waves
/// exist at w iff the value lies in [-1, 1], and then it equals cos(kL).
double dispersion_rhs(const LatticeSpec& spec, double omega);
double dispersion_rhs_derivative(const LatticeSpec& spec, double omega);

/// Closed-form branch `branch` of omega(k) for isotropic specs, k in [0, pi/L].
/// Throws NotIsotropicCase otherwise.
double dispersion_analytic(const LatticeSpec& spec, double k, int branch);

/// Root solve of dispersion_rhs(w) = cos(kL) for the (branch+1)-th frequency.
/// Works for any b. Throws BracketNotFound if the window holds too few bands.
double dispersion_numeric(const LatticeSpec& spec, double k, int branch,
                          const DispersionConfig& cfg = {});

/// Frequencies where dispersion_rhs has a local extremum, starting with 0.
/// Band m occupies [edges[m], edges[m+1]] (its allowed part, that is).
std::vector<double> band_extrema(const LatticeSpec& spec, double omega_max,
                                 const DispersionConfig& cfg = {});

struct GapInterval {
  double omega_low;
  double omega_high;
  double midgap;
  double gap_midgap_ratio;

  static GapInterval from_edges(double low, double high);
};

/// Every maximal interval with |dispersion_rhs| > 1 starting below omega_max,
/// ordered by omega_low. Edges are refined to |rhs| = 1.
std::vector<GapInterval> find_gaps(const LatticeSpec& spec, double omega_max,
                                   const DispersionConfig& cfg = {});

struct BandStructure {
  LatticeSpec lattice;
  std::vector<double> k;                   // uniform on [0, pi/L]
  std::vector<std::vector<double>> bands;  // bands[m][i] = omega_m(k[i])
};

BandStructure compute_band_structure(const LatticeSpec& spec, int num_bands, int num_k,
                                     const DispersionConfig& cfg = {});

enum class Region { Left, Scatterer, Right };

/// Bloch eigenmode on the unit cell [-L/2, L/2]. Coefficients are (A..F) of
///   A e^{iwx} + B e^{-iwx}     x < -a
///   C e^{inwx} + D e^{-inwx}   |x| < a
///   E e^{iwx} + F e^{-iwx}     x > a
/// normalized so that A = 1.
class BlochMode {
 public:
  BlochMode(LatticeSpec spec, double k, double omega, std::array<cplx, 6> coefficients);

  double k() const noexcept { return k_; }
  double omega() const noexcept { return omega_; }
  const std::array<cplx, 6>& coefficients() const noexcept { return coef_; }
  const LatticeSpec& lattice() const noexcept { return spec_; }

  /// Field anywhere on the line, continued by E(x + L) = e^{ikL} E(x).
  cplx field(double x) const;
  cplx derivative(double x) const;

  /// One piece of the piecewise formula, evaluated at x without any reduction.
  cplx piece(Region region, double x) const;
  cplx piece_derivative(Region region, double x) const;

 private:
  LatticeSpec spec_;
  double k_, omega_;
  std::array<cplx, 6> coef_;
};

/// Throws OffShell unless |dispersion_rhs(omega) - cos(kL)| <= 1e-8.
BlochMode bloch_mode(const LatticeSpec& spec, double k, double omega);

}  // namespace bgq::lattice

#include <cmath>

#include "bandgap_qed/errors.hpp"
#include "bandgap_qed/lattice1d.hpp"

namespace bgq::lattice {
namespace {

constexpr cplx kI(0.0, 1.0);

struct Interior {
  cplx c, d;
};

// Field and derivative continuity at x = -a, solved for (C, D).
Interior match_left(double q, double qn, double a, cplx A, cplx B) {
  const cplx ea = std::exp(-kI * q * a);
  const double r = q / qn;
  const cplx c = 0.5 * ((1.0 + r) * A * ea + (1.0 - r) * B / ea) * std::exp(kI * qn * a);
  const cplx d = 0.5 * ((1.0 - r) * A * ea + (1.0 + r) * B / ea) * std::exp(-kI * qn * a);
  return {c, d};
}

// Continuity at x = +a, solved for (E, F).
std::pair<cplx, cplx> match_right(double q, double qn, double a, cplx C, cplx D) {
  const cplx inner_c = C * std::exp(kI * qn * a);
  const cplx inner_d = D * std::exp(-kI * qn * a);
  const double r = qn / q;
  const cplx e = 0.5 * ((1.0 + r) * inner_c + (1.0 - r) * inner_d) * std::exp(-kI * q * a);
  const cplx f = 0.5 * ((1.0 - r) * inner_c + (1.0 + r) * inner_d) * std::exp(kI * q * a);
  return {e, f};
}

// (A, B) -> (E, F) through the scatterer.
std::pair<cplx, cplx> transfer(double q, double qn, double a, cplx A, cplx B) {
  const Interior in = match_left(q, qn, a, A, B);
  return match_right(q, qn, a, in.c, in.d);
}

}  // namespace

BlochMode::BlochMode(LatticeSpec spec, double k, double omega, std::array<cplx, 6> coefficients)
    : spec_(spec), k_(k), omega_(omega), coef_(coefficients) {}

cplx BlochMode::piece(Region region, double x) const {
  const double q = omega_;
  const double qn = spec_.n() * omega_;
  switch (region) {
    case Region::Left: return coef_[0] * std::exp(kI * q * x) + coef_[1] * std::exp(-kI * q * x);
    case Region::Scatterer: return coef_[2] * std::exp(kI * qn * x) + coef_[3] * std::exp(-kI * qn * x);
    case Region::Right: return coef_[4] * std::exp(kI * q * x) + coef_[5] * std::exp(-kI * q * x);
  }
  return 0.0;
}

cplx BlochMode::piece_derivative(Region region, double x) const {
  const double q = omega_;
  const double qn = spec_.n() * omega_;
  switch (region) {
    case Region::Left:
      return kI * q * (coef_[0] * std::exp(kI * q * x) - coef_[1] * std::exp(-kI * q * x));
    case Region::Scatterer:
      return kI * qn * (coef_[2] * std::exp(kI * qn * x) - coef_[3] * std::exp(-kI * qn * x));
    case Region::Right:
      return kI * q * (coef_[4] * std::exp(kI * q * x) - coef_[5] * std::exp(-kI * q * x));
  }
  return 0.0;
}

namespace {
Region region_of(const LatticeSpec& s, double x0) {
  if (x0 < -s.a()) return Region::Left;
  if (x0 > s.a()) return Region::Right;
  return Region::Scatterer;
}
}  // namespace

cplx BlochMode::field(double x) const {
  const double L = spec_.L();
  const double cells = std::round(x / L);
  const double x0 = x - cells * L;
  return std::exp(kI * k_ * L * cells) * piece(region_of(spec_, x0), x0);
}

cplx BlochMode::derivative(double x) const {
  const double L = spec_.L();
  const double cells = std::round(x / L);
  const double x0 = x - cells * L;
  return std::exp(kI * k_ * L * cells) * piece_derivative(region_of(spec_, x0), x0);
}

BlochMode bloch_mode(const LatticeSpec& spec, double k, double omega) {
  const double L = spec.L();
  const double residual = std::abs(dispersion_rhs(spec, omega) - std::cos(k * L));
  if (!(omega >= 0.0) || residual > 1e-8) {
    throw NumericalError(ErrorCode::OffShell,
                         "(k, omega) misses the dispersion relation by " + std::to_string(residual));
  }
  if (omega == 0.0) {
    // Static limit: a uniform field.
    return BlochMode(spec, k, omega, {1.0, 0.0, 1.0, 0.0, 1.0, 0.0});
  }

  const double q = omega;
  const double qn = spec.n() * omega;
  const double a = spec.a();
  // Columns of the cell map M = diag(e^{iqL}, e^{-iqL}) T, whose eigenvalue
  // e^{ikL} gives the Floquet solution.
  const auto [t11, t21] = transfer(q, qn, a, 1.0, 0.0);
  const auto [t12, t22] = transfer(q, qn, a, 0.0, 1.0);
  const cplx up = std::exp(kI * q * L), down = std::exp(-kI * q * L);
  const cplx m11 = up * t11, m12 = up * t12, m21 = down * t21, m22 = down * t22;
  const cplx lambda = std::exp(kI * k * L);

  // Null vector of M - lambda I from whichever row is better conditioned.
  cplx A = m12, B = lambda - m11;
  const cplx A2 = lambda - m22, B2 = m21;
  if (std::norm(A2) + std::norm(B2) > std::norm(A) + std::norm(B)) {
    A = A2;
    B = B2;
  }
  const double scale = std::abs(m11) + std::abs(m12) + std::abs(m21) + std::abs(m22);
  if (std::abs(A) + std::abs(B) <= 1e-12 * scale) {
    // M = lambda I: every vector is a Floquet solution; take the forward wave.
    A = 1.0;
    B = 0.0;
  }
  if (std::abs(A) <= 1e-14 * std::abs(B)) {
    throw NumericalError(ErrorCode::OffShell, "Bloch mode has no forward component; cannot set A = 1");
  }
  B /= A;
  A = 1.0;

  const Interior in = match_left(q, qn, a, A, B);
  const auto [E, F] = match_right(q, qn, a, in.c, in.d);
  return BlochMode(spec, k, omega, {A, B, in.c, in.d, E, F});
}

}  // namespace bgq::lattice

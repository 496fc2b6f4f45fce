#include <cmath>

#include "bandgap_qed/bandedge.hpp"
#include "bandgap_qed/errors.hpp"
#include "doctest.h"

using namespace bgq;
using namespace bgq::bandedge;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const NumericalError& e) {
    return e.code();
  }
  FAIL("expected NumericalError");
  return ErrorCode::InvalidArgument;
}

// Near k0 = pi/L, cos(kL) = -1 + L^2 (k - k0)^2 / 2 and rhs(w) = -1 + rhs'(w_g)(w - w_g),
// so the curvature follows from the dispersion derivative alone.
double implicit_curvature(const lattice::LatticeSpec& s, double omega_g) {
  return s.L() * s.L() / (2.0 * std::abs(lattice::dispersion_rhs_derivative(s, omega_g)));
}

PhysicalBlock optical() {
  PhysicalBlock p;
  p.omega12 = 2.0 * kPi * 3.0e14;
  p.dipole = 1.0e-29;
  return p;
}

}  // namespace

TEST_CASE("band-edge fit against the implicit-derivative curvature") {
  for (double n : {2.0, 3.0, 4.0}) {
    const auto s = lattice::LatticeSpec::isotropic(n, 0.25);
    const auto bs = lattice::compute_band_structure(s, 2, 512);
    for (auto [branch, edge] : {std::pair{0, Edge::Upper}, std::pair{1, Edge::Lower}}) {
      const BandEdgeModel m = band_edge_from_structure(bs, branch, edge);
      CHECK(m.edge == edge);
      CHECK(m.k0 == doctest::Approx(kPi / s.L()).epsilon(1e-14));
      CHECK(m.omega_g == bs.bands[branch].back());
      CHECK(m.A > 0.0);
      CHECK(std::isfinite(m.A));
      CHECK(std::abs(m.A / implicit_curvature(s, m.omega_g) - 1.0) <= 0.05);
      const double ratio = m.A / m.rough_curvature();
      CHECK(ratio >= 0.1);
      CHECK(ratio <= 10.0);
      // Value exact at k0, curvature sign per edge.
      CHECK(m.omega(m.k0) == m.omega_g);
      const double off = m.omega(m.k0 - 0.01) - m.omega_g;
      CHECK((edge == Edge::Lower ? off > 0.0 : off < 0.0));
    }
  }
}

TEST_CASE("band-edge fit rejects non-extrema") {
  const auto vac = lattice::LatticeSpec(1.0, 0.25, 0.5);
  const auto bs = lattice::compute_band_structure(vac, 1, 512);
  CHECK(code_of([&] { band_edge_from_structure(bs, 0, Edge::Upper); }) == ErrorCode::NotAnExtremum);
  const auto iso = lattice::compute_band_structure(lattice::LatticeSpec::isotropic(3.0, 0.25), 2, 256);
  // A band top labelled as a bottom has the wrong curvature sign.
  CHECK(code_of([&] { band_edge_from_structure(iso, 0, Edge::Lower); }) == ErrorCode::NotAnExtremum);
  CHECK(code_of([&] { band_edge_from_structure(iso, 5, Edge::Lower); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("density of states") {
  const DosModel edge = DosModel::isotropic_band_edge(2.0, 1.0);
  CHECK(dos_eval(edge, 1.0) == 0.0);
  CHECK(dos_eval(edge, 2.0) == 0.0);
  CHECK(dos_eval(edge, 6.0) == 0.5);
  double last = dos_eval(edge, 2.0 + 1e-9);
  for (int i = 1; i <= 100; ++i) {
    const double v = dos_eval(edge, 2.0 + 1e-9 + 0.1 * i);
    CHECK(v < last);
    last = v;
  }
  CHECK(dos_eval(DosModel::free_space(1.0), 3.0) == 9.0);
  const auto em = EmitterSpec::from_coupling(4.0, 0.0);
  CHECK(DosModel::isotropic_band_edge(1.0, em).strength() == doctest::Approx(8.0 / kPi).epsilon(1e-15));
}

TEST_CASE("closed-form band-edge kernel") {
  const auto em0 = EmitterSpec::from_coupling(1.0, 0.0);
  CHECK(std::abs(std::abs(kernel_band_edge(em0, 1.0 / kPi)) - 1.0) < 1e-15);
  for (double tau : {0.01, 0.3, 1.0, 7.0}) {
    CHECK(std::arg(kernel_band_edge(em0, tau)) == doctest::Approx(-kPi / 4.0).epsilon(1e-14));
    for (double d : {-3.0, 0.5}) {
      const auto em = EmitterSpec::from_coupling(2.0, d);
      const cplx k = kernel_band_edge(em, tau);
      CHECK(std::abs(k) == doctest::Approx(std::pow(2.0, 1.5) / std::sqrt(kPi * tau)).epsilon(1e-14));
      const cplx rotated = std::exp(cplx(0.0, -em.band_edge_offset() * tau)) *
                           kernel_band_edge(EmitterSpec::from_coupling(2.0, 0.0), tau);
      CHECK(std::abs(k - rotated) <= 1e-14 * std::abs(k));
    }
  }
  CHECK(code_of([&] { kernel_band_edge(em0, 0.0); }) == ErrorCode::SingularAtZero);
  CHECK(code_of([&] { kernel_band_edge(em0, -1.0); }) == ErrorCode::SingularAtZero);
}

TEST_CASE("kernel quadrature converges to the closed form") {
  const double omega_g = 3.0;
  const auto em = EmitterSpec::from_coupling(1.0, 0.0);
  const DosModel model = DosModel::isotropic_band_edge(omega_g, em);
  for (int i = 0; i <= 20; ++i) {
    const double tau = 0.1 * std::pow(100.0, i / 20.0);
    const cplx exact = kernel_band_edge(em, tau);
    const cplx quad = kernel_from_dos(model, em, tau, omega_g + 1e4);
    CHECK(std::abs(quad - exact) <= 1e-3 * std::abs(exact));
  }

  // With the exp(-x / S) regulator the integral is sqrt(pi) / sqrt(1/S + i tau), over pi.
  for (double tau : {0.1, 1.0, 10.0}) {
    const double S = 1e3;
    const cplx regularized = 1.0 / kPi * kSqrtPi / std::sqrt(cplx(1.0 / S, tau));
    const cplx quad = kernel_from_dos(model, em, tau, omega_g + S);
    CHECK(std::abs(quad - regularized) <= 1e-9 * std::abs(regularized));
  }

  for (double tau : {0.1, 0.5, 2.0, 10.0}) {
    const cplx exact = kernel_band_edge(em, tau);
    double last = 1e300;
    for (double cutoff : {1e2, 2e2, 4e2, 8e2, 1.6e3}) {
      const double dev = std::abs(kernel_from_dos(model, em, tau, omega_g + cutoff) - exact);
      CHECK(dev < last);
      last = dev;
    }
  }
}

TEST_CASE("kernel quadrature detuning rotation") {
  const double omega_g = 1.0;
  const auto em0 = EmitterSpec::from_coupling(1.0, 0.0);
  for (double d : {-2.0, 1.5}) {
    const auto em = EmitterSpec::from_coupling(1.0, d);
    for (double tau : {0.2, 3.0}) {
      const cplx base = kernel_from_dos(DosModel::isotropic_band_edge(omega_g, em0), em0, tau, omega_g + 1e4);
      const cplx shifted = kernel_from_dos(DosModel::isotropic_band_edge(omega_g, em), em, tau, omega_g + 1e4);
      CHECK(std::abs(shifted - std::exp(cplx(0.0, -em.band_edge_offset() * tau)) * base) <= 1e-12 * std::abs(base));
    }
  }
}

TEST_CASE("sharp cutoff against the Fresnel closed form") {
  const double omega_g = 1.0, cutoff = 400.0;
  const auto em = EmitterSpec::from_coupling(1.0, 0.0);
  KernelQuadratureOptions opts;
  opts.shape = CutoffShape::Sharp;
  for (double tau : {0.1, 1.0, 10.0}) {
    // (1/pi) int_0^S x^{-1/2} e^{-i tau x} dx = sqrt(pi / (i tau)) erf(sqrt(i tau S)) / pi.
    const cplx z = std::sqrt(cplx(0.0, tau * (cutoff - omega_g)));
    const cplx erf_z = 1.0 - num::erfc_scaled(z) * std::exp(-z * z);
    const cplx exact = std::sqrt(kPi / cplx(0.0, tau)) * erf_z / kPi;
    const KernelEstimate est = kernel_from_dos_detailed(DosModel::isotropic_band_edge(omega_g, em), em, tau, cutoff, opts);
    CHECK(std::abs(est.value - exact) <= 1e-8 * std::abs(exact));
    CHECK(est.error_estimate <= 1e-8);
  }
}

TEST_CASE("kernel quadrature argument errors") {
  const auto em = EmitterSpec::from_coupling(1.0, 0.0);
  const DosModel model = DosModel::isotropic_band_edge(1.0, em);
  CHECK(code_of([&] { kernel_from_dos(model, em, 1.0, 0.5); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { kernel_from_dos(model, em, 0.0, 100.0); }) == ErrorCode::SingularAtZero);
  CHECK(code_of([&] { kernel_from_dos(DosModel::free_space(1.0), em, 1.0, 100.0); }) ==
        ErrorCode::MissingPhysicalBlock);
}

TEST_CASE("physical parameters") {
  const PhysicalBlock p = optical();
  const auto em = EmitterSpec::from_physical(p, 0.0);
  const double gamma = gamma_free_space(em);
  CHECK(gamma > 0.0);
  CHECK(*em.gamma21() == doctest::Approx(gamma).epsilon(1e-12));
  CHECK(em.beta_three_halves() / gamma == doctest::Approx(std::sqrt(p.omega12) / 2.0).epsilon(1e-12));
  CHECK(free_space_kernel(em).weight == doctest::Approx(gamma / 2.0).epsilon(1e-15));

  PhysicalBlock twice_mu = p;
  twice_mu.dipole *= 2.0;
  CHECK(gamma_free_space(EmitterSpec::from_physical(twice_mu, 0.0)) == doctest::Approx(4.0 * gamma).epsilon(1e-14));
  PhysicalBlock twice_w = p;
  twice_w.omega12 *= 2.0;
  CHECK(gamma_free_space(EmitterSpec::from_physical(twice_w, 0.0)) == doctest::Approx(8.0 * gamma).epsilon(1e-14));

  const double mu = dipole_from_beta(em.beta(), p);
  CHECK(std::abs(mu - p.dipole) <= 1e-10 * p.dipole);
  CHECK(beta_from_physical(p) == doctest::Approx(em.beta()).epsilon(1e-15));

  const auto bare = EmitterSpec::from_coupling(1.0, 0.0);
  CHECK(code_of([&] { gamma_free_space(bare); }) == ErrorCode::MissingPhysicalBlock);
  CHECK(code_of([&] { free_space_kernel(bare); }) == ErrorCode::MissingPhysicalBlock);
  CHECK(code_of([] { EmitterSpec::from_coupling(0.0, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("free-space kernel quadrature uses the physical reference") {
  const PhysicalBlock p = optical();
  const auto em = EmitterSpec::from_physical(p, 0.0);
  // Rescale the density so the integrand stays O(1) near omega12.
  const DosModel model = DosModel::free_space(1.0 / (p.omega12 * p.omega12));
  const double tau = 1e-14, cutoff = 2.0 * p.omega12;
  KernelQuadratureOptions opts;
  opts.shape = CutoffShape::Sharp;
  // Closed form of int_0^C (w / w12)^2 e^{-i (w - w12) tau} dw by parts.
  const cplx i(0.0, 1.0);
  const auto antiderivative = [&](double w) {
    const cplx e = std::exp(-i * (w - p.omega12) * tau);
    return e * (i * w * w / tau + 2.0 * w / (tau * tau) - 2.0 * i / (tau * tau * tau)) / (p.omega12 * p.omega12);
  };
  const cplx exact = antiderivative(cutoff) - antiderivative(0.0);
  const cplx quad = kernel_from_dos(model, em, tau, cutoff, opts);
  CHECK(std::abs(quad - exact) <= 1e-8 * std::abs(exact));
}

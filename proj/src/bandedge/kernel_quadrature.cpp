#include <array>
#include <cmath>
#include <functional>

#include "bandgap_qed/bandedge.hpp"
#include "bandgap_qed/errors.hpp"

namespace bgq::bandedge {
namespace {

constexpr cplx kI(0.0, 1.0);
constexpr int kFilonPoints = 9;

// Chebyshev-Lobatto nodes on [-1, 1] and the monomial coefficients of their
// Lagrange basis polynomials: basis[j][p] is the x^p coefficient of l_j.
struct FilonBasis {
  std::array<double, kFilonPoints> nodes{};
  std::array<std::array<double, kFilonPoints>, kFilonPoints> basis{};

  FilonBasis() {
    constexpr int n = kFilonPoints;
    for (int j = 0; j < n; ++j) nodes[j] = -std::cos(kPi * j / (n - 1));
    // Invert the Vandermonde matrix V[i][p] = nodes[i]^p by Gauss-Jordan.
    std::array<std::array<double, 2 * n>, n> m{};
    for (int i = 0; i < n; ++i) {
      double x = 1.0;
      for (int p = 0; p < n; ++p, x *= nodes[i]) m[i][p] = x;
      m[i][n + i] = 1.0;
    }
    for (int col = 0; col < n; ++col) {
      int pivot = col;
      for (int r = col + 1; r < n; ++r) {
        if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
      }
      std::swap(m[col], m[pivot]);
      const double d = m[col][col];
      for (double& v : m[col]) v /= d;
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        const double f = m[r][col];
        for (int c = 0; c < 2 * n; ++c) m[r][c] -= f * m[col][c];
      }
    }
    // V^{-1}[p][j] is the x^p coefficient of l_j.
    for (int j = 0; j < n; ++j) {
      for (int p = 0; p < n; ++p) basis[j][p] = m[p][n + j];
    }
  }
};

const FilonBasis& filon_basis() {
  static const FilonBasis b;
  return b;
}

// int_{x0}^{x1} g(x) e^{-i tau x} dx with g replaced by its degree-8
// interpolant; the oscillation is integrated exactly through moments.
cplx filon_panel(const std::function<double(double)>& g, double x0, double x1, double tau) {
  const FilonBasis& fb = filon_basis();
  const double half = 0.5 * (x1 - x0), mid = 0.5 * (x0 + x1);
  const double theta = tau * half;

  // m_p = int_{-1}^{1} s^p e^{-i theta s} ds by upward recurrence, fine for theta >= 2.
  std::array<cplx, kFilonPoints> mom{};
  const cplx ep = std::exp(-kI * theta), em = std::exp(kI * theta);
  mom[0] = (ep - em) / (-kI * theta);
  for (int p = 1; p < kFilonPoints; ++p) {
    const cplx boundary = (ep - (p % 2 == 0 ? em : -em)) / (-kI * theta);
    mom[p] = boundary + (static_cast<double>(p) / (kI * theta)) * mom[p - 1];
  }
  cplx sum = 0.0;
  for (int j = 0; j < kFilonPoints; ++j) {
    cplx wj = 0.0;
    for (int p = 0; p < kFilonPoints; ++p) wj += fb.basis[j][p] * mom[p];
    sum += g(mid + half * fb.nodes[j]) * wj;
  }
  return sum * half * std::exp(-kI * tau * mid);
}

cplx plain_panel(const std::function<double(double)>& g, double x0, double x1, double tau) {
  return num::integrate_gl([&](double x) { return g(x) * std::exp(-kI * tau * x); }, x0, x1, 1, 24);
}

struct Layout {
  double edge_end;     // end of the u = sqrt(x) piece
  double end;          // upper integration limit
  double growth;       // tail panel width / left end
  double max_width;    // tail panel width cap
  int edge_panels;
};

// int_0^end g(x) e^{-i tau x} dx where g(x) = h(x) / sqrt(x) with h smooth.
cplx integrate_layout(const std::function<double(double)>& h, double tau, const Layout& lay) {
  const auto edge = [&](double u) { return 2.0 * h(u * u) * std::exp(-kI * tau * u * u); };
  cplx total = num::integrate_gl(edge, 0.0, std::sqrt(lay.edge_end), lay.edge_panels, 24);

  const auto g = [&](double x) { return h(x) / std::sqrt(x); };
  double x = lay.edge_end;
  while (x < lay.end) {
    const double width = std::min({lay.growth * x, lay.max_width, lay.end - x});
    const double next = (lay.end - (x + width) < 1e-12 * lay.end) ? lay.end : x + width;
    total += (0.5 * tau * (next - x) >= 2.0) ? filon_panel(g, x, next, tau) : plain_panel(g, x, next, tau);
    x = next;
  }
  return total;
}

}  // namespace

KernelEstimate kernel_from_dos_detailed(const DosModel& model, const EmitterSpec& em, double tau, double cutoff,
                                        const KernelQuadratureOptions& opts) {
  if (!(tau > 0.0)) throw NumericalError(ErrorCode::SingularAtZero, "kernel quadrature needs tau > 0");
  if (!(opts.tolerance > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "tolerance must be positive");

  // Frequencies are measured from the lower end of the density's support.
  const double start = model.kind() == DosModel::Kind::IsotropicBandEdge ? model.omega_g() : 0.0;
  const double span = cutoff - start;
  if (!(span > 0.0) || !std::isfinite(span)) {
    throw NumericalError(ErrorCode::InvalidArgument, "cutoff must lie above the start of the density");
  }
  const bool sharp = opts.shape == CutoffShape::Sharp;
  const auto regulator = [&](double x) { return sharp ? 1.0 : std::exp(-x / span); };

  std::function<double(double)> h;
  cplx reference;
  if (model.kind() == DosModel::Kind::IsotropicBandEdge) {
    const double s = model.strength();
    h = [s, regulator](double x) { return s * regulator(x); };
    // omega - omega12 = (omega - omega_g) + (omega_g - omega12).
    reference = std::polar(1.0, -em.band_edge_offset() * tau);
  } else {
    if (!em.physical()) {
      throw NumericalError(ErrorCode::MissingPhysicalBlock, "free-space kernel needs omega12");
    }
    const double s = model.strength();
    h = [s, regulator](double x) { return s * x * x * std::sqrt(x) * regulator(x); };
    reference = std::polar(1.0, em.physical()->omega12 * tau);
  }

  // e^{-45} ~ 3e-20 truncates the exponential tail below double precision.
  const double end = sharp ? span : 45.0 * span;
  Layout coarse{std::min(end, 20.0 / tau), end, 0.25, 0.5 * span, 16};
  Layout fine{coarse.edge_end, end, 0.125, 0.25 * span, 32};
  const cplx a = integrate_layout(h, tau, coarse);
  const cplx b = integrate_layout(h, tau, fine);
  const double err = std::abs(a - b);
  if (!(err <= opts.tolerance * std::abs(b))) {
    throw NumericalError(ErrorCode::QuadratureFailure,
                         "kernel quadrature error estimate " + std::to_string(err) + " exceeds tolerance");
  }
  return {reference * b, err};
}

cplx kernel_from_dos(const DosModel& model, const EmitterSpec& em, double tau, double cutoff,
                     const KernelQuadratureOptions& opts) {
  return kernel_from_dos_detailed(model, em, tau, cutoff, opts).value;
}

}  // namespace bgq::bandedge

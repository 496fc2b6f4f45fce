#include <algorithm>
#include <cmath>
#include <string>

#include "bandgap_qed/errors.hpp"
#include "bandgap_qed/lattice1d.hpp"

namespace bgq::lattice {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw NumericalError(ErrorCode::InvalidArgument, what);
}

double contrast(const LatticeSpec& s) { return (s.n() * s.n() + 1.0) / (2.0 * s.n()); }

// Zero of the derivative inside [lo, hi] where it changes sign.
double refine_extremum(const LatticeSpec& spec, double lo, double hi, const ToleranceConfig& tol) {
  return num::brent_root([&](double w) { return dispersion_rhs_derivative(spec, w); }, lo, hi, tol);
}

double scan_step(const LatticeSpec& spec, const DispersionConfig& cfg) {
  require(cfg.scan_points_per_unit >= 16, "scan_points_per_unit must be >= 16");
  return kPi / spec.L() / cfg.scan_points_per_unit;
}

// Extrema of the dispersion RHS in (lo, hi], found by derivative sign changes.
void collect_extrema(const LatticeSpec& spec, double lo, double hi, const DispersionConfig& cfg,
                     std::vector<double>& out) {
  const double step = scan_step(spec, cfg);
  double w0 = lo;
  double d0 = dispersion_rhs_derivative(spec, w0);
  while (w0 < hi) {
    const double w1 = std::min(w0 + step, hi);
    const double d1 = dispersion_rhs_derivative(spec, w1);
    if (d1 == 0.0) {
      out.push_back(w1);
    } else if (d0 != 0.0 && (d0 > 0.0) != (d1 > 0.0)) {
      out.push_back(refine_extremum(spec, w0, w1, cfg.tol));
    }
    w0 = w1;
    d0 = d1;
  }
}

// Root of rhs(w) = target inside band m, where rhs is monotone.
double root_in_band(const LatticeSpec& spec, const std::vector<double>& edges, int m, double target,
                    const ToleranceConfig& tol) {
  const auto f = [&](double w) { return dispersion_rhs(spec, w) - target; };
  const double lo = edges[m], hi = edges[m + 1];
  const double flo = f(lo), fhi = f(hi);
  if ((flo > 0.0) == (fhi > 0.0) && flo != 0.0 && fhi != 0.0) {
    // Touching band edge (no gap): the root sits on the extremum itself.
    constexpr double touch = 1e-13;
    if (std::abs(flo) <= touch) return lo;
    if (std::abs(fhi) <= touch) return hi;
    throw NumericalError(ErrorCode::BracketNotFound,
                         "no sign change of the dispersion residual inside band " + std::to_string(m));
  }
  return num::brent_root(f, lo, hi, tol);
}

// Sweeps call dispersion_numeric many times on one lattice; the extrema scan
// dominates, so the last result is kept per thread. The key is exact, so a
// hit returns the same bits a fresh scan would.
struct ExtremaCache {
  bool valid = false;
  double n = 0, a = 0, b = 0, window = 0;
  int scan_points = 0;
  ToleranceConfig tol{};
  std::vector<double> edges;
};

const std::vector<double>& cached_extrema(const LatticeSpec& spec, double window, const DispersionConfig& cfg) {
  thread_local ExtremaCache cache;
  const bool hit = cache.valid && cache.n == spec.n() && cache.a == spec.a() && cache.b == spec.b() &&
                   cache.window == window && cache.scan_points == cfg.scan_points_per_unit &&
                   cache.tol.root_tol == cfg.tol.root_tol && cache.tol.quad_tol == cfg.tol.quad_tol &&
                   cache.tol.erf_tol == cfg.tol.erf_tol && cache.tol.max_iter == cfg.tol.max_iter;
  if (!hit) {
    cache.valid = false;
    cache.edges = band_extrema(spec, window, cfg);
    cache.n = spec.n();
    cache.a = spec.a();
    cache.b = spec.b();
    cache.window = window;
    cache.scan_points = cfg.scan_points_per_unit;
    cache.tol = cfg.tol;
    cache.valid = true;
  }
  return cache.edges;
}

}  // namespace

LatticeSpec::LatticeSpec(double n, double a, double b) : n_(n), a_(a), b_(b), L_(2.0 * a + b) {
  require(std::isfinite(n) && n >= 1.0, "refractive index must satisfy n >= 1");
  require(std::isfinite(a) && a > 0.0, "scatterer half-width must satisfy a > 0");
  require(std::isfinite(b) && b >= 0.0, "spacer width must satisfy b >= 0");
}

LatticeSpec LatticeSpec::isotropic(double n, double a) { return LatticeSpec(n, a, 2.0 * n * a); }

bool LatticeSpec::isotropic_case() const noexcept {
  return std::abs(b_ - 2.0 * n_ * a_) <= 1e-12 * L_;
}

double epsilon_fluct(const LatticeSpec& spec, double x) {
  const double L = spec.L();
  const double reduced = x - L * std::round(x / L);
  return std::abs(reduced) < spec.a() ? spec.n() * spec.n() - 1.0 : 0.0;
}

double scattering_potential(const LatticeSpec& spec, double x, double omega) {
  return -omega * omega * epsilon_fluct(spec, x);
}

double dispersion_rhs(const LatticeSpec& spec, double omega) {
  const double p = 2.0 * spec.n() * spec.a() * omega;
  const double q = spec.b() * omega;
  return std::cos(p) * std::cos(q) - contrast(spec) * std::sin(p) * std::sin(q);
}

double dispersion_rhs_derivative(const LatticeSpec& spec, double omega) {
  const double pc = 2.0 * spec.n() * spec.a();
  const double qc = spec.b();
  const double sp = std::sin(pc * omega), cp = std::cos(pc * omega);
  const double sq = std::sin(qc * omega), cq = std::cos(qc * omega);
  const double kappa = contrast(spec);
  return -pc * sp * cq - qc * cp * sq - kappa * (pc * cp * sq + qc * sp * cq);
}

double dispersion_analytic(const LatticeSpec& spec, double k, int branch) {
  if (!spec.isotropic_case()) {
    throw NumericalError(ErrorCode::NotIsotropicCase,
                         "closed-form dispersion needs b = 2na (got b = " + std::to_string(spec.b()) + ")");
  }
  const double L = spec.L();
  require(branch >= 0, "branch must be nonnegative");
  require(k >= -1e-12 / L && k <= kPi / L * (1.0 + 1e-12), "k must lie in [0, pi/L]");

  // arccos of (4n cos kL + (1-n)^2)/(1+n)^2, written through 1 -/+ argument so
  // that neither band edge loses precision.
  const double n = spec.n();
  const double s = std::sin(0.5 * k * L);
  const double c = std::cos(0.5 * k * L);
  const double denom = (1.0 + n) * (1.0 + n);
  const double one_minus = 8.0 * n * s * s / denom;
  const double one_plus = (2.0 * (1.0 - n) * (1.0 - n) + 8.0 * n * c * c) / denom;
  const double phase = 2.0 * std::atan2(std::sqrt(one_minus), std::sqrt(one_plus));

  const double theta = (branch % 2 == 0) ? branch * kPi + phase : (branch + 1) * kPi - phase;
  return theta / (4.0 * n * spec.a());
}

std::vector<double> band_extrema(const LatticeSpec& spec, double omega_max,
                                 const DispersionConfig& cfg) {
  std::vector<double> out{0.0};
  if (omega_max > 0.0) collect_extrema(spec, 0.0, omega_max, cfg, out);
  return out;
}

double dispersion_numeric(const LatticeSpec& spec, double k, int branch, const DispersionConfig& cfg) {
  const double L = spec.L();
  require(branch >= 0, "branch must be nonnegative");
  require(k >= -1e-12 / L && k <= kPi / L * (1.0 + 1e-12), "k must lie in [0, pi/L]");
  const double window = cfg.scan_window > 0.0 ? cfg.scan_window : (branch + 2) * kPi / L;

  const std::vector<double>& edges = cached_extrema(spec, window, cfg);
  if (static_cast<int>(edges.size()) < branch + 2) {
    throw NumericalError(ErrorCode::BracketNotFound,
                         "band " + std::to_string(branch) + " not contained in scan window [0, " +
                             std::to_string(window) + "]");
  }
  return root_in_band(spec, edges, branch, std::cos(k * L), cfg.tol);
}

GapInterval GapInterval::from_edges(double low, double high) {
  const double mid = 0.5 * (low + high);
  return {low, high, mid, (high - low) / mid};
}

std::vector<GapInterval> find_gaps(const LatticeSpec& spec, double omega_max, const DispersionConfig& cfg) {
  require(omega_max > 0.0, "omega_max must be positive");
  std::vector<double> ext = band_extrema(spec, omega_max, cfg);
  const double unit = kPi / spec.L();

  std::vector<GapInterval> gaps;
  constexpr double gap_threshold = 1e-12;
  double scanned = omega_max;
  for (std::size_t i = 1; i < ext.size(); ++i) {
    if (ext[i - 1] >= omega_max) break;
    const double peak = dispersion_rhs(spec, ext[i]);
    if (std::abs(peak) <= 1.0 + gap_threshold) continue;
    const double sign = peak > 0.0 ? 1.0 : -1.0;
    const auto edge_residual = [&](double w) { return dispersion_rhs(spec, w) - sign; };

    // The extremum closing this gap's upper side may lie past omega_max.
    while (i + 1 >= ext.size()) {
      const std::size_t before = ext.size();
      collect_extrema(spec, scanned, scanned + unit, cfg, ext);
      scanned += unit;
      if (ext.size() == before && scanned > omega_max + 64.0 * unit) {
        throw NumericalError(ErrorCode::BracketNotFound, "gap upper edge not found");
      }
    }
    const double low = num::brent_root(edge_residual, ext[i - 1], ext[i], cfg.tol);
    const double high = num::brent_root(edge_residual, ext[i], ext[i + 1], cfg.tol);
    if (low < omega_max) gaps.push_back(GapInterval::from_edges(low, high));
  }
  return gaps;
}

BandStructure compute_band_structure(const LatticeSpec& spec, int num_bands, int num_k,
                                     const DispersionConfig& cfg) {
  require(num_bands >= 1, "need at least one band");
  require(num_k >= 2, "need at least two k points");
  const double L = spec.L();
  const double window = cfg.scan_window > 0.0 ? cfg.scan_window : (num_bands + 1) * kPi / L;
  const std::vector<double> edges = band_extrema(spec, window, cfg);
  if (static_cast<int>(edges.size()) < num_bands + 1) {
    throw NumericalError(ErrorCode::BracketNotFound, "scan window holds fewer bands than requested");
  }

  BandStructure bs{spec, {}, {}};
  bs.k.resize(num_k);
  for (int i = 0; i < num_k; ++i) bs.k[i] = kPi / L * i / (num_k - 1);
  bs.bands.assign(num_bands, std::vector<double>(num_k));
  for (int m = 0; m < num_bands; ++m) {
    for (int i = 0; i < num_k; ++i) {
      bs.bands[m][i] = root_in_band(spec, edges, m, std::cos(bs.k[i] * L), cfg.tol);
    }
  }
  return bs;
}

}  // namespace bgq::lattice

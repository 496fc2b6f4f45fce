#include <algorithm>
#include <cmath>
#include <vector>

#include "bandgap_qed/dynamics.hpp"
#include "bandgap_qed/errors.hpp"
#include "doctest.h"

using namespace bgq;
using namespace bgq::dynamics;

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

std::vector<double> grid(double t0, double t1, std::size_t n) {
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n);
  return t;
}

double sup_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// Volterra samples at every `stride`-th step, for comparison on a coarser grid.
std::vector<cplx> every(const std::vector<cplx>& a, std::size_t stride) {
  std::vector<cplx> out;
  for (std::size_t i = 0; i < a.size(); i += stride) out.push_back(a[i]);
  return out;
}

struct Oracle {
  double delta_hat;
  cplx at_half, at_two, at_ten;
  double trapped, bound;
};

// 40-digit values: physical-sheet poles plus the branch-cut integral
// (tests/oracles/generate.py), independent of the erfc-based closed form.
const Oracle kOracles[] = {
    {-10.0, {0.978850352942635, 0.156615025480193}, {0.798631184723959, 0.571722358996375},
     {-0.983760143098409, 0.0263477541647066}, 0.97046947651839421, 0.98512409193887559},
    {-3.5, {0.885361229985807, 0.206226634337689}, {0.505057716684075, 0.773710001893671},
     {0.269052117545842, -0.898083260974628}, 0.88581314878892734, 0.94117647058823529},
    {-1.0, {0.830624067752795, 0.184620522103336}, {-0.0181520362245056, 0.831641035555168},
     {0.255930004135895, 0.788532706049519}, 0.67731447795526944, 0.82299117732529153},
    {0.0, {0.812512408402808, 0.167826614204373}, {-0.2786745410111, 0.469054310580339},
     {-0.565724644141701, -0.368788668626581}, 4.0 / 9.0, 2.0 / 3.0},
    {1.0, {0.798386113360484, 0.14753451246598}, {-0.16666642847397, 0.0177120447972682},
     {-0.191930704439981, 0.345446193993812}, 0.15093847231834752, 0.38850800804918748},
    {10.0, {0.848675718331224, 0.00440520024171343}, {0.535113710293247, 0.00536014320145718},
     {0.044021481781321, -0.00347446486512669}, 3.9603215776183805e-6, 0.001990055671989701},
};

const double kFigureDeltas[] = {-10.0, -3.5, -1.0, 0.0, 1.0, 10.0};

}  // namespace

TEST_CASE("trace container") {
  const DecayTrace t(Method::Analytic, 2.0, {0.0, 0.5, 1.0}, {1.0, cplx(0.0, 0.5), cplx(0.3, 0.4)});
  CHECK(t.beta_t(2) == 2.0);
  CHECK(t.population(1) == 0.25);
  CHECK(t.population() == std::vector<double>{1.0, 0.25, std::norm(cplx(0.3, 0.4))});
  CHECK(code_of([] { DecayTrace(Method::Analytic, 1.0, {0.0, 0.0}, {1.0, 1.0}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { DecayTrace(Method::Analytic, 1.0, {0.0}, {1.0, 1.0}); }) == ErrorCode::InvalidArgument);
  CHECK(to_string(Method::WeisskopfWigner) == "weisskopf_wigner");
  CHECK(to_string(Method::Talbot) == "talbot");
}

TEST_CASE("Weisskopf-Wigner decay") {
  const auto t = grid(0.0, 5.0, 50);
  for (double p : ww_decay(0.0, t).population()) CHECK(p == 1.0);
  const auto w = ww_decay(1.0, std::vector<double>{0.0, std::log(2.0), 1.0});
  CHECK(w.population(0) == 1.0);
  CHECK(w.population(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w.population(2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(ww_decay(3.0, std::vector<double>{std::log(2.0) / 3.0}).population(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w.method() == Method::WeisskopfWigner);
}

TEST_CASE("dressed roots") {
  const RootSet r0 = dressed_roots(0.0);
  CHECK(std::abs(r0.x[0] * r0.x[0] - cplx(0.0, 1.0)) <= 1e-12);
  CHECK(std::abs(r0.x[0] - std::polar(1.0, kPi / 4.0)) <= 1e-12);
  CHECK(std::abs(r0.x[1] - std::polar(1.0, -5.0 * kPi / 12.0)) <= 1e-12);
  CHECK(std::abs(r0.x[2] - std::polar(1.0, 11.0 * kPi / 12.0)) <= 1e-12);
  CHECK(std::abs(r0.x[0] + r0.x[1] + r0.x[2]) <= 1e-12);

  for (double d : {-10.0, -3.5, -1.0, 0.0, 0.37, 1.0, 10.0, 100.0, -1000.0}) {
    const RootSet r = dressed_roots(d);
    const cplx c0 = -std::polar(1.0, 3.0 * kPi / 4.0);
    for (int j = 0; j < 3; ++j) {
      const cplx x = r.x[j];
      CHECK(std::abs(x * x * x + cplx(0.0, d) * x + c0) <= 1e-10 * std::max(1.0, std::pow(std::abs(x), 3)));
      const int i = (j + 1) % 3, k = (j + 2) % 3;
      CHECK(std::abs(r.b[j] - x / ((x - r.x[i]) * (x - r.x[k]))) <= 1e-14 * std::abs(r.b[j]));
      CHECK(std::abs(r.y[j] * r.y[j] - x * x) <= 1e-12 * std::norm(x));
      CHECK(r.y[j].real() >= 0.0);
    }
    // The three terms reassemble a(0) = 1 only when the labels are consistent.
    CHECK(std::abs(a2_analytic_at(r, 0.0) - 1.0) <= 1e-8);
  }
}

TEST_CASE("closed form against the mpmath oracle") {
  for (const Oracle& o : kOracles) {
    const auto em = bandedge::EmitterSpec::from_coupling(1.0, o.delta_hat);
    const auto tr = a2_analytic(em, std::vector<double>{0.0, 0.5, 2.0, 10.0});
    CHECK(std::abs(tr.amplitude()[0] - 1.0) <= 1e-12);
    CHECK(std::abs(tr.amplitude()[1] - o.at_half) <= 1e-10);
    CHECK(std::abs(tr.amplitude()[2] - o.at_two) <= 1e-10);
    CHECK(std::abs(tr.amplitude()[3] - o.at_ten) <= 1e-10);
    CHECK(trapped_fraction(em) == doctest::Approx(o.trapped).epsilon(1e-10));
  }
  // Time scaling: beta enters only through beta t.
  const auto em2 = bandedge::EmitterSpec::from_coupling(4.0, 4.0 * -3.5);
  CHECK(std::abs(a2_analytic(em2, std::vector<double>{0.5}).amplitude()[0] - kOracles[1].at_two) <= 1e-10);
}

TEST_CASE("closed form normalization") {
  for (double d : kFigureDeltas) {
    const auto em = bandedge::EmitterSpec::from_coupling(1.0, d);
    for (double p : a2_analytic(em, grid(0.0, 50.0, 2000)).population()) CHECK(p <= 1.0 + 1e-6);
  }
}

TEST_CASE("asymptotic form") {
  for (double d : {-1.0, 0.0, 1.0}) {
    const auto em = bandedge::EmitterSpec::from_coupling(1.0, d);
    const std::vector<double> t{50.0};
    const cplx exact = a2_analytic(em, t).amplitude()[0];
    CHECK(std::abs(a2_asymptotic(em, t).amplitude()[0] - exact) <= 0.01 * std::abs(exact));
  }

  // Branch-cut residual: closed form minus the two dressed exponentials.
  const auto em0 = bandedge::EmitterSpec::from_coupling(1.0, 0.0);
  const RootSet r = dressed_roots(0.0);
  const cplx C = branch_tail_coefficient(r);
  std::vector<double> lx, ly;
  for (double t : {50.0, 100.0, 200.0, 350.0, 500.0}) {
    const std::vector<double> tt{t};
    const cplx tail = C / (t * std::sqrt(t));
    const cplx residual = a2_analytic(em0, tt).amplitude()[0] - (a2_asymptotic(em0, tt).amplitude()[0] - tail);
    lx.push_back(std::log(t));
    ly.push_back(std::log(std::abs(residual)));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / lx.size(), my += ly[i] / ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
  const double slope = sxy / sxx;
  CHECK(slope >= -1.55);
  CHECK(slope <= -1.45);

  // Deep in the gap the bound-state term dominates.
  const RootSet deep = dressed_roots(-10.0);
  const double bound = std::abs(2.0 * deep.b[0] * deep.x[0]);
  const double decaying = std::abs(deep.b[1] * (deep.x[1] + deep.y[1])) * std::exp((deep.x[1] * deep.x[1]).real() * 50.0);
  CHECK(bound > 100.0 * decaying);
  CHECK(bound > 100.0 * std::abs(branch_tail_coefficient(deep)) / std::pow(50.0, 1.5));

  CHECK(code_of([&] { a2_asymptotic(em0, std::vector<double>{5.0, 20.0}); }) == ErrorCode::TooEarly);
  CHECK_NOTHROW(a2_asymptotic(em0, std::vector<double>{5.0}, 1.0));
}

TEST_CASE("Volterra solver") {
  VolterraOptions off;
  off.coupling_scale = 0.0;
  const auto flat = volterra_solve(bandedge::EmitterSpec::from_coupling(1.0, 2.0), 3.0, 0.01, off);
  for (const cplx& a : flat.amplitude()) CHECK(a == cplx(1.0, 0.0));

  const auto em = bandedge::EmitterSpec::from_coupling(1.0, 0.0);
  const auto v = volterra_solve(em, 10.0, 1e-3);
  REQUIRE(v.error_estimate.has_value());
  CHECK(*v.error_estimate <= 1e-4);
  CHECK(v.amplitude()[0] == cplx(1.0, 0.0));
  CHECK(v.size() == 10001);
  const auto exact = a2_analytic(em, v.times());
  CHECK(sup_diff(v.amplitude(), exact.amplitude()) <= 1e-3);

  VolterraOptions tight;
  tight.tolerance = 1e-9;
  CHECK(code_of([&] { volterra_solve(em, 2.0, 0.05, tight); }) == ErrorCode::StepTooCoarse);
  CHECK(code_of([&] { volterra_solve(em, 2.0, 0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { volterra_solve(em, 1e8, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Volterra convergence order") {
  const auto em = bandedge::EmitterSpec::from_coupling(1.0, -1.0);
  VolterraOptions quick;
  quick.estimate_error = false;
  const double tmax = 5.0;
  const std::vector<double> dts{0.04, 0.02, 0.01};
  std::vector<double> errs;
  for (double dt : dts) {
    const auto coarse = volterra_solve(em, tmax, dt, quick);
    const auto ref = volterra_solve(em, tmax, dt / 8.0, quick);
    errs.push_back(sup_diff(coarse.amplitude(), every(ref.amplitude(), 8)));
  }
  const double slope = std::log(errs[0] / errs[2]) / std::log(dts[0] / dts[2]);
  CHECK(slope >= 1.7);
  CHECK(slope <= 2.3);
}

TEST_CASE("Laplace transform") {
  for (double d : {-3.5, 0.0, 1.0}) {
    const auto em = bandedge::EmitterSpec::from_coupling(1.0, d);
    for (double s : {1e4, 1e6, 1e8}) CHECK(std::abs(s * a2_laplace(em, s) - 1.0) <= 5.0 / std::sqrt(s));

    // Quadrature of the closed form over beta t in [0, 200] at s = 1.
    const std::size_t n = 20000;
    const auto t = grid(0.0, 200.0, n);
    const auto a = a2_analytic(em, t).amplitude();
    cplx sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += 0.5 * (t[i + 1] - t[i]) * (a[i] * std::exp(-t[i]) + a[i + 1] * std::exp(-t[i + 1]));
    }
    CHECK(std::abs(sum - a2_laplace(em, 1.0)) <= 1e-4);

    // Physical poles: y_j = x_j puts s = x_j^2 + i d on the principal sheet.
    const RootSet r = dressed_roots(d);
    for (int j = 0; j < 3; ++j) {
      const cplx s = r.x[j] * r.x[j] + cplx(0.0, d);
      const cplx D = s * num::principal_sqrt(s - cplx(0.0, d)) - std::polar(1.0, 3.0 * kPi / 4.0);
      if (std::abs(r.y[j] - r.x[j]) <= 1e-12) {
        CHECK(std::abs(D) <= 1e-12);
        CHECK(std::abs(a2_laplace(em, s + 1e-7)) > 1e5);
      } else {
        CHECK(std::abs(D) > 1e-3);
      }
    }
    CHECK(code_of([&] { a2_laplace(em, cplx(-1.0, d)); }) == ErrorCode::OnSingularity);
  }
}

TEST_CASE("Talbot inversion") {
  const auto em1 = bandedge::EmitterSpec::from_coupling(1.0, 1.0);
  const std::vector<double> one{1.0};
  CHECK(std::abs(a2_talbot(em1, one).amplitude()[0] - a2_analytic(em1, one).amplitude()[0]) <= 1e-5);

  const auto em0 = bandedge::EmitterSpec::from_coupling(1.0, 0.0);
  const auto v = volterra_solve(em0, 5.0, 1e-3);
  const std::vector<double> five{5.0};
  CHECK(std::abs(a2_talbot(em0, five).amplitude()[0] - v.amplitude().back()) <= 1e-3);

  const auto early = a2_talbot(em0, std::vector<double>{0.0, 1e-6, 1e-4});
  CHECK(early.amplitude()[0] == cplx(1.0, 0.0));
  CHECK(std::abs(early.amplitude()[1] - 1.0) <= 1e-3);
  CHECK(std::abs(early.amplitude()[2] - 1.0) <= 1e-2);

  for (const Oracle& o : kOracles) {
    const auto em = bandedge::EmitterSpec::from_coupling(1.0, o.delta_hat);
    const auto tr = a2_talbot(em, std::vector<double>{0.5, 2.0, 10.0});
    CHECK(std::abs(tr.amplitude()[0] - o.at_half) <= 1e-6);
    CHECK(std::abs(tr.amplitude()[1] - o.at_two) <= 1e-6);
    CHECK(std::abs(tr.amplitude()[2] - o.at_ten) <= 1e-6);
  }

  TalbotOptions starved;
  starved.nodes = 8;
  starved.tolerance = 1e-14;
  CHECK(code_of([&] { a2_talbot(em0, std::vector<double>{3.0}, starved); }) == ErrorCode::ContourFailure);
  starved.nodes = 4;
  CHECK(code_of([&] { a2_talbot(em0, std::vector<double>{3.0}, starved); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("three independent solvers agree") {
  const auto t = grid(0.0, 10.0, 1000);
  for (double d : kFigureDeltas) {
    const auto em = bandedge::EmitterSpec::from_coupling(1.0, d);
    const auto an = a2_analytic(em, t).amplitude();
    const auto vo = every(volterra_solve(em, 10.0, 1e-3).amplitude(), 10);
    std::vector<double> tt(t.begin() + 1, t.end());
    auto ta = a2_talbot(em, tt).amplitude();
    ta.insert(ta.begin(), 1.0);
    CHECK(sup_diff(an, vo) <= 1e-3);
    CHECK(sup_diff(an, ta) <= 1e-3);
    CHECK(sup_diff(vo, ta) <= 1e-3);
    for (const cplx& a : vo) CHECK(std::norm(a) <= 1.0 + 1e-6);
  }
}

TEST_CASE("trapped fraction") {
  double last = 2.0;
  for (int i = 0; i <= 40; ++i) {
    const double d = -10.0 + 0.5 * i;
    const double f = trapped_fraction(bandedge::EmitterSpec::from_coupling(1.0, d));
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(f <= last);
    last = f;
  }
  // The bound state never disappears in this model; far above the edge it is tiny but finite.
  const double above = trapped_fraction(bandedge::EmitterSpec::from_coupling(1.0, 10.0));
  CHECK(above > 0.0);
  CHECK(above <= 1e-5);

  const auto em = bandedge::EmitterSpec::from_coupling(1.0, -10.0);
  VolterraOptions quick;
  quick.estimate_error = false;
  const auto long_run = volterra_solve(em, 200.0, 5e-3, quick);
  CHECK(std::abs(long_run.population(long_run.size() - 1) - trapped_fraction(em)) <= 0.02);
}

TEST_CASE("emission spectrum") {
  std::vector<double> t = grid(0.0, 1.0, 1000);
  for (double x : grid(1.0, 200.0, 19900)) {
    if (x > t.back()) t.push_back(x);
  }
  const auto dk = grid(-15.0, 30.0, 450);

  for (const Oracle& o : kOracles) {
    if (o.delta_hat == -10.0 || o.delta_hat == -3.5) continue;
    const auto em = bandedge::EmitterSpec::from_coupling(1.0, o.delta_hat);
    const auto trace = a2_analytic(em, t);
    const auto spec = emission_spectrum(trace, em, dk);
    CHECK(spec.bound_weight == doctest::Approx(o.bound).epsilon(1e-9));
    for (std::size_t i = 0; i < dk.size(); ++i) {
      CHECK(spec.density[i] >= 0.0);
      // The band edge sits at delta_k = -detuning_hat.
      if (dk[i] < -o.delta_hat) CHECK(spec.density[i] == 0.0);
    }
    CHECK(std::abs(spectral_weight(trace, em) + spec.bound_weight - 1.0) <= 0.02);
  }

  const auto em = bandedge::EmitterSpec::from_coupling(1.0, 0.0);
  const auto short_trace = a2_analytic(em, grid(0.0, 50.0, 500));
  CHECK(code_of([&] { emission_spectrum(short_trace, em, dk); }) == ErrorCode::TraceTooShort);
  const auto talbot = a2_talbot(em, grid(1.0, 150.0, 10));
  CHECK(code_of([&] { emission_spectrum(talbot, em, dk); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Markovian and non-Markovian regimes") {
  // Far above the edge: log P over beta t in [2, 8] is close to a straight line.
  const auto em_up = bandedge::EmitterSpec::from_coupling(1.0, 10.0);
  const auto t = grid(2.0, 8.0, 600);
  const auto p = a2_analytic(em_up, t).population();
  double mx = 0, my = 0;
  const double n = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) mx += t[i] / n, my += std::log(p[i]) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < t.size(); ++i) sxy += (t[i] - mx) * (std::log(p[i]) - my), sxx += (t[i] - mx) * (t[i] - mx);
  const double rate = -sxy / sxx;
  CHECK(rate > 0.0);
  double rms = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double fit = std::exp(my - rate * (t[i] - mx));
    rms += (fit / p[i] - 1.0) * (fit / p[i] - 1.0) / n;
  }
  CHECK(std::sqrt(rms) < 0.10);

  // At the edge no exponential A e^{-g t} comes within 5% RMS of the Volterra population.
  const auto em0 = bandedge::EmitterSpec::from_coupling(1.0, 0.0);
  const auto v = volterra_solve(em0, 10.0, 1e-3);
  const auto pv_full = v.population();
  std::vector<double> pv, tv;
  for (std::size_t i = 0; i < pv_full.size(); i += 10) pv.push_back(pv_full[i]), tv.push_back(v.beta_t(i));
  double norm = 0;
  for (double q : pv) norm += q * q;
  double best = 1e300;
  for (int k = 0; k <= 2000; ++k) {
    const double g = 2.0 * k / 2000.0;
    double se = 0, ee = 0;
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double e = std::exp(-g * tv[i]);
      se += pv[i] * e;
      ee += e * e;
    }
    const double A = se / ee;
    double res = 0;
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double r = pv[i] - A * std::exp(-g * tv[i]);
      res += r * r;
    }
    best = std::min(best, std::sqrt(res / norm));
  }
  CHECK(best > 0.05);
}

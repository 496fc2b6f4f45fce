#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "bandgap_qed/errors.hpp"
#include "bandgap_qed/numerics.hpp"

namespace bgq::num {
namespace {

GaussRule build_rule(int order) {
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

// (int_0^1 e^{i theta s} ds, int_0^1 s e^{i theta s} ds)
std::pair<cplx, cplx> linear_moments(double theta) {
  const cplx it(0.0, theta);
  if (std::abs(theta) < 0.25) {
    cplx e0 = 0.0, e1 = 0.0, pw = 1.0;
    double fact = 1.0;
    for (int k = 0; k < 14; ++k) {
      if (k > 0) {
        pw *= it;
        fact *= k;
      }
      e0 += pw / (fact * (k + 1));
      e1 += pw / (fact * (k + 2));
    }
    return {e0, e1};
  }
  const cplx e = std::exp(it);
  const cplx e0 = (e - 1.0) / it;
  const cplx e1 = e / it - (e - 1.0) / (it * it);
  return {e0, e1};
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw NumericalError(ErrorCode::InvalidArgument, "gauss_legendre: order < 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(order));
  return *slot;
}

cplx filon_linear(std::span<const double> t, std::span<const cplx> f, double w) {
  if (t.size() != f.size()) {
    throw NumericalError(ErrorCode::InvalidArgument, "filon_linear: size mismatch");
  }
  cplx sum = 0.0;
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    const double h = t[j + 1] - t[j];
    const auto [e0, e1] = linear_moments(w * h);
    sum += std::polar(h, w * t[j]) * (f[j] * e0 + (f[j + 1] - f[j]) * e1);
  }
  return sum;
}

}  // namespace bgq::num

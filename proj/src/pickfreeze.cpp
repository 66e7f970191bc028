#include "sobol_eff/pickfreeze.hpp"

#include <cmath>
#include <string>
#include <tuple>

namespace sobol_eff {

PickFreezeSample::PickFreezeSample(std::vector<double> y, std::vector<double> y_pf)
    : y_(std::move(y)), y_pf_(std::move(y_pf)) {
  if (y_.size() != y_pf_.size()) {
    throw InvalidArgument("y and y_pf must have equal length (" +
                          std::to_string(y_.size()) + " vs " +
                          std::to_string(y_pf_.size()) + ")");
  }
  if (y_.size() < 2) {
    throw InvalidArgument("a Pick-Freeze sample needs at least 2 pairs");
  }
  for (std::size_t i = 0; i < y_.size(); ++i) {
    if (!std::isfinite(y_[i]) || !std::isfinite(y_pf_[i])) {
      throw InvalidArgument("non-finite value in pair " + std::to_string(i));
    }
  }
}

MomentVector empirical_moments_pf(const PickFreezeSample& s) {
  const auto y = s.y();
  const auto z = s.y_pf();
  const std::size_t n = s.size();
  std::vector<double> cross(n), half_sum(n), half_sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    cross[i] = y[i] * z[i];
    half_sum[i] = 0.5 * (y[i] + z[i]);
    half_sq[i] = 0.5 * (y[i] * y[i] + z[i] * z[i]);
  }
  return {pairwise_mean(cross), pairwise_mean(half_sum), pairwise_mean(half_sq)};
}

PfInfluenceTriple pf_influence_triple(double y1, double y2, const MomentVector& m) {
  return {y1 * y2 - m.psi, 0.5 * (y1 + y2) - m.mu, 0.5 * (y1 * y1 + y2 * y2) - m.m2};
}

namespace {

double combine(const std::array<double, 3>& g, const PfInfluenceTriple& t) {
  return g[0] * t.if_psi + g[1] * t.if_mu + g[2] * t.if_m2;
}

}  // namespace

double pf_sobol_influence(double y1, double y2, const MomentVector& m) {
  return combine(phi_gradient(m), pf_influence_triple(y1, y2, m));
}

std::vector<double> pf_sobol_influence_values(const PickFreezeSample& s,
                                              const MomentVector& m) {
  const auto g = phi_gradient(m);
  const auto y = s.y();
  const auto z = s.y_pf();
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = combine(g, pf_influence_triple(y[i], z[i], m));
  }
  return out;
}

SobolEstimate estimate_sobol_pf(const PickFreezeSample& s, const ConfidenceConfig& cfg) {
  cfg.validate();
  const MomentVector m = empirical_moments_pf(s);
  SobolEstimate est;
  est.point = sobol_from_moments(m);
  auto infl = pf_sobol_influence_values(s, m);
  for (double& v : infl) v *= v;
  est.asym_variance = pairwise_mean(infl);
  est.n = s.size();
  est.level = cfg.level;
  est.method = Method::pick_freeze;
  std::tie(est.ci_low, est.ci_high) = wald_interval(est.point, est.asym_variance, est.n, cfg);
  return est;
}

}  // namespace sobol_eff

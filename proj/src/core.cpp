#include "sobol_eff/core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace sobol_eff {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::pick_freeze:
      return "pick_freeze";
    case Method::given_data_onestep:
      return "given_data_onestep";
    case Method::given_data_rank:
      return "given_data_rank";
  }
  return "unknown";
}

void ConfidenceConfig::validate() const {
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidLevel("confidence level must lie strictly inside (0, 1), got " +
                       std::to_string(level));
  }
}

namespace {

double checked_variance(const MomentVector& m) {
  const double var = m.variance();
  if (!(var > kDegenerateVarianceEps)) {
    throw DegenerateVariance("output variance m2 - mu^2 = " + std::to_string(var) +
                             " is not above the degeneracy threshold");
  }
  return var;
}

}  // namespace

double sobol_from_moments(const MomentVector& m) {
  const double var = checked_variance(m);
  return (m.psi - m.mu * m.mu) / var;
}

std::array<double, 3> phi_gradient(const MomentVector& m) {
  const double var = checked_variance(m);
  const double var2 = var * var;
  return {1.0 / var, 2.0 * m.mu * (m.psi - m.m2) / var2,
          -(m.psi - m.mu * m.mu) / var2};
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement; the upper tail is refined by symmetry so the residual
  // is taken against the smaller tail probability.
  const bool upper = x > 0.0;
  const double t = upper ? -x : x;
  const double tail = upper ? 1.0 - p : p;
  const double e = 0.5 * std::erfc(-t / std::numbers::sqrt2) - tail;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * t * t);
  const double refined = t - u / (1.0 + 0.5 * t * u);
  return upper ? -refined : refined;
}

std::pair<double, double> wald_interval(double point, double asym_variance,
                                        std::size_t n,
                                        const ConfidenceConfig& cfg) {
  cfg.validate();
  if (!(asym_variance >= 0.0)) {
    throw InvalidArgument("asymptotic variance must be non-negative");
  }
  if (n < 1) throw InvalidArgument("sample size must be at least 1");
  const double z = normal_quantile(0.5 * (1.0 + cfg.level));
  const double half = z * std::sqrt(asym_variance / static_cast<double>(n));
  return {point - half, point + half};
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 32;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double pairwise_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return pairwise_sum(values) / static_cast<double>(values.size());
}

}  // namespace sobol_eff

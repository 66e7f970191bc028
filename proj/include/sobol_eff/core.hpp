#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <utility>

#include "sobol_eff/errors.hpp"

namespace sobol_eff {

/// Var(Y) at or below this value (raw Y^2 units) is treated as a constant output.
inline constexpr double kDegenerateVarianceEps = 1e-12;

/// The parameter triple (psi, mu, m2) = (E[E[Y|X]^2], E[Y], E[Y^2]).
struct MomentVector {
  double psi = 0.0;
  double mu = 0.0;
  double m2 = 0.0;

  double variance() const { return m2 - mu * mu; }
};

enum class Method { pick_freeze, given_data_onestep, given_data_rank };

std::string_view to_string(Method method);

struct ConfidenceConfig {
  double level = 0.95;

  /// Throws InvalidLevel unless 0 < level < 1.
  void validate() const;
};

struct SobolEstimate {
  double point = 0.0;
  /// Variance of sqrt(n) * (estimate - truth), plug-in.
  double asym_variance = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  std::size_t n = 0;
  Method method = Method::pick_freeze;
};

/// phi(psi, mu, m2) = (psi - mu^2) / (m2 - mu^2). Not clamped to [0, 1].
double sobol_from_moments(const MomentVector& m);

/// Gradient of phi with respect to (psi, mu, m2).
std::array<double, 3> phi_gradient(const MomentVector& m);

/// Standard normal quantile. Acklam's rational approximation followed by
/// one Halley step against erfc; absolute error well below 1e-12 on (0, 1).
double normal_quantile(double p);

/// point +/- z_{(1+level)/2} * sqrt(asym_variance / n).
std::pair<double, double> wald_interval(double point, double asym_variance,
                                        std::size_t n,
                                        const ConfidenceConfig& cfg);

/// Pairwise summation; error grows as O(log n) instead of O(n).
double pairwise_sum(std::span<const double> values);

double pairwise_mean(std::span<const double> values);

}  // namespace sobol_eff

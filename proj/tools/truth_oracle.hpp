#pragma once

// Brute-force Monte Carlo oracle for the analytic truths of the Ishigami and
// g-function models. Deliberately self-contained: its own model code, its own
// generator (std::mt19937_64), no dependency on the sobol_eff library.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace truth_oracle {

struct OracleResult {
  double psi = 0.0;  // E[E[Y|X]^2]
  double mu = 0.0;   // E[Y]
  double m2 = 0.0;   // E[Y^2]
  double s = 0.0;    // first-order index of X
  double se_psi = 0.0;
  double se_mu = 0.0;
  double se_m2 = 0.0;
  double se_s = 0.0;
  std::size_t draws = 0;
};

namespace detail {

// Streaming means of y, y^2 and y*y' (y' shares X, independent noise), plus
// the second moments needed for delta-method standard errors.
struct Accumulator {
  long double sum[3] = {0, 0, 0};
  long double cross[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  std::size_t n = 0;

  void add(double y, double y_frozen) {
    const long double v[3] = {static_cast<long double>(y) * y_frozen, y,
                              static_cast<long double>(y) * y};
    for (int a = 0; a < 3; ++a) {
      sum[a] += v[a];
      for (int b = 0; b < 3; ++b) cross[a][b] += v[a] * v[b];
    }
    ++n;
  }

  OracleResult finish() const {
    OracleResult r;
    r.draws = n;
    const long double nn = static_cast<long double>(n);
    long double mean[3], cov[3][3];
    for (int a = 0; a < 3; ++a) mean[a] = sum[a] / nn;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) cov[a][b] = cross[a][b] / nn - mean[a] * mean[b];
    }
    r.psi = static_cast<double>(mean[0]);
    r.mu = static_cast<double>(mean[1]);
    r.m2 = static_cast<double>(mean[2]);
    r.se_psi = static_cast<double>(std::sqrt(cov[0][0] / nn));
    r.se_mu = static_cast<double>(std::sqrt(cov[1][1] / nn));
    r.se_m2 = static_cast<double>(std::sqrt(cov[2][2] / nn));
    const long double var = mean[2] - mean[1] * mean[1];
    const long double num = mean[0] - mean[1] * mean[1];
    r.s = static_cast<double>(num / var);
    // Gradient of (psi - mu^2) / (m2 - mu^2) with respect to (psi, mu, m2).
    const long double g[3] = {1.0L / var, 2.0L * mean[1] * (mean[0] - mean[2]) / (var * var),
                              -num / (var * var)};
    long double v = 0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) v += g[a] * cov[a][b] * g[b];
    }
    r.se_s = static_cast<double>(std::sqrt(v / nn));
    return r;
  }
};

}  // namespace detail

/// Ishigami: Y = sin V1 + a sin^2 V2 + b V3^4 sin V1, V ~ U(-pi, pi)^3, X = V1.
inline OracleResult ishigami(std::size_t draws, std::uint64_t seed, double a = 7.0,
                             double b = 0.1) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  const auto f = [a, b](double v1, double v2, double v3) {
    return std::sin(v1) + a * std::pow(std::sin(v2), 2) + b * std::pow(v3, 4) * std::sin(v1);
  };
  detail::Accumulator acc;
  for (std::size_t i = 0; i < draws; ++i) {
    const double v1 = u(gen);
    const double y = f(v1, u(gen), u(gen));
    const double y_frozen = f(v1, u(gen), u(gen));
    acc.add(y, y_frozen);
  }
  return acc.finish();
}

/// Sobol' g-function: Y = prod_j (|4 V_j - 2| + c_j) / (1 + c_j), V ~ U(0,1)^p, X = V1.
inline OracleResult g_function(std::size_t draws, std::uint64_t seed,
                               const std::vector<double>& c) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  detail::Accumulator acc;
  for (std::size_t i = 0; i < draws; ++i) {
    const double v1 = u(gen);
    const double first = (std::abs(4.0 * v1 - 2.0) + c[0]) / (1.0 + c[0]);
    double y = first;
    double y_frozen = first;
    for (std::size_t j = 1; j < c.size(); ++j) {
      y *= (std::abs(4.0 * u(gen) - 2.0) + c[j]) / (1.0 + c[j]);
      y_frozen *= (std::abs(4.0 * u(gen) - 2.0) + c[j]) / (1.0 + c[j]);
    }
    acc.add(y, y_frozen);
  }
  return acc.finish();
}

}  // namespace truth_oracle

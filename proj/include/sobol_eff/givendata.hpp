#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sobol_eff/core.hpp"

namespace sobol_eff {

/// Evaluation map R^d -> R, e.g. a conditional mean x -> E[Y | X = x].
using PointFunction = std::function<double(std::span<const double>)>;

/// i.i.d. rows (X_i, Y_i) with X_i in R^d, stored row-major.
class GivenDataSample {
 public:
  /// Throws InvalidArgument on shape mismatch, d == 0, n < 2 or non-finite
  /// entries. The stricter n >= 4 contract of the estimators is checked by
  /// the estimators themselves.
  GivenDataSample(std::vector<double> x_row_major, std::size_t d, std::vector<double> y);

  std::size_t size() const { return y_.size(); }
  std::size_t dim() const { return d_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(x_).subspan(i * d_, d_);
  }
  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }

  GivenDataSample subset(std::span<const std::size_t> rows) const;

 private:
  std::vector<double> x_;
  std::size_t d_;
  std::vector<double> y_;
};

/// Nearest-neighbor search on standardized coordinates.
///
/// Coordinate differences are divided by the column's sample standard
/// deviation (columns with zero spread are left unscaled). Differences are
/// taken on raw values first, so equal raw gaps give exactly equal distances.
/// Distance ties are broken toward the smaller row index. d == 1 uses a
/// sorted index; d > 1 scans.
class NeighborIndex {
 public:
  explicit NeighborIndex(const GivenDataSample& s);

  /// Row indices of the k nearest training rows to `point` (raw coordinates),
  /// ordered by (distance, index). `exclude` removes one row from the search.
  std::vector<std::size_t> nearest(std::span<const double> point, std::size_t k,
                                   std::optional<std::size_t> exclude = {}) const;

  std::size_t size() const { return n_; }

 private:
  std::vector<std::size_t> nearest_1d(double q, std::size_t k,
                                      std::optional<std::size_t> exclude) const;
  std::vector<std::size_t> nearest_scan(std::span<const double> q, std::size_t k,
                                        std::optional<std::size_t> exclude) const;

  std::size_t n_;
  std::size_t d_;
  std::vector<double> scale_;
  std::vector<double> x_;  // raw rows, row-major
  // d == 1 only: values and row ids sorted by (value, row).
  std::vector<double> sorted_x_;
  std::vector<std::size_t> sorted_row_;
};

enum class RegressionMethod { knn, exact_oracle };

/// A fitted conditional mean m-hat.
class RegressionFit {
 public:
  static RegressionFit oracle(PointFunction m);

  double operator()(std::span<const double> x) const;
  RegressionMethod method() const { return method_; }
  /// Neighbor count; 0 for oracle fits.
  std::size_t k() const { return k_; }

 private:
  friend RegressionFit fit_knn(const GivenDataSample& s, std::size_t k);
  RegressionFit() = default;

  RegressionMethod method_ = RegressionMethod::knn;
  std::size_t k_ = 0;
  std::shared_ptr<const NeighborIndex> index_;
  std::vector<double> y_;
  PointFunction oracle_;
};

/// k-nearest-neighbor average of y. Throws InvalidK unless 1 <= k <= n.
RegressionFit fit_knn(const GivenDataSample& s, std::size_t k);

enum class GdRegression { knn, rank_pairing };

struct GdEstimatorConfig {
  /// knn: cross-fitted one-step estimator of psi. rank_pairing: psi from
  /// nearest-neighbor pairing, with the cross-fitted kNN fit still used for
  /// the variance.
  GdRegression regression = GdRegression::knn;
  /// Neighbor count; unset selects the default rule, see `resolve_k`.
  std::optional<std::size_t> k;
  std::size_t folds = 2;
  /// Seed of the shuffle that assigns rows to folds.
  std::uint64_t seed = 0;
  /// When set, replaces the cross-fitted kNN predictions by this exact
  /// conditional mean (no fitting, no folds).
  PointFunction oracle;

  /// Neighbor count for a sample of n rows in dimension d.
  /// Default: max(2, round(n^0.6)) for d = 1, max(2, round(n^(4/(4+d)))) for
  /// d > 1, lowered if needed so that k < n / folds.
  /// Throws InvalidK when an explicit k violates 1 <= k < n / folds.
  std::size_t resolve_k(std::size_t n, std::size_t d) const;

  /// Throws InvalidArgument for folds < 2, InsufficientData for n < 2 * folds.
  void validate(std::size_t n) const;
};

/// (1/n) sum m-hat(X_i)^2.
double psi_plugin(const GivenDataSample& s, const RegressionFit& fit);

/// (2y - m(x)) m(x) - psi: the efficient influence value of
/// psi = E[E[Y|X]^2] at one observation, given m(x).
double gd_influence(double y, double m_value, double psi);

/// Out-of-fold predictions m-hat_{-}(X_i): each fold is predicted by a kNN
/// fit on the remaining folds. Uses the oracle instead when one is set.
std::vector<double> cross_fitted_predictions(const GivenDataSample& s,
                                             const GdEstimatorConfig& cfg);

/// psi-hat = (1/n) sum (2 Y_i - m-hat_{-}(X_i)) m-hat_{-}(X_i).
double psi_onestep(const GivenDataSample& s, const GdEstimatorConfig& cfg);

/// psi-hat = (1/n) sum Y_i Y_{N(i)}.
///
/// For d = 1 neighbors are taken in rank order: N(i) is the rank-adjacent
/// row, choosing the smaller row index when both sides exist, so the value
/// depends on x only through its ordering. For d > 1, N(i) is the nearest
/// other row in standardized Euclidean distance, ties toward smaller index.
double psi_rank_pairing(const GivenDataSample& s);

/// Rank/nearest neighbor map N used by `psi_rank_pairing`.
std::vector<std::size_t> rank_pairing_neighbors(const GivenDataSample& s);

struct GdEstimateDetail {
  SobolEstimate estimate;
  MomentVector moments;
  std::size_t k_used = 0;
  std::size_t folds = 0;
  /// Combined influence value of S^X at each row.
  std::vector<double> influence;
};

GdEstimateDetail estimate_sobol_gd_detailed(const GivenDataSample& s,
                                            const GdEstimatorConfig& cfg,
                                            const ConfidenceConfig& ccfg = {});

SobolEstimate estimate_sobol_gd(const GivenDataSample& s, const GdEstimatorConfig& cfg,
                                const ConfidenceConfig& ccfg = {});

}  // namespace sobol_eff

#include "sobol_eff/givendata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "sobol_eff/rng.hpp"

namespace sobol_eff {

GivenDataSample::GivenDataSample(std::vector<double> x_row_major, std::size_t d,
                                 std::vector<double> y)
    : x_(std::move(x_row_major)), d_(d), y_(std::move(y)) {
  if (d_ == 0) throw InvalidArgument("input dimension d must be at least 1");
  if (x_.size() != y_.size() * d_) {
    throw InvalidArgument("x holds " + std::to_string(x_.size()) +
                          " values, expected n * d = " + std::to_string(y_.size() * d_));
  }
  if (y_.size() < 2) throw InvalidArgument("a given-data sample needs at least 2 rows");
  for (std::size_t i = 0; i < y_.size(); ++i) {
    bool finite = std::isfinite(y_[i]);
    for (double v : row(i)) finite = finite && std::isfinite(v);
    if (!finite) throw InvalidArgument("non-finite value in row " + std::to_string(i));
  }
}

GivenDataSample GivenDataSample::subset(std::span<const std::size_t> rows) const {
  std::vector<double> x;
  std::vector<double> y;
  x.reserve(rows.size() * d_);
  y.reserve(rows.size());
  for (std::size_t r : rows) {
    const auto xr = row(r);
    x.insert(x.end(), xr.begin(), xr.end());
    y.push_back(y_[r]);
  }
  return GivenDataSample(std::move(x), d_, std::move(y));
}

// ---------------------------------------------------------------------------
// NeighborIndex

NeighborIndex::NeighborIndex(const GivenDataSample& s)
    : n_(s.size()), d_(s.dim()), scale_(d_, 1.0), x_(s.x().begin(), s.x().end()) {
  std::vector<double> col(n_);
  for (std::size_t j = 0; j < d_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) col[i] = s.x()[i * d_ + j];
    const double mean = pairwise_mean(col);
    for (double& v : col) v = (v - mean) * (v - mean);
    const double sd = std::sqrt(pairwise_sum(col) / static_cast<double>(n_ - 1));
    scale_[j] = sd > 0.0 ? sd : 1.0;
  }
  if (d_ == 1) {
    sorted_row_.resize(n_);
    std::iota(sorted_row_.begin(), sorted_row_.end(), std::size_t{0});
    std::sort(sorted_row_.begin(), sorted_row_.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(x_[a], a) < std::tie(x_[b], b);
    });
    sorted_x_.resize(n_);
    for (std::size_t p = 0; p < n_; ++p) sorted_x_[p] = x_[sorted_row_[p]];
  }
}

std::vector<std::size_t> NeighborIndex::nearest(std::span<const double> point,
                                                std::size_t k,
                                                std::optional<std::size_t> exclude) const {
  if (point.size() != d_) {
    throw InvalidArgument("query point has dimension " + std::to_string(point.size()) +
                          ", index has " + std::to_string(d_));
  }
  const std::size_t available = n_ - (exclude && *exclude < n_ ? 1 : 0);
  k = std::min(k, available);
  if (k == 0) return {};
  // In one dimension the scale does not change the neighbor order.
  if (d_ == 1) return nearest_1d(point[0], k, exclude);
  return nearest_scan(point, k, exclude);
}

std::vector<std::size_t> NeighborIndex::nearest_1d(double q, std::size_t k,
                                                   std::optional<std::size_t> exclude) const {
  // Positions are signed so that "left of the array" is representable.
  using Pos = std::ptrdiff_t;
  const Pos n = static_cast<Pos>(n_);
  const auto skip = [&](Pos p) { return exclude && sorted_row_[p] == *exclude; };
  const auto dist = [&](Pos p) { return std::fabs(sorted_x_[p] - q); };

  Pos right = std::lower_bound(sorted_x_.begin(), sorted_x_.end(), q) - sorted_x_.begin();
  Pos left = right - 1;
  const auto step_left = [&] {
    --left;
    while (left >= 0 && skip(left)) --left;
  };
  const auto step_right = [&] {
    ++right;
    while (right < n && skip(right)) ++right;
  };
  if (left >= 0 && skip(left)) step_left();
  if (right < n && skip(right)) step_right();

  // Two-pointer merge by distance. Positions with distance strictly below the
  // final radius are all taken; rows on the radius are re-ranked by index.
  std::vector<std::pair<double, std::size_t>> picked;
  picked.reserve(k);
  while (picked.size() < k) {
    const bool has_l = left >= 0;
    const bool has_r = right < n;
    bool take_left;
    if (has_l && has_r) {
      const double dl = dist(left);
      const double dr = dist(right);
      take_left = dl < dr || (dl == dr && sorted_row_[left] < sorted_row_[right]);
    } else {
      take_left = has_l;
    }
    if (take_left) {
      picked.emplace_back(dist(left), sorted_row_[left]);
      step_left();
    } else {
      picked.emplace_back(dist(right), sorted_row_[right]);
      step_right();
    }
  }
  const double radius = picked.back().first;
  while (left >= 0 && dist(left) == radius) {
    picked.emplace_back(radius, sorted_row_[left]);
    step_left();
  }
  while (right < n && dist(right) == radius) {
    picked.emplace_back(radius, sorted_row_[right]);
    step_right();
  }
  std::sort(picked.begin(), picked.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = picked[i].second;
  return out;
}

std::vector<std::size_t> NeighborIndex::nearest_scan(std::span<const double> q,
                                                     std::size_t k,
                                                     std::optional<std::size_t> exclude) const {
  std::vector<std::pair<double, std::size_t>> cand;
  cand.reserve(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    if (exclude && i == *exclude) continue;
    double d2 = 0.0;
    for (std::size_t j = 0; j < d_; ++j) {
      const double diff = (x_[i * d_ + j] - q[j]) / scale_[j];
      d2 += diff * diff;
    }
    cand.emplace_back(d2, i);
  }
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = cand[i].second;
  return out;
}

// ---------------------------------------------------------------------------
// Regression

RegressionFit RegressionFit::oracle(PointFunction m) {
  if (!m) throw InvalidArgument("oracle regression needs a callable");
  RegressionFit fit;
  fit.method_ = RegressionMethod::exact_oracle;
  fit.oracle_ = std::move(m);
  return fit;
}

double RegressionFit::operator()(std::span<const double> x) const {
  if (method_ == RegressionMethod::exact_oracle) return oracle_(x);
  const auto rows = index_->nearest(x, k_);
  std::vector<double> vals(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) vals[i] = y_[rows[i]];
  return pairwise_mean(vals);
}

RegressionFit fit_knn(const GivenDataSample& s, std::size_t k) {
  if (k < 1 || k > s.size()) {
    throw InvalidK("k = " + std::to_string(k) + " outside [1, " + std::to_string(s.size()) +
                   "]");
  }
  RegressionFit fit;
  fit.method_ = RegressionMethod::knn;
  fit.k_ = k;
  fit.index_ = std::make_shared<const NeighborIndex>(s);
  fit.y_.assign(s.y().begin(), s.y().end());
  return fit;
}

// ---------------------------------------------------------------------------
// Estimator configuration

std::size_t GdEstimatorConfig::resolve_k(std::size_t n, std::size_t d) const {
  // Largest k with k * folds < n.
  const std::size_t cap = folds > 0 && n > 0 ? (n - 1) / folds : 0;
  if (k) {
    if (*k < 1 || *k > cap) {
      throw InvalidK("k = " + std::to_string(*k) + " must satisfy 1 <= k < n / folds = " +
                     std::to_string(static_cast<double>(n) / static_cast<double>(folds)));
    }
    return *k;
  }
  const double exponent = d == 1 ? 0.6 : 4.0 / (4.0 + static_cast<double>(d));
  const auto base = static_cast<std::size_t>(
      std::max(2.0, std::round(std::pow(static_cast<double>(n), exponent))));
  return std::max<std::size_t>(1, std::min(base, cap));
}

void GdEstimatorConfig::validate(std::size_t n) const {
  if (oracle) return;
  if (folds < 2) throw InvalidArgument("cross-fitting needs at least 2 folds");
  if (n < 2 * folds) {
    throw InsufficientData("n = " + std::to_string(n) + " rows, cross-fitting with " +
                           std::to_string(folds) + " folds needs at least " +
                           std::to_string(2 * folds));
  }
}

// ---------------------------------------------------------------------------
// Estimators of psi

double psi_plugin(const GivenDataSample& s, const RegressionFit& fit) {
  std::vector<double> sq(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double m = fit(s.row(i));
    sq[i] = m * m;
  }
  return pairwise_mean(sq);
}

double gd_influence(double y, double m_value, double psi) {
  return (2.0 * y - m_value) * m_value - psi;
}

namespace {

/// Seeded Fisher-Yates shuffle; row perm[j] goes to fold j % folds.
std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t folds,
                                         std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  const CounterRng rng({seed, 0});
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform(i, 0) * static_cast<double>(i + 1));
    std::swap(perm[i], perm[std::min(j, i)]);
  }
  std::vector<std::size_t> fold(n);
  for (std::size_t j = 0; j < n; ++j) fold[perm[j]] = j % folds;
  return fold;
}

}  // namespace

std::vector<double> cross_fitted_predictions(const GivenDataSample& s,
                                             const GdEstimatorConfig& cfg) {
  cfg.validate(s.size());
  const std::size_t n = s.size();
  std::vector<double> pred(n);
  if (cfg.oracle) {
    for (std::size_t i = 0; i < n; ++i) pred[i] = cfg.oracle(s.row(i));
    return pred;
  }
  const std::size_t k = cfg.resolve_k(n, s.dim());
  const auto fold = fold_assignment(n, cfg.folds, cfg.seed);
  for (std::size_t f = 0; f < cfg.folds; ++f) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < n; ++i) (fold[i] == f ? test : train).push_back(i);
    const RegressionFit fit = fit_knn(s.subset(train), k);
    for (std::size_t i : test) pred[i] = fit(s.row(i));
  }
  return pred;
}

namespace {

double onestep_from_predictions(std::span<const double> y, std::span<const double> pred) {
  std::vector<double> terms(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) terms[i] = (2.0 * y[i] - pred[i]) * pred[i];
  return pairwise_mean(terms);
}

}  // namespace

double psi_onestep(const GivenDataSample& s, const GdEstimatorConfig& cfg) {
  const auto pred = cross_fitted_predictions(s, cfg);
  return onestep_from_predictions(s.y(), pred);
}

std::vector<std::size_t> rank_pairing_neighbors(const GivenDataSample& s) {
  const std::size_t n = s.size();
  std::vector<std::size_t> nb(n);
  if (s.dim() == 1) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto x = s.x();
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(x[a], a) < std::tie(x[b], b);
    });
    for (std::size_t p = 0; p < n; ++p) {
      if (p == 0) {
        nb[order[p]] = order[p + 1];
      } else if (p + 1 == n) {
        nb[order[p]] = order[p - 1];
      } else {
        nb[order[p]] = std::min(order[p - 1], order[p + 1]);
      }
    }
    return nb;
  }
  const NeighborIndex index(s);
  for (std::size_t i = 0; i < n; ++i) nb[i] = index.nearest(s.row(i), 1, i).front();
  return nb;
}

double psi_rank_pairing(const GivenDataSample& s) {
  const auto nb = rank_pairing_neighbors(s);
  const auto y = s.y();
  std::vector<double> prod(s.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = y[i] * y[nb[i]];
  return pairwise_mean(prod);
}

// ---------------------------------------------------------------------------
// Sobol' index

GdEstimateDetail estimate_sobol_gd_detailed(const GivenDataSample& s,
                                            const GdEstimatorConfig& cfg,
                                            const ConfidenceConfig& ccfg) {
  ccfg.validate();
  const std::size_t n = s.size();
  const auto y = s.y();
  const auto pred = cross_fitted_predictions(s, cfg);

  std::vector<double> y_sq(n);
  for (std::size_t i = 0; i < n; ++i) y_sq[i] = y[i] * y[i];

  GdEstimateDetail out;
  out.moments.mu = pairwise_mean(y);
  out.moments.m2 = pairwise_mean(y_sq);
  out.moments.psi = cfg.regression == GdRegression::knn ? onestep_from_predictions(y, pred)
                                                        : psi_rank_pairing(s);
  out.k_used = cfg.oracle ? 0 : cfg.resolve_k(n, s.dim());
  out.folds = cfg.oracle ? 0 : cfg.folds;

  SobolEstimate& est = out.estimate;
  est.point = sobol_from_moments(out.moments);
  const auto g = phi_gradient(out.moments);
  out.influence.resize(n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.influence[i] = g[0] * gd_influence(y[i], pred[i], out.moments.psi) +
                       g[1] * (y[i] - out.moments.mu) + g[2] * (y_sq[i] - out.moments.m2);
    sq[i] = out.influence[i] * out.influence[i];
  }
  est.asym_variance = pairwise_mean(sq);
  est.n = n;
  est.level = ccfg.level;
  est.method = cfg.regression == GdRegression::knn ? Method::given_data_onestep
                                                   : Method::given_data_rank;
  std::tie(est.ci_low, est.ci_high) = wald_interval(est.point, est.asym_variance, n, ccfg);
  return out;
}

SobolEstimate estimate_sobol_gd(const GivenDataSample& s, const GdEstimatorConfig& cfg,
                                const ConfidenceConfig& ccfg) {
  return estimate_sobol_gd_detailed(s, cfg, ccfg).estimate;
}

}  // namespace sobol_eff

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sobol_eff/givendata.hpp"
#include "sobol_eff/models.hpp"

namespace sobol_eff {

/// Which estimator a replication study runs.
struct EstimatorSpec {
  Setting setting = Setting::pick_freeze;
  /// Used for the given-data setting only. The per-replication fold seed is
  /// derived from the master seed, overriding `gd.seed`.
  GdEstimatorConfig gd;

  /// "pick_freeze", "given_data_onestep" or "given_data_rank".
  std::string tag() const;
};

struct HarnessOptions {
  /// Monte Carlo budget of the efficiency bound.
  std::size_t bound_budget = 1'000'000;
  /// Worker threads; 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
  double level = 0.95;
  /// A study aborts when more than this fraction of replications fail.
  double max_failure_fraction = 0.001;
};

struct ReplicationReport {
  std::string model;
  Setting setting = Setting::pick_freeze;
  std::string estimator;
  std::size_t n = 0;
  std::size_t replications = 0;
  /// Successful replications only, in replication order.
  std::vector<double> estimates;
  std::size_t failed = 0;
  double s_true = 0.0;
  double mean = 0.0;
  double bias = 0.0;
  /// Standard error of `mean`.
  double replication_se = 0.0;
  /// Sample variance of sqrt(n) (estimate - S_true).
  double var_scaled = 0.0;
  /// Mean over replications of the estimator's own plug-in asym_variance.
  double mean_asym_variance = 0.0;
  double bound = 0.0;
  double bound_mc_se = 0.0;
  double efficiency_ratio = 0.0;
};

struct ExpansionReport {
  std::string model;
  Setting setting = Setting::pick_freeze;
  std::string estimator;
  std::vector<std::size_t> n_values;
  /// RMS over replications of sqrt(n) r_n with
  /// r_n = S_hat - S_true - mean of the true influence values.
  std::vector<double> rms_scaled_residual;
  std::vector<std::size_t> replications;
  std::vector<std::size_t> failed;
};

/// Draws R independent samples of size n, applies the estimator and compares
/// the spread of sqrt(n)(S_hat - S_true) with the efficiency bound.
/// Throws MissingTruth, InvalidArgument (R < 50), or Error when too many
/// replications fail.
ReplicationReport run_replications(const TestModel& model, const EstimatorSpec& spec,
                                   std::size_t n, std::size_t replications,
                                   std::uint64_t master_seed, const HarnessOptions& opts = {});

ExpansionReport expansion_check(const TestModel& model, const EstimatorSpec& spec,
                                const std::vector<std::size_t>& n_values,
                                std::size_t replications, std::uint64_t master_seed,
                                const HarnessOptions& opts = {});

/// Seed of the bound's Monte Carlo stream for a study with this master seed.
ReplicationSeed bound_seed(std::uint64_t master_seed);

}  // namespace sobol_eff

#include "sobol_eff/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

namespace sobol_eff {

std::string EstimatorSpec::tag() const {
  if (setting == Setting::pick_freeze) return "pick_freeze";
  return gd.regression == GdRegression::knn ? "given_data_onestep" : "given_data_rank";
}

ReplicationSeed bound_seed(std::uint64_t master_seed) {
  return {mix64(master_seed ^ 0xB0A7D5EEDull), 0};
}

namespace {

constexpr std::size_t kMinReplications = 50;

/// Runs task(r) for r in [0, count) on a pool of threads. Each task writes
/// only its own slot, so the result does not depend on the schedule.
template <typename Task>
void parallel_for(std::size_t count, unsigned threads, Task&& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t r = 0; r < count; ++r) task(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t r = next++; r < count; r = next++) task(r);
    });
  }
}

struct Replicate {
  std::optional<double> estimate;
  double asym_variance = 0.0;
  double influence_mean = 0.0;
};

/// One replication: draw, estimate, and (optionally) average the true
/// influence values over the same sample.
Replicate replicate(const TestModel& model, const EstimatorSpec& spec, std::size_t n,
                    ReplicationSeed seed, const ConfidenceConfig& ccfg, bool with_influence) {
  Replicate out;
  try {
    if (spec.setting == Setting::pick_freeze) {
      const auto sample = sample_pickfreeze(model, n, seed);
      const auto est = estimate_sobol_pf(sample, ccfg);
      out.estimate = est.point;
      out.asym_variance = est.asym_variance;
      if (with_influence) out.influence_mean = pairwise_mean(true_influence_pf(model, sample));
    } else {
      const auto sample = sample_givendata(model, n, seed);
      GdEstimatorConfig cfg = spec.gd;
      cfg.seed = mix64(seed.master_seed ^ mix64(seed.replication_index));
      const auto est = estimate_sobol_gd(sample, cfg, ccfg);
      out.estimate = est.point;
      out.asym_variance = est.asym_variance;
      if (with_influence) out.influence_mean = pairwise_mean(true_influence_gd(model, sample));
    }
  } catch (const DegenerateVariance&) {
    out.estimate.reset();
  }
  return out;
}

void check_failures(std::size_t failed, std::size_t total, const HarnessOptions& opts) {
  if (static_cast<double>(failed) > opts.max_failure_fraction * static_cast<double>(total)) {
    throw Error(std::to_string(failed) + " of " + std::to_string(total) +
                " replications produced a degenerate sample; report aborted");
  }
}

const ModelTruth& require_truth(const TestModel& model) {
  if (!model.truth) throw MissingTruth("model '" + model.name + "' has no analytic truth");
  return *model.truth;
}

void validate_common(const TestModel& model, const EstimatorSpec& spec, std::size_t n,
                     std::size_t replications, const HarnessOptions& opts) {
  if (replications < kMinReplications) {
    throw InvalidArgument("at least " + std::to_string(kMinReplications) +
                          " replications are required, got " + std::to_string(replications));
  }
  ConfidenceConfig{opts.level}.validate();
  if (spec.setting == Setting::given_data) {
    spec.gd.validate(n);
    if (!spec.gd.oracle) spec.gd.resolve_k(n, model.d);
  } else if (n < 2) {
    throw InsufficientData("Pick-Freeze replications need n >= 2");
  }
}

}  // namespace

ReplicationReport run_replications(const TestModel& model, const EstimatorSpec& spec,
                                   std::size_t n, std::size_t replications,
                                   std::uint64_t master_seed, const HarnessOptions& opts) {
  const ModelTruth& truth = require_truth(model);
  validate_common(model, spec, n, replications, opts);
  const ConfidenceConfig ccfg{opts.level};

  std::vector<Replicate> results(replications);
  parallel_for(replications, opts.threads, [&](std::size_t r) {
    results[r] = replicate(model, spec, n, {master_seed, static_cast<std::uint32_t>(r)}, ccfg,
                          false);
  });

  ReplicationReport rep;
  rep.model = model.name;
  rep.setting = spec.setting;
  rep.estimator = spec.tag();
  rep.n = n;
  rep.replications = replications;
  rep.s_true = truth.s_true;
  std::vector<double> asym;
  for (const auto& res : results) {
    if (!res.estimate) {
      ++rep.failed;
      continue;
    }
    rep.estimates.push_back(*res.estimate);
    asym.push_back(res.asym_variance);
  }
  check_failures(rep.failed, replications, opts);

  const std::size_t ok = rep.estimates.size();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  rep.mean = pairwise_mean(rep.estimates);
  rep.bias = rep.mean - truth.s_true;
  std::vector<double> dev(ok);
  for (std::size_t i = 0; i < ok; ++i) {
    const double d = rep.estimates[i] - rep.mean;
    dev[i] = d * d;
  }
  const double sample_var = pairwise_sum(dev) / static_cast<double>(ok - 1);
  rep.replication_se = std::sqrt(sample_var / static_cast<double>(ok));
  rep.var_scaled = sqrt_n * sqrt_n * sample_var;
  rep.mean_asym_variance = pairwise_mean(asym);

  const BoundEstimate bound =
      efficiency_bound(model, spec.setting, opts.bound_budget, bound_seed(master_seed));
  rep.bound = bound.bound;
  rep.bound_mc_se = bound.std_error;
  rep.efficiency_ratio = bound.bound > 0.0 ? rep.var_scaled / bound.bound
                         : rep.var_scaled == 0.0 ? 0.0
                                                 : std::numeric_limits<double>::infinity();
  return rep;
}

ExpansionReport expansion_check(const TestModel& model, const EstimatorSpec& spec,
                                const std::vector<std::size_t>& n_values,
                                std::size_t replications, std::uint64_t master_seed,
                                const HarnessOptions& opts) {
  const ModelTruth& truth = require_truth(model);
  if (spec.setting == Setting::given_data && !truth.m_oracle) {
    throw MissingTruth("model '" + model.name + "' has no conditional mean oracle");
  }
  if (n_values.empty()) throw InvalidArgument("expansion check needs at least one n");
  for (std::size_t n : n_values) validate_common(model, spec, n, replications, opts);
  const ConfidenceConfig ccfg{opts.level};

  ExpansionReport rep;
  rep.model = model.name;
  rep.setting = spec.setting;
  rep.estimator = spec.tag();
  rep.n_values = n_values;
  for (std::size_t level = 0; level < n_values.size(); ++level) {
    const std::size_t n = n_values[level];
    const std::uint64_t level_seed = mix64(master_seed + 0x9E3779B97F4A7C15ull * (level + 1));
    std::vector<Replicate> results(replications);
    parallel_for(replications, opts.threads, [&](std::size_t r) {
      results[r] =
          replicate(model, spec, n, {level_seed, static_cast<std::uint32_t>(r)}, ccfg, true);
    });
    std::vector<double> sq;
    std::size_t failed = 0;
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    for (const auto& res : results) {
      if (!res.estimate) {
        ++failed;
        continue;
      }
      const double scaled = sqrt_n * (*res.estimate - truth.s_true - res.influence_mean);
      sq.push_back(scaled * scaled);
    }
    check_failures(failed, replications, opts);
    rep.rms_scaled_residual.push_back(std::sqrt(pairwise_mean(sq)));
    rep.replications.push_back(replications);
    rep.failed.push_back(failed);
  }
  return rep;
}

}  // namespace sobol_eff

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sobol_eff/givendata.hpp"
#include "sobol_eff/pickfreeze.hpp"
#include "sobol_eff/rng.hpp"

namespace sobol_eff {

enum class Setting { pick_freeze, given_data };

std::string_view to_string(Setting setting);
/// Parses "pick_freeze" / "given_data"; throws InvalidArgument otherwise.
Setting parse_setting(std::string_view text);

/// Analytic ground truth of a model.
struct ModelTruth {
  double s_true = 0.0;
  double psi_true = 0.0;
  double mu_true = 0.0;
  double m2_true = 0.0;
  /// x -> E[Y | X = x].
  PointFunction m_oracle;

  MomentVector moments() const { return {psi_true, mu_true, m2_true}; }
};

/// Y = G(X, W) with X (dimension d) independent of the noise W (dimension
/// w_dim). Every coordinate of X and W is independent and generated by
/// inverse transform of a uniform draw.
struct TestModel {
  std::string name;
  std::size_t d = 1;
  std::size_t w_dim = 0;
  std::function<double(std::span<const double> x, std::span<const double> w)> g;
  std::function<double(std::size_t column, double u)> x_from_uniform;
  std::function<double(std::size_t column, double u)> w_from_uniform;
  std::optional<ModelTruth> truth;
};

/// Y = a X + b W, X, W iid N(0, 1). S = a^2 / (a^2 + b^2).
TestModel linear_gaussian(double a, double b);

/// Ishigami function on U(-pi, pi)^3; X is the first input, W the other two.
TestModel ishigami(double a = 7.0, double b = 0.1);

/// Sobol' G-function prod_j (|4 V_j - 2| + a_j) / (1 + a_j) on U(0, 1)^p;
/// X is the first input.
TestModel g_function(std::vector<double> coefficients = {0.0, 1.0, 4.5, 9.0, 99.0, 99.0,
                                                         99.0, 99.0});

/// Y = m(X) + sigma W, X, W iid N(0, 1). `psi_and_mu` = (E[m(X)^2], E[m(X)])
/// when known; the truth then has m2 = E[m(X)^2] + sigma^2.
TestModel product_noise(std::string name, PointFunction m, double sigma,
                        std::optional<std::pair<double, double>> psi_and_mu = {});

/// Noiseless Y = X, X ~ N(0, 1); S = 1.
TestModel identity_model();

/// linear_gaussian(1,1), ishigami(), g_function(), product_noise with m = x^2
/// and sigma = 1, identity_model().
std::vector<TestModel> builtin_models();

/// Resolves "name" or "name:key=value,key=value". Known names:
///   linear_gaussian:a=..,b=..
///   ishigami:a=..,b=..
///   g_function:a=c0/c1/c2/...
///   product_noise:m=square|sin|tanh,sigma=..   (tanh has no analytic truth)
///   identity
/// Throws InvalidArgument for unknown names or keys.
TestModel make_model(std::string_view spec);

/// Y_i = G(X_i, W_i), Y_i^X = G(X_i, W_i'), deterministic in `seed`.
PickFreezeSample sample_pickfreeze(const TestModel& model, std::size_t n,
                                   ReplicationSeed seed);

/// Rows (X_i, Y_i), deterministic in `seed`. Uses the same X and W streams as
/// `sample_pickfreeze`, so (X_i, Y_i) agree between the two samplers.
GivenDataSample sample_givendata(const TestModel& model, std::size_t n, ReplicationSeed seed);

/// Per-row true efficient influence values of S^X for a sample of the model.
std::vector<double> true_influence_pf(const TestModel& model, const PickFreezeSample& s);
std::vector<double> true_influence_gd(const TestModel& model, const GivenDataSample& s);

struct BoundEstimate {
  double bound = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of E[psi~^2], the second moment of the efficient
/// influence function of S^X in the given setting, at the model's truth.
/// Throws MissingTruth, or InvalidArgument when mc_budget < 1e5.
BoundEstimate efficiency_bound(const TestModel& model, Setting setting,
                               std::size_t mc_budget, ReplicationSeed seed);

}  // namespace sobol_eff

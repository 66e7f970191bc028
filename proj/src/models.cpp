#include "sobol_eff/models.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>

namespace sobol_eff {

namespace {

constexpr std::uint32_t kStreamX = 0x00000;
constexpr std::uint32_t kStreamW = 0x10000;
constexpr std::uint32_t kStreamWPrime = 0x20000;

constexpr double kPi = std::numbers::pi;

double standard_normal(std::size_t, double u) { return normal_quantile(u); }

ModelTruth make_truth(double psi, double mu, double m2, PointFunction m_oracle) {
  return {sobol_from_moments({psi, mu, m2}), psi, mu, m2, std::move(m_oracle)};
}

void draw_block(const CounterRng& rng, std::uint64_t row, std::uint32_t stream,
                const std::function<double(std::size_t, double)>& transform,
                std::span<double> out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = transform(j, rng.uniform(row, stream + static_cast<std::uint32_t>(j)));
  }
}

}  // namespace

std::string_view to_string(Setting setting) {
  return setting == Setting::pick_freeze ? "pick_freeze" : "given_data";
}

Setting parse_setting(std::string_view text) {
  if (text == "pick_freeze") return Setting::pick_freeze;
  if (text == "given_data") return Setting::given_data;
  throw InvalidArgument("unknown setting '" + std::string(text) +
                        "' (expected pick_freeze or given_data)");
}

TestModel linear_gaussian(double a, double b) {
  TestModel m;
  m.name = "linear_gaussian";
  m.d = 1;
  m.w_dim = 1;
  m.g = [a, b](std::span<const double> x, std::span<const double> w) {
    return a * x[0] + b * w[0];
  };
  m.x_from_uniform = standard_normal;
  m.w_from_uniform = standard_normal;
  if (a * a + b * b > 0.0) {
    m.truth = make_truth(a * a, 0.0, a * a + b * b,
                         [a](std::span<const double> x) { return a * x[0]; });
  }
  return m;
}

TestModel ishigami(double a, double b) {
  TestModel m;
  m.name = "ishigami";
  m.d = 1;
  m.w_dim = 2;
  m.g = [a, b](std::span<const double> x, std::span<const double> w) {
    const double s2 = std::sin(w[0]);
    const double v3 = w[1] * w[1];
    return std::sin(x[0]) + a * s2 * s2 + b * v3 * v3 * std::sin(x[0]);
  };
  const auto uniform_pm_pi = [](std::size_t, double u) { return -kPi + 2.0 * kPi * u; };
  m.x_from_uniform = uniform_pm_pi;
  m.w_from_uniform = uniform_pm_pi;

  const double pi4 = kPi * kPi * kPi * kPi;
  const double slope = 1.0 + b * pi4 / 5.0;
  const double mu = a / 2.0;
  const double v1 = 0.5 * slope * slope;
  const double var = a * a / 8.0 + b * pi4 / 5.0 + b * b * pi4 * pi4 / 18.0 + 0.5;
  m.truth = make_truth(v1 + mu * mu, mu, var + mu * mu,
                       [mu, slope](std::span<const double> x) {
                         return mu + slope * std::sin(x[0]);
                       });
  return m;
}

TestModel g_function(std::vector<double> coefficients) {
  if (coefficients.size() < 2) {
    throw InvalidArgument("g_function needs at least two coefficients");
  }
  for (double c : coefficients) {
    if (!(c >= 0.0)) throw InvalidArgument("g_function coefficients must be >= 0");
  }
  const auto factor = [](double v, double c) { return (std::fabs(4.0 * v - 2.0) + c) / (1.0 + c); };
  TestModel m;
  m.name = "g_function";
  m.d = 1;
  m.w_dim = coefficients.size() - 1;
  m.g = [coefficients, factor](std::span<const double> x, std::span<const double> w) {
    double y = factor(x[0], coefficients[0]);
    for (std::size_t j = 0; j < w.size(); ++j) y *= factor(w[j], coefficients[j + 1]);
    return y;
  };
  const auto unit = [](std::size_t, double u) { return u; };
  m.x_from_uniform = unit;
  m.w_from_uniform = unit;

  // E[factor] = 1 and Var[factor_j] = 1 / (3 (1 + a_j)^2).
  double m2 = 1.0;
  for (double c : coefficients) m2 *= 1.0 + 1.0 / (3.0 * (1.0 + c) * (1.0 + c));
  const double a0 = coefficients[0];
  const double v1 = 1.0 / (3.0 * (1.0 + a0) * (1.0 + a0));
  m.truth = make_truth(1.0 + v1, 1.0, m2, [a0, factor](std::span<const double> x) {
    return factor(x[0], a0);
  });
  return m;
}

TestModel product_noise(std::string name, PointFunction mean_fn, double sigma,
                        std::optional<std::pair<double, double>> psi_and_mu) {
  if (!mean_fn) throw InvalidArgument("product_noise needs a mean function");
  TestModel m;
  m.name = std::move(name);
  m.d = 1;
  m.w_dim = 1;
  m.g = [mean_fn, sigma](std::span<const double> x, std::span<const double> w) {
    return mean_fn(x) + sigma * w[0];
  };
  m.x_from_uniform = standard_normal;
  m.w_from_uniform = standard_normal;
  if (psi_and_mu) {
    const auto [psi, mu] = *psi_and_mu;
    m.truth = make_truth(psi, mu, psi + sigma * sigma, mean_fn);
  }
  return m;
}

TestModel identity_model() {
  TestModel m;
  m.name = "identity";
  m.d = 1;
  m.w_dim = 0;
  m.g = [](std::span<const double> x, std::span<const double>) { return x[0]; };
  m.x_from_uniform = standard_normal;
  m.w_from_uniform = standard_normal;
  m.truth = make_truth(1.0, 0.0, 1.0, [](std::span<const double> x) { return x[0]; });
  return m;
}

namespace {

TestModel product_noise_named(std::string_view fn, double sigma) {
  if (fn == "square") {
    // E[X^2] = 1, E[X^4] = 3.
    return product_noise("product_noise", [](std::span<const double> x) { return x[0] * x[0]; },
                         sigma, std::pair{3.0, 1.0});
  }
  if (fn == "sin") {
    // E[sin X] = 0, E[sin^2 X] = (1 - e^{-2}) / 2.
    return product_noise("product_noise",
                         [](std::span<const double> x) { return std::sin(x[0]); }, sigma,
                         std::pair{0.5 * (1.0 - std::exp(-2.0)), 0.0});
  }
  if (fn == "tanh") {
    return product_noise("product_noise",
                         [](std::span<const double> x) { return std::tanh(x[0]); }, sigma);
  }
  throw InvalidArgument("product_noise: unknown mean function '" + std::string(fn) +
                        "' (expected square, sin or tanh)");
}

double parse_number(std::string_view text, std::string_view what) {
  // std::from_chars for double is available in libstdc++ >= 11.
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw InvalidArgument("cannot parse '" + std::string(text) + "' as a number for " +
                          std::string(what));
  }
  return v;
}

}  // namespace

std::vector<TestModel> builtin_models() {
  return {linear_gaussian(1.0, 1.0), ishigami(), g_function(), product_noise_named("square", 1.0),
          identity_model()};
}

TestModel make_model(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  std::map<std::string, std::string, std::less<>> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw InvalidArgument("model parameter '" + std::string(item) +
                              "' is not of the form key=value");
      }
      params.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  }
  const auto take = [&](std::string_view key, double fallback) {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    const double v = parse_number(it->second, key);
    params.erase(it);
    return v;
  };
  const auto finish = [&](TestModel model) {
    if (!params.empty()) {
      throw InvalidArgument("unknown parameter '" + params.begin()->first + "' for model '" +
                            std::string(name) + "'");
    }
    return model;
  };

  if (name == "linear_gaussian") {
    const double a = take("a", 1.0);
    const double b = take("b", 1.0);
    return finish(linear_gaussian(a, b));
  }
  if (name == "ishigami") {
    const double a = take("a", 7.0);
    const double b = take("b", 0.1);
    return finish(ishigami(a, b));
  }
  if (name == "g_function") {
    std::vector<double> coeffs;
    if (const auto it = params.find("a"); it != params.end()) {
      std::string_view list = it->second;
      while (!list.empty()) {
        const auto slash = list.find('/');
        coeffs.push_back(parse_number(list.substr(0, slash), "g_function coefficient"));
        list = slash == std::string_view::npos ? std::string_view{} : list.substr(slash + 1);
      }
      params.erase(it);
      return finish(g_function(std::move(coeffs)));
    }
    return finish(g_function());
  }
  if (name == "product_noise") {
    std::string fn = "square";
    if (const auto it = params.find("m"); it != params.end()) {
      fn = it->second;
      params.erase(it);
    }
    const double sigma = take("sigma", 1.0);
    return finish(product_noise_named(fn, sigma));
  }
  if (name == "identity") return finish(identity_model());
  throw InvalidArgument("unknown model '" + std::string(name) + "'");
}

PickFreezeSample sample_pickfreeze(const TestModel& model, std::size_t n,
                                   ReplicationSeed seed) {
  if (n < 2) throw InvalidArgument("sample_pickfreeze needs n >= 2");
  const CounterRng rng(seed);
  std::vector<double> y(n), y_pf(n);
  std::vector<double> x(model.d), w(model.w_dim), w2(model.w_dim);
  for (std::size_t i = 0; i < n; ++i) {
    draw_block(rng, i, kStreamX, model.x_from_uniform, x);
    draw_block(rng, i, kStreamW, model.w_from_uniform, w);
    draw_block(rng, i, kStreamWPrime, model.w_from_uniform, w2);
    y[i] = model.g(x, w);
    y_pf[i] = model.g(x, w2);
  }
  return PickFreezeSample(std::move(y), std::move(y_pf));
}

GivenDataSample sample_givendata(const TestModel& model, std::size_t n, ReplicationSeed seed) {
  if (n < 2) throw InvalidArgument("sample_givendata needs n >= 2");
  const CounterRng rng(seed);
  std::vector<double> xs(n * model.d), y(n);
  std::vector<double> w(model.w_dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> x(xs.data() + i * model.d, model.d);
    draw_block(rng, i, kStreamX, model.x_from_uniform, x);
    draw_block(rng, i, kStreamW, model.w_from_uniform, w);
    y[i] = model.g(x, w);
  }
  return GivenDataSample(std::move(xs), model.d, std::move(y));
}

namespace {

const ModelTruth& require_truth(const TestModel& model) {
  if (!model.truth) {
    throw MissingTruth("model '" + model.name + "' has no analytic truth");
  }
  return *model.truth;
}

}  // namespace

std::vector<double> true_influence_pf(const TestModel& model, const PickFreezeSample& s) {
  return pf_sobol_influence_values(s, require_truth(model).moments());
}

std::vector<double> true_influence_gd(const TestModel& model, const GivenDataSample& s) {
  const ModelTruth& t = require_truth(model);
  if (!t.m_oracle) throw MissingTruth("model '" + model.name + "' has no conditional mean");
  const auto g = phi_gradient(t.moments());
  const auto y = s.y();
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    out[i] = g[0] * gd_influence(y[i], t.m_oracle(s.row(i)), t.psi_true) +
             g[1] * (y[i] - t.mu_true) + g[2] * (y[i] * y[i] - t.m2_true);
  }
  return out;
}

BoundEstimate efficiency_bound(const TestModel& model, Setting setting, std::size_t mc_budget,
                               ReplicationSeed seed) {
  require_truth(model);
  if (mc_budget < 100000) {
    throw InvalidArgument("efficiency bound needs a Monte Carlo budget of at least 1e5");
  }
  const std::vector<double> infl =
      setting == Setting::pick_freeze
          ? true_influence_pf(model, sample_pickfreeze(model, mc_budget, seed))
          : true_influence_gd(model, sample_givendata(model, mc_budget, seed));
  std::vector<double> sq(infl.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = infl[i] * infl[i];
  const double mean = pairwise_mean(sq);
  for (double& v : sq) v = (v - mean) * (v - mean);
  const double var = pairwise_sum(sq) / static_cast<double>(sq.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(sq.size()))};
}

}  // namespace sobol_eff

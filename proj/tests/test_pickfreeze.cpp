#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "sobol_eff/pickfreeze.hpp"
#include "test_support.hpp"

using namespace sobol_eff;

namespace {

constexpr double kTol = 1e-12;

/// Exact rational with 128-bit parts, enough for small integer samples.
struct Rational {
  __int128 num = 0;
  __int128 den = 1;

  static __int128 gcd(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }
  Rational(__int128 n = 0, __int128 d = 1) : num(n), den(d) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const __int128 g = gcd(num, den);
    num /= g;
    den /= g;
  }
  friend Rational operator+(Rational a, Rational b) {
    return {a.num * b.den + b.num * a.den, a.den * b.den};
  }
  friend Rational operator-(Rational a, Rational b) {
    return {a.num * b.den - b.num * a.den, a.den * b.den};
  }
  friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
  friend Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// The Pick-Freeze estimator written out as one ratio of symmetrized sums,
/// in exact arithmetic.
double exact_pick_freeze(const std::vector<int>& y, const std::vector<int>& z) {
  const auto n = static_cast<__int128>(y.size());
  Rational cross, sum, sq;
  for (std::size_t i = 0; i < y.size(); ++i) {
    cross = cross + Rational(y[i] * z[i]);
    sum = sum + Rational(y[i] + z[i]);
    sq = sq + Rational(y[i] * y[i] + z[i] * z[i]);
  }
  const Rational mean = sum / Rational(2 * n);
  return ((cross / Rational(n) - mean * mean) / (sq / Rational(2 * n) - mean * mean)).to_double();
}

PickFreezeSample random_sample(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> coef(0.2, 2.0), shift(-5.0, 5.0);
  const double a = coef(gen);
  const double b = coef(gen);
  const double c = shift(gen);
  std::vector<double> y(n), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = nd(gen);
    y[i] = c + a * x + b * nd(gen);
    z[i] = c + a * x + b * nd(gen);
  }
  return {std::move(y), std::move(z)};
}

}  // namespace

TEST_CASE("PickFreezeSample validation") {
  CHECK_THROWS_AS(PickFreezeSample({1.0, 2.0}, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(PickFreezeSample({1.0}, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(PickFreezeSample({1.0, NAN}, {1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(PickFreezeSample({1.0, 2.0}, {1.0, INFINITY}), InvalidArgument);
  CHECK_NOTHROW(PickFreezeSample({1.0, 2.0}, {2.0, 1.0}));
}

TEST_CASE("empirical_moments_pf hand examples") {
  auto m = empirical_moments_pf(PickFreezeSample({0.0, 1.0}, {1.0, 0.0}));
  CHECK(std::fabs(m.psi) < kTol);
  CHECK(std::fabs(m.mu - 0.5) < kTol);
  CHECK(std::fabs(m.m2 - 0.5) < kTol);

  m = empirical_moments_pf(PickFreezeSample({1.0, 3.0}, {2.0, 4.0}));
  CHECK(std::fabs(m.psi - 7.0) < kTol);
  CHECK(std::fabs(m.mu - 2.5) < kTol);
  CHECK(std::fabs(m.m2 - 7.5) < kTol);

  const double c = -1.75;
  m = empirical_moments_pf(PickFreezeSample(std::vector<double>(9, c), std::vector<double>(9, c)));
  CHECK(std::fabs(m.psi - c * c) < kTol);
  CHECK(std::fabs(m.mu - c) < kTol);
  CHECK(std::fabs(m.m2 - c * c) < kTol);
}

TEST_CASE("pf_influence_triple and pf_sobol_influence hand examples") {
  const MomentVector m{5.0, 2.0, 6.0};
  const auto t = pf_influence_triple(2.0, 3.0, m);
  CHECK(std::fabs(t.if_psi - 1.0) < kTol);
  CHECK(std::fabs(t.if_mu - 0.5) < kTol);
  CHECK(std::fabs(t.if_m2 - 0.5) < kTol);
  CHECK(std::fabs(pf_sobol_influence(2.0, 3.0, m) + 0.125) < kTol);

  // At mu = 0 the mean term drops out of the combination.
  const MomentVector m0{0.4, 0.0, 1.5};
  const double y1 = 0.3, y2 = -1.2;
  const auto g = phi_gradient(m0);
  CHECK(g[1] == 0.0);
  CHECK(std::fabs(pf_sobol_influence(y1, y2, m0) -
                  (g[0] * (y1 * y2 - m0.psi) + g[2] * (0.5 * (y1 * y1 + y2 * y2) - m0.m2))) <
        kTol);
}

TEST_CASE("influence values are symmetric in the pair") {
  auto gen = test_support::rng_for(10);
  std::normal_distribution<double> nd(0.0, 3.0);
  for (int c = 0; c < test_support::kPropertyCases; ++c) {
    const double a = nd(gen), b = nd(gen);
    const double mu = nd(gen);
    const MomentVector m{nd(gen), mu, mu * mu + 0.5 + std::fabs(nd(gen))};
    const auto t1 = pf_influence_triple(a, b, m);
    const auto t2 = pf_influence_triple(b, a, m);
    CHECK(t1.if_psi == t2.if_psi);
    CHECK(t1.if_mu == t2.if_mu);
    CHECK(t1.if_m2 == t2.if_m2);
    CHECK(pf_sobol_influence(a, b, m) == pf_sobol_influence(b, a, m));
  }
}

TEST_CASE("estimate_sobol_pf hand examples") {
  auto est = estimate_sobol_pf(PickFreezeSample({0.0, 1.0}, {1.0, 0.0}));
  CHECK(std::fabs(est.point + 1.0) < kTol);
  CHECK(est.method == Method::pick_freeze);
  CHECK(est.n == 2);

  est = estimate_sobol_pf(PickFreezeSample({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}));
  CHECK(std::fabs(est.point - 1.0) < kTol);

  CHECK_THROWS_AS(estimate_sobol_pf(PickFreezeSample({2.0, 2.0, 2.0}, {2.0, 2.0, 2.0})),
                  DegenerateVariance);
  CHECK_THROWS_AS(estimate_sobol_pf(PickFreezeSample({0.0, 1.0}, {1.0, 0.0}), {1.5}),
                  InvalidLevel);
}

TEST_CASE("estimate_sobol_pf matches exact rational evaluation on small samples") {
  auto gen = test_support::rng_for(11);
  std::uniform_int_distribution<int> v(-9, 9);
  std::uniform_int_distribution<int> len(2, 5);
  int checked = 0;
  for (int c = 0; c < test_support::kPropertyCases; ++c) {
    const int n = len(gen);
    std::vector<int> y(n), z(n);
    for (int i = 0; i < n; ++i) {
      y[i] = v(gen);
      z[i] = v(gen);
    }
    std::vector<double> yd(y.begin(), y.end()), zd(z.begin(), z.end());
    const PickFreezeSample s(yd, zd);
    const auto m = empirical_moments_pf(s);
    if (!(m.variance() > kDegenerateVarianceEps)) continue;
    CHECK(std::fabs(estimate_sobol_pf(s).point - exact_pick_freeze(y, z)) < 1e-14);
    ++checked;
  }
  CHECK(checked > 200);
}

TEST_CASE("exchange invariance is bit-exact") {
  auto gen = test_support::rng_for(12);
  for (int c = 0; c < test_support::kPropertyCases; ++c) {
    const auto s = random_sample(gen, 3 + c);
    const PickFreezeSample swapped({s.y_pf().begin(), s.y_pf().end()},
                                   {s.y().begin(), s.y().end()});
    const auto m1 = empirical_moments_pf(s);
    const auto m2 = empirical_moments_pf(swapped);
    CHECK(m1.psi == m2.psi);
    CHECK(m1.mu == m2.mu);
    CHECK(m1.m2 == m2.m2);
    const auto e1 = estimate_sobol_pf(s);
    const auto e2 = estimate_sobol_pf(swapped);
    CHECK(e1.point == e2.point);
    CHECK(e1.asym_variance == e2.asym_variance);
  }
}

TEST_CASE("point estimate is invariant under affine output maps") {
  auto gen = test_support::rng_for(13);
  std::uniform_real_distribution<double> lam_d(0.1, 10.0), c_d(-50.0, 50.0);
  for (int c = 0; c < test_support::kPropertyCases; ++c) {
    const auto s = random_sample(gen, 20 + c);
    const double lam = (c % 2 ? -1.0 : 1.0) * lam_d(gen);
    const double shift = c_d(gen);
    std::vector<double> y(s.size()), z(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      y[i] = lam * s.y()[i] + shift;
      z[i] = lam * s.y_pf()[i] + shift;
    }
    const double p1 = estimate_sobol_pf(s).point;
    const double p2 = estimate_sobol_pf(PickFreezeSample(y, z)).point;
    CHECK(std::fabs(p2 - p1) <= 1e-10 * std::max(1.0, std::fabs(p1)));
  }
}

TEST_CASE("influence values are centered at the empirical moments") {
  auto gen = test_support::rng_for(14);
  for (int c = 0; c < test_support::kPropertyCases; ++c) {
    const auto s = random_sample(gen, 10 + 37 * c);
    const auto m = empirical_moments_pf(s);
    const auto infl = pf_sobol_influence_values(s, m);
    CHECK(std::fabs(pairwise_mean(infl)) <= 1e-12 * std::max(1.0, m.m2));
    double sq = 0.0;
    for (double v : infl) sq += v * v;
    const auto est = estimate_sobol_pf(s);
    CHECK(est.asym_variance >= 0.0);
    CHECK(est.asym_variance == doctest::Approx(sq / s.size()).epsilon(1e-12));
    CHECK(est.ci_low <= est.point);
    CHECK(est.point <= est.ci_high);
  }
}

TEST_CASE("asym_variance equals the plug-in delta-method variance") {
  // Independent route: covariance matrix of the per-pair terms sandwiched by
  // the gradient.
  auto gen = test_support::rng_for(15);
  const auto s = random_sample(gen, 500);
  const auto m = empirical_moments_pf(s);
  const std::size_t n = s.size();
  std::vector<std::array<double, 3>> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = s.y()[i], b = s.y_pf()[i];
    t[i] = {a * b, 0.5 * (a + b), 0.5 * (a * a + b * b)};
  }
  double cov[3][3] = {};
  for (const auto& row : t) {
    const double c[3] = {row[0] - m.psi, row[1] - m.mu, row[2] - m.m2};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cov[i][j] += c[i] * c[j] / static_cast<double>(n);
  }
  const auto g = phi_gradient(m);
  double v = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v += g[i] * cov[i][j] * g[j];
  CHECK(estimate_sobol_pf(s).asym_variance == doctest::Approx(v).epsilon(1e-10));
}

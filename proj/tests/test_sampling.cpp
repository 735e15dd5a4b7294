#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "carbontrace/errors.hpp"
#include "carbontrace/rng.hpp"
#include "carbontrace/sampling.hpp"
#include "test_helpers.hpp"

using namespace carbontrace;
using test::normal_quantile_oracle;
using test::weibull_quantile_oracle;

TEST_CASE("rng streams are deterministic and order independent") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  std::vector<double> left, right;
  for (int i = 0; i < 100; ++i) left.push_back(a.uniform());
  for (int i = 0; i < 100; ++i) right.push_back(b.uniform());
  CHECK(left == right);
  bool differs = false;
  for (int i = 0; i < 100; ++i) differs |= c.uniform() != left[i];
  CHECK(differs);
  for (double u : left) {
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("weibull quantile endpoints and oracle value") {
  const WeibullParams p{8.0, 2.0};
  CHECK(weibull_quantile(p, 0.0) == 0.0);
  CHECK(weibull_quantile(p, 1.0 - std::exp(-1.0)) == doctest::Approx(8.0).epsilon(1e-12));
  // frozen from the bisection oracle below
  const double frozen = 6.660436889261582;
  CHECK(weibull_quantile(p, 0.5) == doctest::Approx(frozen).epsilon(1e-13));
  CHECK(weibull_quantile_oracle(8.0, 2.0, 0.5) == doctest::Approx(frozen).epsilon(1e-10));

  for (double u : {0.01, 0.2, 0.66, 0.93}) {
    CHECK(weibull_quantile(p, u) ==
          doctest::Approx(weibull_quantile_oracle(8.0, 2.0, u)).epsilon(1e-9));
  }
}

TEST_CASE("weibull empirical mean and K-S fit") {
  const double ks_critical = 1.628 / std::sqrt(1e5);  // 1% level
  for (auto [lambda, k] : std::vector<std::pair<double, double>>{{8, 2}, {6, 1.5}, {10, 3}}) {
    const WeibullParams p{lambda, k};
    RngStream rng(1234, static_cast<std::uint64_t>(lambda));
    const int n_mean = 1'000'000;
    double sum = 0.0;
    for (int i = 0; i < n_mean; ++i) sum += weibull_sample(p, rng);
    const double mean = sum / n_mean;
    CHECK(std::abs(mean - weibull_mean(p)) / weibull_mean(p) < 0.01);

    const int n_ks = 100'000;
    std::vector<double> xs(n_ks);
    RngStream rng2(99, static_cast<std::uint64_t>(k * 10));
    for (auto& x : xs) x = weibull_sample(p, rng2);
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (int i = 0; i < n_ks; ++i) {
      const double cdf = 1.0 - std::exp(-std::pow(xs[i] / lambda, k));
      d = std::max(d, std::abs((i + 1.0) / n_ks - cdf));
      d = std::max(d, std::abs(cdf - static_cast<double>(i) / n_ks));
    }
    CHECK(d < ks_critical);
  }
}

TEST_CASE("normal quantile matches the erfc bisection oracle") {
  CHECK(normal_quantile(0.5) == 0.0);
  for (double u : {1e-9, 1e-4, 0.025, 0.31, 0.5, 0.69, 0.8413447460685429, 0.975,
                   1.0 - 1e-4, 1.0 - 1e-9}) {
    CHECK(std::abs(normal_quantile(u) - normal_quantile_oracle(u)) < 1e-9);
  }
  CHECK(normal_quantile(0.975) == doctest::Approx(1.9599639845400545).epsilon(1e-12));
  CHECK(normal_quantile(0.8413447460685429) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("base load sampling: degenerate sigma, mean, truncation") {
  RngStream rng(5, 0);
  CHECK(base_load_sample({100.0, 0.0}, rng) == 100.0);

  RngStream rng2(6, 0);
  const int n = 1'000'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += base_load_sample({100.0, 10.0}, rng2);
  CHECK(std::abs(sum / n - 100.0) / 100.0 < 0.001);

  RngStream rng3(7, 0);
  for (int i = 0; i < 20'000; ++i) CHECK(base_load_sample({0.0, 1.0}, rng3) >= 0.0);
}

TEST_CASE("ev demand shares the weibull transform") {
  const WeibullParams p{2.0, 1.0};  // exponential, mean 2
  RngStream rng(11, 3);
  const int n = 1'000'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += ev_demand_sample(p, rng);
  CHECK(std::abs(sum / n - 2.0) / 2.0 < 0.01);

  RngStream a(21, 4), b(21, 4);
  for (int i = 0; i < 50; ++i)
    CHECK(ev_demand_sample(p, a) == weibull_sample(p, b));
  RngStream c(22, 0);
  (void)c;
  CHECK(weibull_quantile(p, 0.0) == 0.0);
}

TEST_CASE("turbine power curve") {
  const WindTurbineParams t{150.0, 3.0, 12.0, 25.0};
  CHECK(wind_power(1.0, t) == 0.0);
  CHECK(wind_power(2.999, t) == 0.0);
  CHECK(wind_power(12.0, t) == 150.0);
  CHECK(wind_power(7.5, t) == doctest::Approx(75.0));
  CHECK(wind_power(20.0, t) == 150.0);
  CHECK(wind_power(25.0, t) == 150.0);
  CHECK(wind_power(25.001, t) == 0.0);

  // monotone non-decreasing on [0, v_out), zero outside [v_in, v_out]
  RngStream rng(3, 1);
  for (int trial = 0; trial < 200; ++trial) {
    WindTurbineParams p;
    p.v_in = 5.0 * rng.uniform();
    p.v_rate = p.v_in + 0.5 + 10.0 * rng.uniform();
    p.v_out = p.v_rate + 0.5 + 15.0 * rng.uniform();
    p.p_rate = 1.0 + 200.0 * rng.uniform();
    double prev = 0.0;
    for (double x = 0.0; x < p.v_out; x += p.v_out / 400.0) {
      const double w = wind_power(x, p);
      CHECK(w >= prev - 1e-12);
      if (x < p.v_in) CHECK(w == 0.0);
      prev = w;
    }
    CHECK(wind_power(p.v_out + 0.01, p) == 0.0);
  }
}

TEST_CASE("expected wind power against a plain Riemann oracle") {
  const WeibullParams w{8.0, 2.0};
  const WindTurbineParams t{100.0, 3.0, 12.0, 25.0};
  const double expected = expected_wind_power(w, t);
  // midpoint rule over [0, 60] as an independent check
  double acc = 0.0;
  const int n = 400'000;
  const double h = 60.0 / n;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) * h;
    const double pdf = (w.k / w.lambda) * std::pow(x / w.lambda, w.k - 1.0) *
                       std::exp(-std::pow(x / w.lambda, w.k));
    acc += wind_power(x, t) * pdf * h;
  }
  CHECK(expected == doctest::Approx(acc).epsilon(1e-6));
  CHECK(expected > 0.0);
  CHECK(expected < t.p_rate);
}

TEST_CASE("marginal CEI segments") {
  SUBCASE("degenerate constant model") {
    const MarginalCeiParams p{0.9, 0.0, 0.9, 0.0, 200.0, 300.0};
    for (double x : {0.0, 10.0, 200.0, 299.0}) CHECK(marginal_cei(x, p) == 0.9);
  }
  SUBCASE("intercept at zero output") {
    const MarginalCeiParams p{0.95, 5e-4, 0.7, 4e-4, 200.0, 300.0};
    CHECK(marginal_cei(0.0, p) == 0.95);
    CHECK(marginal_cei(1e-9, p) == doctest::Approx(0.95));
  }
  SUBCASE("direct substitution at the design point") {
    const MarginalCeiParams p{0.95, 5e-4, 0.7, 4e-4, 200.0, 300.0};
    CHECK(marginal_cei(200.0, p) == doctest::Approx(0.85));  // lower segment owns P_Grate
    CHECK(marginal_cei(200.0 + 1e-9, p) == doctest::Approx(0.7 + 4e-4 * 200.0));
  }
  SUBCASE("piecewise linear with exactly one breakpoint") {
    const MarginalCeiParams p{0.9, 2e-4, 0.6, 6e-4, 150.0, 280.0};
    auto slope = [&](double a, double b) {
      return (marginal_cei(b, p) - marginal_cei(a, p)) / (b - a);
    };
    CHECK(slope(10.0, 60.0) == doctest::Approx(slope(70.0, 140.0)).epsilon(1e-9));
    CHECK(slope(160.0, 200.0) == doctest::Approx(slope(210.0, 270.0)).epsilon(1e-9));
    CHECK(slope(10.0, 60.0) == doctest::Approx(-2e-4));
    CHECK(slope(160.0, 200.0) == doctest::Approx(6e-4));
  }
  SUBCASE("out of range throws") {
    const MarginalCeiParams p{0.9, 0.0, 0.9, 0.0, 200.0, 300.0};
    CHECK_THROWS_AS(marginal_cei(-1.0, p), ModelingError);
    CHECK_THROWS_AS(marginal_cei(301.0, p), ModelingError);
  }
}

TEST_CASE("beta quantile and sampling") {
  const BetaParams b22{2.0, 2.0};
  CHECK(beta_quantile(b22, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(beta_quantile(b22, 0.15625) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(beta_quantile(b22, 0.0) == 0.0);
  CHECK(beta_quantile(b22, 1.0) == 1.0);

  const BetaParams uniform{1.0, 1.0};
  for (double u : {0.1, 0.33, 0.77})
    CHECK(beta_quantile(uniform, u) == doctest::Approx(u).epsilon(1e-9));

  const BetaParams skew{2.5, 4.0};
  RngStream rng(17, 2);
  const int n = 100'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = beta_sample(skew, rng);
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    sum += x;
  }
  CHECK(std::abs(sum / n - beta_mean(skew)) / beta_mean(skew) < 0.01);
}

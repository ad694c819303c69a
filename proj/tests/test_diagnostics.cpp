#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "retrodp/diagnostics.hpp"
#include "oracles.hpp"

using namespace retrodp;

TEST_CASE("deviance") {
  SECTION("single datum, single cluster") {
    std::map<int, int> counts{{1, 1}};
    std::map<int, ComponentParams> params{{1, {0.0, 1.0}}};
    REQUIRE(deviance(counts, params, {0.0}) ==
            Catch::Approx(1.8378770664093453).epsilon(1e-12));
  }

  SECTION("splitting a cluster into identical halves changes nothing") {
    std::map<int, int> counts{{1, 4}};
    std::map<int, ComponentParams> params{{1, {0.3, 1.2}}};
    const std::vector<double> y{0.0, 0.2, 0.4, 0.9};
    const double d = deviance(counts, params, y);
    std::map<int, int> split{{1, 2}, {2, 2}};
    std::map<int, ComponentParams> params2{{1, {0.3, 1.2}}, {2, {0.3, 1.2}}};
    REQUIRE(deviance(split, params2, y) == Catch::Approx(d).epsilon(1e-12));
  }

  SECTION("label permutation invariance") {
    const std::vector<double> y{0.0, 0.5, -0.3, 1.1};
    std::map<int, int> counts{{1, 2}, {2, 1}, {5, 1}};
    std::map<int, ComponentParams> params{
        {1, {0.0, 1.0}}, {2, {1.0, 0.5}}, {5, {-0.5, 2.0}}};
    std::map<int, int> perm{{9, 2}, {4, 1}, {2, 1}};
    std::map<int, ComponentParams> params_perm{
        {9, {0.0, 1.0}}, {4, {1.0, 0.5}}, {2, {-0.5, 2.0}}};
    REQUIRE(deviance(perm, params_perm, y) ==
            Catch::Approx(deviance(counts, params, y)).epsilon(1e-12));
  }

  SECTION("zero mixture density reports an infinite deviance") {
    // underflow alone stays finite in log space; an exact zero does not
    std::map<int, int> counts{{1, 1}};
    std::map<int, ComponentParams> params{{1, {0.0, 1e-6}}};
    const double huge = deviance(counts, params, {100.0});
    REQUIRE(std::isfinite(huge));
    REQUIRE(huge > 1e9);
    REQUIRE(std::isinf(deviance(counts, params, {1e200})));
  }

  SECTION("inconsistent counts are rejected") {
    std::map<int, int> counts{{1, 3}};
    std::map<int, ComponentParams> params{{1, {0.0, 1.0}}};
    REQUIRE_THROWS_AS(deviance(counts, params, {0.0}), std::invalid_argument);
  }
}

TEST_CASE("num_clusters") {
  REQUIRE(num_clusters({{1, 3}}) == 1);
  REQUIRE(num_clusters({{1, 1}, {2, 1}, {3, 1}}) == 3);
  REQUIRE(num_clusters({{1, 2}, {2, 0}, {3, 1}}) == 2);
}

TEST_CASE("autocorrelation") {
  SECTION("lag zero is one") {
    REQUIRE(autocorrelation({0.0, 1.0, 0.5, 2.0}, 0) == Catch::Approx(1.0));
  }

  SECTION("iid noise is uncorrelated") {
    Philox4x64 rng(501);
    std::vector<double> x(100000);
    for (double& v : x) v = rnorm(rng);
    REQUIRE(std::abs(autocorrelation(x, 1)) < 0.02);
  }

  SECTION("AR(1) with coefficient 0.5") {
    Philox4x64 rng(502);
    std::vector<double> x(1000000);
    x[0] = rnorm(rng, 0.0, std::sqrt(1.0 / 0.75));
    for (std::size_t t = 1; t < x.size(); ++t)
      x[t] = 0.5 * x[t - 1] + rnorm(rng);
    REQUIRE(autocorrelation(x, 1) == Catch::Approx(0.5).margin(0.02));
    REQUIRE(autocorrelation(x, 2) == Catch::Approx(0.25).margin(0.02));
  }

  SECTION("degenerate input") {
    REQUIRE_THROWS_AS(autocorrelation({1.0, 1.0, 1.0}, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(autocorrelation({1.0, 2.0}, 5), std::invalid_argument);
  }
}

TEST_CASE("iat estimator") {
  SECTION("white noise") {
    Philox4x64 rng(503);
    std::vector<double> x(1000000);
    for (double& v : x) v = rnorm(rng);
    const IATEstimate est = iat(x);
    REQUIRE(est.tau_hat == Catch::Approx(1.0).margin(0.1));
    REQUIRE(est.window_converged);
  }

  SECTION("AR(1) with coefficient 0.5 has tau = 3") {
    Philox4x64 rng(504);
    std::vector<double> x(1000000);
    x[0] = rnorm(rng, 0.0, std::sqrt(1.0 / 0.75));
    for (std::size_t t = 1; t < x.size(); ++t)
      x[t] = 0.5 * x[t - 1] + rnorm(rng);
    const IATEstimate est = iat(x);
    REQUIRE(est.tau_hat == Catch::Approx(3.0).margin(0.3));
    REQUIRE(est.window >= 6.0 * est.tau_hat - 1.0);
    REQUIRE(est.window_converged);
  }

  SECTION("manual window override") {
    Philox4x64 rng(505);
    std::vector<double> x(200000);
    for (double& v : x) v = rnorm(rng);
    const IATEstimate est = iat(x, 50);
    REQUIRE(est.window == 50);
    REQUIRE(est.tau_hat == Catch::Approx(1.0).margin(0.15));
  }

  SECTION("standard error covers the truth across seeded replications") {
    // AR(1), phi = 0.5, tau = 3; 3 s.e. coverage in at least 95/100 runs
    int covered = 0;
    for (int rep = 0; rep < 100; ++rep) {
      Philox4x64 rng(6000 + rep);
      std::vector<double> x(100000);
      x[0] = rnorm(rng, 0.0, std::sqrt(1.0 / 0.75));
      for (std::size_t t = 1; t < x.size(); ++t)
        x[t] = 0.5 * x[t - 1] + rnorm(rng);
      const IATEstimate est = iat(x);
      covered += std::abs(est.tau_hat - 3.0) <= 3.0 * est.std_err;
    }
    REQUIRE(covered >= 95);
  }

  SECTION("IAT consistency across the AR(1) family") {
    for (double phi : {0.0, 0.3, 0.5, 0.8}) {
      Philox4x64 rng(507);
      std::vector<double> x(1000000);
      x[0] = rnorm(rng, 0.0, 1.0 / std::sqrt(1.0 - phi * phi));
      for (std::size_t t = 1; t < x.size(); ++t)
        x[t] = phi * x[t - 1] + rnorm(rng);
      const double truth = (1.0 + phi) / (1.0 - phi);
      REQUIRE(iat(x).tau_hat == Catch::Approx(truth).epsilon(0.10));
    }
  }

  SECTION("short series are rejected") {
    REQUIRE_THROWS_AS(iat(std::vector<double>(50, 1.0)), std::invalid_argument);
  }
}

TEST_CASE("two-sample KS") {
  Philox4x64 rng(508);

  SECTION("identical laws give a large p") {
    std::vector<double> a(5000), b(5000);
    for (double& v : a) v = rnorm(rng);
    for (double& v : b) v = rnorm(rng);
    REQUIRE(ks_test_pvalue(a, b) > 0.01);
  }

  SECTION("shifted laws give a tiny p") {
    std::vector<double> a(5000), b(5000);
    for (double& v : a) v = rnorm(rng);
    for (double& v : b) v = rnorm(rng, 0.3, 1.0);
    REQUIRE(ks_test_pvalue(a, b) < 1e-6);
  }

  SECTION("statistic on a known pair") {
    // F({1,2}) vs F({1.5}): maximal gap 0.5
    REQUIRE(ks_statistic({1.0, 2.0}, {1.5}) == Catch::Approx(0.5));
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "retrodp/conditional_sampler.hpp"
#include "retrodp/exact_allocation.hpp"
#include "oracles.hpp"

using namespace retrodp;

namespace {

ModelSpec bounded_spec(double alpha = 1.0, double fixed_var = 1.0) {
  ModelSpec spec;
  spec.base = {0.0, 4.0, 2.0, 0.8};
  spec.alpha = alpha;
  spec.fixed_variance = fixed_var;
  return spec;
}

// Stream over a pre-realized stick prefix with externally fixed factors.
BoundedWeightedStream fixed_factor_stream(StickState& sticks,
                                          const ModelSpec& spec,
                                          const std::vector<double>& factors,
                                          double bound) {
  return BoundedWeightedStream(
      sticks, spec,
      [&factors](int j, const StickState&) {
        return j <= static_cast<int>(factors.size()) ? factors[j - 1] : 0.5;
      },
      bound);
}

}  // namespace

TEST_CASE("bounding sequences") {
  ModelSpec spec = bounded_spec();
  Philox4x64 rng(801);

  SECTION("worked example: p=(0.5,0.25), f=(0.5,1.0), M=1") {
    StickState sticks =
        StickState::from_sticks({0.5, 0.5}, {{0.0, 1.0}, {0.0, 1.0}});
    std::vector<double> f{0.5, 1.0};
    auto stream = fixed_factor_stream(sticks, spec, f, 1.0);
    stream.realize_to(2, rng);
    const BoundsPair b = bounds(stream, 2);
    REQUIRE(b.lower == Catch::Approx(0.5).epsilon(1e-12));
    REQUIRE(b.upper == Catch::Approx(0.75).epsilon(1e-12));
  }

  SECTION("zero tail mass closes the gap") {
    StickState sticks =
        StickState::from_sticks({0.5, 1.0}, {{0.0, 1.0}, {0.0, 1.0}});
    std::vector<double> f{0.3, 0.9};
    auto stream = fixed_factor_stream(sticks, spec, f, 1.0);
    stream.realize_to(2, rng);
    const BoundsPair b = bounds(stream, 2);
    REQUIRE(b.lower == Catch::Approx(b.upper).epsilon(1e-12));
  }

  SECTION("constant factors at the bound keep the upper bound at M") {
    StickState sticks;
    sticks.extend_to(10, spec, rng);
    BoundedWeightedStream stream(
        sticks, spec, [](int, const StickState&) { return 1.0; }, 1.0);
    stream.realize_to(10, rng);
    for (int k = 1; k <= 10; ++k)
      REQUIRE(bounds(stream, k).upper == Catch::Approx(1.0).epsilon(1e-12));
  }

  SECTION("monotone in the prefix length") {
    Philox4x64 r2(802);
    for (int rep = 0; rep < 200; ++rep) {
      StickState sticks;
      ModelSpec sp = bounded_spec(0.5 + 2.0 * runif(r2));
      const double y = rnorm(r2, 0.0, 2.0);
      const double bound = likelihood_bound(sp);
      BoundedWeightedStream stream(
          sticks, sp,
          [y](int j, const StickState& s) { return obs_density(y, s.atom(j)); },
          bound);
      stream.realize_to(30, r2);
      BoundsPair prev = bounds(stream, 1);
      for (int k = 2; k <= 30; ++k) {
        const BoundsPair b = bounds(stream, k);
        REQUIRE(b.lower >= prev.lower);
        REQUIRE(b.upper <= prev.upper + 1e-15);
        REQUIRE(b.lower <= b.upper);
        prev = b;
      }
    }
  }

  SECTION("factor above the bound is rejected") {
    StickState sticks = StickState::from_sticks({0.5}, {{0.0, 1.0}});
    std::vector<double> f{2.0};
    auto stream = fixed_factor_stream(sticks, spec, f, 1.0);
    REQUIRE_THROWS_AS(stream.realize_to(1, rng), std::domain_error);
  }
}

TEST_CASE("sandwich sampler worked example") {
  // p=(0.5,0.25,...), f=(0.5,1.0,...), M=1: at k=2, U=0.3 identifies J=1
  // since 0 <= 0.3 and r1/c_u = 0.25/0.75 >= 0.3.
  ModelSpec spec = bounded_spec();
  Philox4x64 rng(803);
  StickState sticks =
      StickState::from_sticks({0.5, 0.5}, {{0.0, 1.0}, {0.0, 1.0}});
  std::vector<double> f{0.5, 1.0};
  auto stream = fixed_factor_stream(sticks, spec, f, 1.0);
  stream.realize_to(2, rng);
  const BoundsPair b = bounds(stream, 2);
  REQUIRE(stream.pf_prefix(1) / b.upper >= 0.3);
  REQUIRE(stream.pf_prefix(0) / b.lower <= 0.3);

  SECTION("single-atom stream always returns one") {
    StickState one = StickState::from_sticks({1.0}, {{0.0, 1.0}});
    std::vector<double> f1{0.7};
    for (int r = 0; r < 200; ++r) {
      auto st = fixed_factor_stream(one, spec, f1, 1.0);
      REQUIRE(sample_exact(st, rng) == 1);
    }
  }
}

TEST_CASE("exact law against a truncation oracle") {
  // Frozen stream: sticks and factors realized once to negligible residual
  // mass; the sampler replays the same prefix for every draw.
  ModelSpec spec = bounded_spec(1.0, 0.8);
  Philox4x64 rng(804);
  StickState sticks;
  while (sticks.log_tail_mass() > std::log(1e-12)) sticks.extend_one(spec, rng);
  const int realized = sticks.frontier();
  const double y = 0.4;
  const double bound = likelihood_bound(spec);

  std::vector<double> stick_v, factors;
  for (int j = 1; j <= realized; ++j) {
    stick_v.push_back(sticks.stick(j));
    factors.push_back(obs_density(y, sticks.atom(j)));
  }
  const std::vector<double> law = oracle::truncated_law(stick_v, factors);

  const int draws = 100000;
  std::vector<double> hits(realized, 0.0);
  int mean_pairs = 0;
  for (int r = 0; r < draws; ++r) {
    BoundedWeightedStream stream(
        sticks, spec,
        [y](int j, const StickState& s) { return obs_density(y, s.atom(j)); },
        bound);
    int pairs = 0;
    const int j = sample_exact(stream, rng, &pairs);
    mean_pairs += pairs;
    REQUIRE(j <= realized);  // residual below 1e-12 cannot win
    ++hits[j - 1];
  }
  double tv = 0.0;
  for (int j = 0; j < realized; ++j)
    tv += std::abs(hits[j] / draws - law[j]);
  tv *= 0.5;
  REQUIRE(tv < 0.005);
  // termination statistics stay modest for alpha = 1 (soft check, logged)
  INFO("mean realized pairs per draw: " << mean_pairs / double(draws));
  CHECK(mean_pairs / double(draws) < 50.0);
}

TEST_CASE("exact allocation pass") {
  ModelSpec spec = bounded_spec(1.0, 0.6);
  Philox4x64 rng(805);

  SECTION("free-variance model is rejected") {
    ModelSpec free_spec = spec;
    free_spec.fixed_variance.reset();
    std::vector<double> data{0.0, 0.5};
    ChainState s = init_single_cluster(free_spec, data, rng);
    SweepConfig cfg;
    SweepStats stats;
    REQUIRE_THROWS_AS(gibbs_update_allocations_exact(s, cfg, stats, rng),
                      std::domain_error);
  }

  SECTION("a dominant component keeps the datum") {
    StickState sticks = StickState::from_sticks(
        {1.0 - 1e-12}, {{0.0, *spec.fixed_variance}});
    ChainState s(spec, {0.1}, AllocationState(std::vector<int>{1}),
                 std::move(sticks));
    SweepConfig cfg;
    cfg.accelerations = false;
    SweepStats stats;
    int stay = 0;
    for (int r = 0; r < 500; ++r) {
      ChainState copy = s;
      gibbs_update_allocations_exact(copy, cfg, stats, rng);
      stay += copy.alloc.label(0) == 1;
    }
    REQUIRE(stay == 500);
  }

  SECTION("per-datum conditional matches the truncation oracle") {
    // freeze a two-component state, redraw one allocation many times
    StickState sticks;
    sticks.extend_to(12, spec, rng);
    std::vector<int> labels{1, 2, 2};
    std::vector<double> data{0.3, -0.5, 0.8};
    ChainState s(spec, data, AllocationState(labels), sticks);
    SweepConfig cfg;
    cfg.accelerations = false;
    cfg.random_scan = false;

    std::vector<double> stick_v, factors;
    for (int j = 1; j <= sticks.frontier(); ++j) {
      stick_v.push_back(sticks.stick(j));
      factors.push_back(obs_density(data[0], sticks.atom(j)));
    }
    // extend the oracle far enough that its truncation error is negligible
    {
      StickState deep = sticks;
      while (deep.log_tail_mass() > std::log(1e-12)) deep.extend_one(spec, rng);
      stick_v.clear();
      factors.clear();
      for (int j = 1; j <= deep.frontier(); ++j) {
        stick_v.push_back(deep.stick(j));
        factors.push_back(obs_density(data[0], deep.atom(j)));
      }
      sticks = deep;
      s = ChainState(spec, data, AllocationState(labels), sticks);
    }
    const std::vector<double> law = oracle::truncated_law(stick_v, factors);

    const int draws = 100000;
    std::vector<double> hits(law.size() + 1, 0.0);
    const double bound = likelihood_bound(spec);
    for (int r = 0; r < draws; ++r) {
      BoundedWeightedStream stream(
          s.sticks, s.spec,
          [&](int j, const StickState& st) {
            return obs_density(s.data[0], st.atom(j));
          },
          bound);
      const int j = sample_exact(stream, rng);
      ++hits[std::min<std::size_t>(j - 1, law.size())];
    }
    double tv = 0.0;
    for (std::size_t j = 0; j < law.size(); ++j)
      tv += std::abs(hits[j] / draws - law[j]);
    tv = 0.5 * (tv + hits[law.size()] / draws);
    REQUIRE(tv < 0.005);
  }
}

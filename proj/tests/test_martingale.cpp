#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fhill/martingale.hpp"
#include "fhill/sampling.hpp"
#include "fhill/stats.hpp"

using Catch::Approx;
using namespace fhill;

TEST_CASE("s_exact examples") {
  CHECK(s_exact(1, 3, 1.0) == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(s_exact(9, 10, 0.7) == Approx(1.0 / (1.0 + 0.7 / 9.0)).epsilon(1e-15));
  for (std::size_t j : {1u, 7u, 250u, 999u}) CHECK(s_exact(j, 1000, 1.0) == Approx(j / 1000.0).epsilon(1e-13));
  CHECK_THROWS_AS(s_exact(5, 5, 1.0), ArgumentError);
  CHECK_THROWS_AS(s_exact(6, 5, 1.0), ArgumentError);
  CHECK_THROWS_AS(s_exact(0, 5, 1.0), ArgumentError);
  CHECK(s_exact(5, 5, 1.0, true) == 1.0);
}

TEST_CASE("s_exact telescopes to j/k at gamma = 1") {
  RngStream s(3, 0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto k = 2 + static_cast<std::size_t>(s.uniform() * 9999);
    const auto j = 1 + static_cast<std::size_t>(s.uniform() * (k - 1));
    const double exact = static_cast<double>(j) / static_cast<double>(k);
    worst = std::max(worst, std::abs(s_exact(j, k, 1.0) / exact - 1.0));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("MartingaleConfig validation") {
  CHECK_THROWS_AS((MartingaleConfig{0.0, WeightFunction::power(0.25), 10}.validate()), ArgumentError);
  CHECK_THROWS_AS((MartingaleConfig{1.0, WeightFunction::power(0.25), 1}.validate()), ArgumentError);
  CHECK_THROWS_AS((MartingaleConfig{1.0, WeightFunction::zero(5), 10}.validate()), ArgumentError);
}

TEST_CASE("simulate_W") {
  SECTION("zero increments give zero") {
    RngStream s(1, 0);
    CHECK(simulate_W({1.0, WeightFunction::zero(50), 50}, s) == 0.0);
  }
  SECTION("centered: mean within 3 standard errors") {
    const MartingaleConfig cfg{1.0, WeightFunction::power(0.25), 200};
    WSimulator sim(cfg);
    RunningStats st;
    for (std::size_t b = 0; b < 100000; ++b) {
      RngStream s(77, b);
      st.add(sim.draw(s));
    }
    CHECK(std::abs(st.mean()) < 3.0 * st.std_error());
  }
  SECTION("centered across a parameter grid") {
    for (double g : {0.5, 1.0, 2.0}) {
      for (double tau : {0.1, 0.4}) {
        for (std::size_t k : {10u, 300u}) {
          CAPTURE(g, tau, k);
          WSimulator sim({g, WeightFunction::power(tau), k});
          RunningStats st;
          for (std::size_t b = 0; b < 20000; ++b) {
            RngStream s(mix_seed(78, k), b);
            st.add(sim.draw(s));
          }
          CHECK(std::abs(st.mean()) < 4.0 * st.std_error());
        }
      }
    }
  }
}

TEST_CASE("centering_A") {
  SECTION("direct summation at gamma = 1, k = 200") {
    long double sum = 0.0L;
    for (int j = 1; j <= 199; ++j) sum += j * (std::pow(static_cast<long double>(j), 0.25L) -
                                              std::pow(static_cast<long double>(j - 1), 0.25L));
    const double oracle = static_cast<double>(std::pow(199.0L, 0.25L) - sum / 200.0L);
    const double a = centering_A({1.0, WeightFunction::power(0.25), 200});
    CHECK(a == Approx(oracle).epsilon(1e-12));
    CHECK(std::abs(a - 3.0) < 0.05);
  }
  SECTION("zero weight") { CHECK(centering_A({1.0, WeightFunction::zero(20), 20}) == 0.0); }
  SECTION("k = 2") {
    // f(1) - Delta f(1) s_{1,2}
    const double g = 0.8;
    CHECK(centering_A({g, WeightFunction::power(0.3), 2}) == Approx(1.0 - 1.0 / (1.0 + g)).epsilon(1e-15));
  }
}

TEST_CASE("observed_W") {
  const MartingaleConfig cfg{1.0, WeightFunction::power(0.25), 20};
  SECTION("constant sample with y0 above the maximum gives A") {
    const SampleData x(std::vector<double>(50, 2.0));
    CHECK(observed_W(x, cfg, 1.0) == Approx(centering_A(cfg)).epsilon(1e-15));
  }
  SECTION("zero weights give zero") {
    RngStream s(9, 0);
    const auto x = sample_model(find_model("weibull1"), 50, s);
    CHECK(observed_W(x, {1.0, WeightFunction::zero(20), 20}, 1.0) == 0.0);
  }
  SECTION("k must leave room for X_{n-k,n}") {
    const SampleData x(std::vector<double>(20, 2.0));
    CHECK_THROWS_AS(observed_W(x, cfg, 1.0), ArgumentError);
  }
}

TEST_CASE("observed_W on Weibull data has the law of simulate_W") {
  // smaller version of the full-size check run by the acceptance suite
  const std::size_t n = 1000, k = 200, reps = 1000;
  const MartingaleConfig cfg{1.0, WeightFunction::power(0.25), k};
  const auto model = find_model("weibull1");
  WSimulator sim(cfg);
  std::vector<double> obs(reps), null(reps);
  for (std::size_t b = 0; b < reps; ++b) {
    RngStream a(101, b), c(102, b);
    obs[b] = observed_W(sample_model(model, n, a), cfg, 1.0);
    null[b] = sim.draw(c);
  }
  CHECK(ks_two_sample(obs, null) < ks_two_sample_critical(reps, reps, 0.01));
}

TEST_CASE("trajectory recursion agrees with the suffix-sum evaluation") {
  const double g = 1.3;
  const auto f = WeightFunction::power(0.25);
  RngStream s(13, 0);
  const auto e = exp_stream(s, 400);
  const auto path = trajectory_from(g, f, e);
  for (std::size_t k : {1u, 2u, 17u, 150u, 400u}) {
    // W_k on the path uses E_1..E_k, which is the public process at k+1.
    WSimulator sim({g, f, k + 1});
    const double direct = sim.evaluate(std::span<const double>(e).first(k));
    CHECK(path[k - 1].w == Approx(direct).epsilon(1e-10).margin(1e-12));
    CHECK(path[k - 1].scaled == Approx(path[k - 1].w * (1.0 + g / k)).epsilon(1e-15));
  }
}

TEST_CASE("mean |W_k| does not grow along the path") {
  const auto f = WeightFunction::power(0.25);
  const std::vector<std::size_t> grid{250, 500, 1000, 2000, 4000};
  std::vector<RunningStats> st(grid.size());
  for (std::size_t b = 0; b < 2000; ++b) {
    RngStream s(211, b);
    const auto path = simulate_trajectory(1.0, f, 4000, s);
    for (std::size_t i = 0; i < grid.size(); ++i) st[i].add(std::abs(path[grid[i] - 1].w));
  }
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(st[i].mean() <= 1.1 * st[i - 1].mean());
}

TEST_CASE("conditional_mean_check") {
  SECTION("matches gamma(k+1) W_k") {
    const MartingaleConfig cfg{1.0, WeightFunction::power(0.25), 100};
    RngStream ps(17, 0), es(17, 1);
    const auto prefix = exp_stream(ps, 100);
    const auto r = conditional_mean_check(cfg, prefix, 1'000'000, es);
    CHECK(r.predicted == Approx(r.w_k / (1.0 + 1.0 / 101.0)).epsilon(1e-14));
    CHECK(std::abs(r.empirical - r.predicted) < 4.0 * r.std_error);
  }
  SECTION("zero weights give zero on both sides") {
    RngStream ps(18, 0), es(18, 1);
    const auto prefix = exp_stream(ps, 30);
    const auto r = conditional_mean_check({2.0, WeightFunction::zero(31), 30}, prefix, 100, es);
    CHECK(r.empirical == 0.0);
    CHECK(r.predicted == 0.0);
  }
  SECTION("prefix length must equal k") {
    RngStream s(19, 0);
    const auto prefix = exp_stream(s, 10);
    CHECK_THROWS_AS(conditional_mean_check({1.0, WeightFunction::power(0.25), 11}, prefix, 10, s),
                    ArgumentError);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "fhill/martingale.hpp"
#include "fhill/moments.hpp"
#include "fhill/rng.hpp"
#include "fhill/stats.hpp"

using Catch::Approx;
using namespace fhill;

namespace {

// S_{j,k} = exp(-gamma sum_{h=j}^{k-1} E_h / h), drawn directly.
std::vector<double> draw_S(RngStream& s, std::size_t k, double gamma) {
  std::vector<double> out(k, 1.0);
  double r = 0.0;
  for (std::size_t h = k - 1; h >= 1; --h) {
    r += s.exponential() / static_cast<double>(h);
    out[h] = std::exp(-gamma * r);
  }
  return out;
}

long double power_sum(std::size_t j, std::size_t k, double b) {
  long double s = 0.0L;
  for (std::size_t h = j; h < k; ++h) s += std::pow(static_cast<long double>(h), -static_cast<long double>(b));
  return s;
}

}  // namespace

TEST_CASE("moment_exact examples") {
  CHECK(moment_exact(1, 3, 2, 1.0) == Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(moment_exact(99, 100, 2, 1.0) == Approx(1.0 / (1.0 + 2.0 / 99.0)).epsilon(1e-15));
  for (double g : {0.25, 1.0, 3.0}) CHECK(moment_exact(7, 60, 1, g) == Approx(s_exact(7, 60, g)).epsilon(1e-14));
  CHECK_THROWS_AS(moment_exact(0, 5, 1, 1.0), ArgumentError);
  CHECK_THROWS_AS(moment_exact(5, 5, 1, 1.0), ArgumentError);
}

TEST_CASE("variance_exact") {
  CHECK(variance_exact(1, 2, 1.0) == Approx(1.0 / 12.0).epsilon(1e-14));
  for (std::size_t j : {1u, 10u, 90u}) {
    const double v = variance_exact(j, 100, 0.7);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    const double s = s_exact(j, 100, 0.7);
    CHECK(v == Approx(moment_exact(j, 100, 2, 0.7) - s * s).epsilon(1e-10));
  }
}

TEST_CASE("covariance_exact") {
  // j + ell = k - 1: single-factor variance times s_{j,j+ell}
  const double single = 1.0 / (1.0 + 2.0 / 9.0) - std::pow(1.0 / (1.0 + 1.0 / 9.0), 2);
  CHECK(covariance_exact(4, 5, 10, 1.0) == Approx(single * s_exact(4, 9, 1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(covariance_exact(4, 0, 10, 1.0), ArgumentError);
  CHECK_THROWS_AS(covariance_exact(4, 6, 10, 1.0), ArgumentError);
  // Cauchy-Schwarz
  for (std::size_t j : {1u, 5u, 30u}) {
    for (std::size_t ell : {1u, 10u, 50u}) {
      const double c = covariance_exact(j, ell, 100, 1.5);
      CHECK(c * c <= variance_exact(j, 100, 1.5) * variance_exact(j + ell, 100, 1.5) * (1 + 1e-12));
    }
  }
}

TEST_CASE("Monte Carlo variance and covariance") {
  RngStream s(4242, 0);
  RunningStats v10, prod;
  const std::size_t reps = 1'000'000;
  std::vector<double> a(reps), b(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto S = draw_S(s, 100, 1.0);
    a[r] = S[10];
    b[r] = S[30];
  }
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / reps;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / reps;
  for (std::size_t r = 0; r < reps; ++r) {
    v10.add((a[r] - ma) * (a[r] - ma));
    prod.add((a[r] - ma) * (b[r] - mb));
  }
  CHECK(std::abs(v10.mean() - variance_exact(10, 100, 1.0)) < 4.0 * v10.std_error());
  CHECK(std::abs(prod.mean() - covariance_exact(10, 20, 100, 1.0)) < 4.0 * prod.std_error());
}

TEST_CASE("expansion constants") {
  const auto c = expansion_constants(0.1);
  CHECK(c.u0 > 0.0);
  CHECK(c.u0 <= 0.5);
  for (int i = 1; i <= 1000; ++i) {
    const double u = c.u0 * i / 1000.0;
    const double th = log_expansion_theta(u);
    REQUIRE(th >= c.a1 - 1e-12);
    REQUIRE(th <= c.a2 + 1e-12);
  }
}

TEST_CASE("moment_approx") {
  SECTION("contains the exact moment on the grid") {
    for (std::size_t j : {50u, 100u, 500u}) {
      for (unsigned m : {1u, 2u}) {
        for (double g : {0.25, 0.5, 1.0}) {
          CAPTURE(j, m, g);
          const auto b = moment_approx(j, 1000, m, g);
          CHECK(b.contains(moment_exact(j, 1000, m, g)));
          CHECK(b.hi <= 1.0);
        }
      }
    }
  }
  SECTION("nominal over exact tends to 1") {
    const auto b = moment_approx(10000, 100000, 1, 1.0);
    CHECK(std::abs(b.nominal / moment_exact(10000, 100000, 1, 1.0) - 1.0) < 0.01);
  }
  SECTION("gamma = 1, m = 1 contains j/k") {
    const auto b = moment_approx(200, 1000, 1, 1.0);
    CHECK(b.nominal == Approx(200.0 / 999.0));
    CHECK(b.contains(0.2));
  }
  SECTION("below the validity threshold") {
    const auto t = validity_threshold(2, 1.0);
    REQUIRE(t > 1);
    try {
      moment_approx(t - 1, 1000, 2, 1.0);
      FAIL("expected ValidityError");
    } catch (const ValidityError& e) {
      CHECK(static_cast<std::size_t>(e.threshold()) == t);
    }
  }
}

TEST_CASE("variance_approx") {
  for (std::size_t j : {50u, 100u, 500u}) {
    for (double g : {0.25, 0.5, 1.0}) {
      const auto b = variance_approx(j, 1000, g);
      CHECK(b.contains(variance_exact(j, 1000, g)));
      CHECK(b.hi <= 1.0);
    }
  }
  // width ~ 1/j at fixed j/k
  std::vector<double> lj, lw;
  for (std::size_t j : {100u, 1000u, 10000u}) {
    lj.push_back(std::log(static_cast<double>(j)));
    lw.push_back(std::log(variance_approx(j, 10 * j, 1.0).width()));
  }
  const double slope = (lw.back() - lw.front()) / (lj.back() - lj.front());
  CHECK(std::abs(slope + 1.0) < 0.1);
}

TEST_CASE("harmonic bounds") {
  SECTION("b = 1 example") {
    const auto [lo, hi] = harmonic_bounds(1, 11, 1.0);
    CHECK(lo == Approx(std::log(10.0) + 0.1).epsilon(1e-12));
    CHECK(hi == Approx(std::log(10.0) + 1.0).epsilon(1e-12));
    const double h10 = static_cast<double>(power_sum(1, 11, 1.0));
    CHECK(h10 == Approx(2.9290).margin(1e-4));
    CHECK(lo <= h10);
    CHECK(h10 <= hi);
  }
  SECTION("b = 2 on a grid") {
    for (std::size_t j : {1u, 3u, 10u, 100u}) {
      for (std::size_t k : {j + 1, j + 2, 2 * j + 5, 50 * j + 7}) {
        const auto [lo, hi] = inverse_square_bounds(j, k);
        const double s = static_cast<double>(power_sum(j, k, 2.0));
        CHECK(lo <= s * (1 + 1e-12));
        CHECK(s <= hi * (1 + 1e-12));
      }
    }
  }
  SECTION("single summand") {
    const auto [lo, hi] = harmonic_bounds(9, 10, 1.5);
    const double term = std::pow(9.0, -1.5);
    CHECK(lo == Approx(term));
    CHECK(hi == Approx(term));
  }
  SECTION("random triples, both signs of b") {
    RngStream s(808, 0);
    for (int i = 0; i < 1000; ++i) {
      const auto k = 2 + static_cast<std::size_t>(s.uniform() * 3000);
      const auto j = 1 + static_cast<std::size_t>(s.uniform() * (k - 1));
      const double b = 6.0 * s.uniform() - 3.0;
      CAPTURE(j, k, b);
      const auto [lo, hi] = harmonic_bounds(j, k, b);
      const double sum = static_cast<double>(power_sum(j, k, b));
      CHECK(lo <= sum * (1 + 1e-12));
      CHECK(sum <= hi * (1 + 1e-12));
    }
  }
  SECTION("harmonic excess") {
    for (std::size_t j : {1u, 5u, 40u}) {
      const std::size_t k = 100;
      const auto [lo, hi] = harmonic_excess_bounds(j, k);
      const double ex = static_cast<double>(power_sum(j, k, 1.0)) - std::log((k - 1.0) / j);
      CHECK(lo <= ex);
      CHECK(ex <= hi);
    }
  }
}

TEST_CASE("k1_diagnostic") {
  std::vector<std::size_t> grid{100, 200, 500, 1000, 2000, 5000, 10000, 20000, 50000, 100000};
  SECTION("tau = 1/4 is bounded") {
    const auto r = k1_diagnostic(WeightFunction::power(0.25), 1.0, 10, grid);
    CHECK(std::isfinite(r.max_value));
    CHECK(r.bounded(0.02));
  }
  SECTION("tau = 1 grows like sqrt(k)") {
    const auto r = k1_diagnostic(WeightFunction::power(1.0), 1.0, 10, grid);
    CHECK(std::abs(r.terminal_slope - 0.5) < 0.05);
  }
  SECTION("zero weight") {
    const auto r = k1_diagnostic(WeightFunction::zero(100000), 1.0, 10, grid);
    for (double v : r.values) CHECK(v == 0.0);
  }
  SECTION("bad grid") {
    std::vector<std::size_t> bad{10, 5};
    CHECK_THROWS_AS(k1_diagnostic(WeightFunction::power(0.25), 1.0, 1, bad), ArgumentError);
  }
}

TEST_CASE("regime_diagnostics") {
  // tau = 1/4: terms j^{-3/2}; the added tail between the two truncations is
  // bracketed by the integrals of x^{-3/2} over [10^4+1, 10^5+1] and [10^4, 10^5]
  const auto a = regime_diagnostics(WeightFunction::power(0.25), 10000);
  const auto b = regime_diagnostics(WeightFunction::power(0.25), 100000);
  const auto tail = [](double lo, double hi) { return 2.0 * (1.0 / std::sqrt(lo) - 1.0 / std::sqrt(hi)); };
  CHECK(b.a2_partial - a.a2_partial >= tail(10001.0, 100001.0));
  CHECK(b.a2_partial - a.a2_partial <= tail(10000.0, 100000.0));
  CHECK(b.a2_partial < 2.0 * 1.0 + 1.0);  // sum_j j^{-3/2} < 1 + integral from 1
  // tau = 1: every term is 1, so the partial sum is k and diverges
  const auto h4 = regime_diagnostics(WeightFunction::power(1.0), 10000);
  const auto h5 = regime_diagnostics(WeightFunction::power(1.0), 100000);
  CHECK(h4.a2_partial == Approx(10000.0));
  CHECK(h5.a2_partial == Approx(100000.0));
  CHECK(h5.bn == Approx(1.0 / std::sqrt(100000.0)));
  CHECK(h5.bn < h4.bn);
  const auto z = regime_diagnostics(WeightFunction::zero(10), 10);
  CHECK(z.a2_partial == 0.0);
  CHECK(z.bn == 0.0);
}

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fhill/stats.hpp"
#include "fhill/tables.hpp"

using Catch::Approx;
using namespace fhill;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("fhill_tables_" + name)).string();
}

NullTable tiny(std::vector<double> v) {
  NullTable t;
  t.gamma = 1.0;
  t.weight = "power:0.25";
  t.tau = 0.25;
  t.k = 10;
  t.reps = v.size();
  t.values = std::move(v);
  return t;
}

const auto kF = WeightFunction::power(0.25);

}  // namespace

TEST_CASE("tabulate_null") {
  SECTION("single replicate") {
    const auto t = tabulate_null(1.0, kF, 100, 1, 5);
    CHECK(t.values.size() == 1);
    CHECK(t.reps == 1);
  }
  SECTION("centered, sorted and inside the support") {
    const auto t = tabulate_null(1.0, kF, 2000, 1000, 6);
    CHECK(std::is_sorted(t.values.begin(), t.values.end()));
    RunningStats st;
    for (double v : t.values) st.add(v);
    CHECK(std::abs(st.mean()) < 4.0 * st.std_error());
    CHECK(t.values.front() >= -0.55);
    CHECK(t.values.back() <= 0.55);
  }
  SECTION("worker count does not change the result") {
    CHECK(tabulate_null(1.0, kF, 300, 257, 8, 1) == tabulate_null(1.0, kF, 300, 257, 8, 5));
  }
  SECTION("reps = 0 rejected") { CHECK_THROWS_AS(tabulate_null(1.0, kF, 10, 0, 1), ArgumentError); }
}

TEST_CASE("ecdf_eval and abs_prob") {
  const auto t = tiny({-0.3, -0.1, 0.05, 0.2, 0.4});
  CHECK(ecdf_eval(t, -1.0) == 0.0);
  CHECK(ecdf_eval(t, 0.4) == 1.0);
  CHECK(ecdf_eval(t, 7.0) == 1.0);
  CHECK(ecdf_eval(t, 0.05) == Approx(3.0 / 5.0));  // (reps+1)/(2 reps)
  CHECK(abs_prob(t, 0.0) == 0.0);
  CHECK(abs_prob(t, 0.2) == Approx(3.0 / 5.0));
  CHECK(abs_prob(t, -0.2) == Approx(3.0 / 5.0));
}

TEST_CASE("quantile") {
  const auto t = tiny({-0.3, -0.1, 0.05, 0.2, 0.4});
  for (std::size_t i = 1; i <= 5; ++i) CHECK(quantile(t, (i - 1) / 5.0 + 1e-9) == t.values[i - 1]);
  CHECK(quantile(t, 0.6) == 0.05);
  CHECK_THROWS_AS(quantile(t, 0.0), ArgumentError);
  CHECK_THROWS_AS(quantile(t, 1.0), ArgumentError);
  // Galois property: G(x) >= p <=> x >= quantile(p)
  const auto big = tabulate_null(1.0, kF, 200, 999, 9);
  for (double p : {0.01, 0.1, 0.37, 0.5, 0.9, 0.999}) {
    const double q = quantile(big, p);
    CHECK(ecdf_eval(big, q) >= p);
    CHECK(ecdf_eval(big, std::nextafter(q, -1.0)) < p);
  }
}

TEST_CASE("ECDF is monotone") {
  const auto t = tabulate_null(1.0, kF, 100, 500, 10);
  double prev = 0.0;
  for (double x = -0.6; x <= 0.6; x += 0.001) {
    const double g = ecdf_eval(t, x);
    REQUIRE(g >= prev);
    prev = g;
  }
}

TEST_CASE("stability_check") {
  CHECK(stability_check(1.0, kF, {2000, 2000}, 200, 3)[0] == 0.0);
  const auto far = stability_check(1.0, kF, {50, 2000}, 1000, 3);
  const auto near = stability_check(1.0, kF, {2000, 3000}, 1000, 3);
  CHECK(far[0] > near[0]);
  CHECK_THROWS_AS(stability_check(1.0, kF, {2000}, 10, 3), ArgumentError);
}

TEST_CASE("tables from independent seeds agree") {
  const auto a = tabulate_null(1.0, kF, 2000, 1000, 111);
  const auto b = tabulate_null(1.0, kF, 2000, 1000, 222);
  CHECK(ks_two_sample(a.values, b.values) < ks_two_sample_critical(1000, 1000, 0.01));
}

TEST_CASE("table files") {
  SECTION("round trip") {
    const auto t = tabulate_null(0.5, WeightFunction::power(0.4), 150, 77, 12);
    const auto path = temp_path("rt.csv");
    save_table(t, path);
    CHECK(load_table(path) == t);
    std::filesystem::remove(path);
  }
  SECTION("hand-written three values") {
    std::istringstream in("# gamma=1\n# tau=0.25\n# k=2000\n-0.1\n0\n0.2\n");
    const auto t = parse_table(in);
    CHECK(t.reps == 3);
    CHECK(t.values == std::vector<double>{-0.1, 0.0, 0.2});
    CHECK(t.tau == 0.25);
  }
  SECTION("truncated file") {
    const auto text = format_table(tabulate_null(1.0, kF, 50, 20, 13));
    std::istringstream in(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(parse_table(in), ParseError);
  }
  SECTION("tampered value") {
    auto text = format_table(tiny({-0.3, -0.1, 0.05, 0.2, 0.4}));
    text.replace(text.find("\n0.4") + 1, 3, "0.5");
    std::istringstream in(text);
    CHECK_THROWS_AS(parse_table(in), IntegrityError);
  }
  SECTION("unsorted values") {
    std::istringstream in("# gamma=1\n# tau=0.25\n# k=10\n0.2\n0.1\n");
    CHECK_THROWS_AS(parse_table(in), ParseError);
  }
  SECTION("garbage line reports its line number") {
    std::istringstream in("# gamma=1\n# tau=0.25\n# k=10\n0.1\nxyz\n");
    try {
      parse_table(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
    }
  }
  SECTION("unreadable path") { CHECK_THROWS_AS(load_table(temp_path("missing.csv")), IoError); }
}

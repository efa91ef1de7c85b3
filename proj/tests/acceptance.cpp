// Runs the ten acceptance criteria at full size and prints one line per
// criterion. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "fhill/diagnostics.hpp"

namespace {

struct Criterion {
  int id;
  const char* suite;
  const char* title;
};

constexpr Criterion kCriteria[] = {
    {1, "moments-mc", "closed-form moments vs 10^6-replication Monte Carlo"},
    {2, "telescoping", "s_exact(j,k,1) = j/k on 1000 random pairs"},
    {3, "conditional-mean", "conditional expectation of W_{k+1} on 20 prefixes"},
    {4, "theorem2-distribution", "observed W* vs simulated W, two-sample KS at 1%"},
    {5, "stability", "null tables stable across k = 2000, 3000, 5000"},
    {6, "support", "99% of tabulated values inside [-0.55, 0.55]"},
    {7, "table1", "rejection rates over the nine reference models"},
    {8, "moments-grid", "bracket and power-sum bound soundness"},
    {9, "k1-boundedness", "(K1) boundedness and tau = 1 growth"},
    {10, "determinism", "byte-identical tables for 1 and many workers"},
};

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 20261016;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);
  const fhill::SuiteOptions opt{true, 0};
  int failed = 0;
  for (const auto& c : kCriteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<fhill::CheckRecord> records;
    std::string error;
    try {
      records = fhill::run_suite({c.suite}, seed, opt);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::size_t ok = 0;
    for (const auto& r : records) ok += r.passed ? 1 : 0;
    const bool pass = error.empty() && !records.empty() && ok == records.size();
    failed += pass ? 0 : 1;
    for (const auto& r : records) {
      if (!r.passed) std::cout << "    " << fhill::format_check_record(r) << '\n';
    }
    std::printf("%s criterion %2d [%s] %s: %zu/%zu records (%.1fs)%s%s\n", pass ? "PASS" : "FAIL", c.id,
                c.suite, c.title, ok, records.size(), secs, error.empty() ? "" : " error: ",
                error.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/10 criteria passed (seed %llu)\n", 10 - failed, static_cast<unsigned long long>(seed));
  return failed == 0 ? 0 : 1;
}

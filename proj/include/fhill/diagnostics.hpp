#ifndef FHILL_DIAGNOSTICS_HPP
#define FHILL_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "error.hpp"
#include "martingale.hpp"
#include "moments.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "stats.hpp"
#include "tables.hpp"
#include "testing.hpp"

// Verification suites: Monte Carlo versus closed form, bracket containment,
// (K1) scans, distributional equality, tabulation stability, the reference
// model study and reproducibility. Each suite is a pure function of
// (master_seed, options) and returns its records in a fixed order.

namespace fhill {

/// One verification outcome. passed <=> expected_lo - tolerance <= observed <=
/// expected_hi + tolerance.
struct CheckRecord {
  std::string suite;
  std::string name;
  std::string parameters;
  double observed;
  double expected_lo;
  double expected_hi;
  double tolerance;
  bool passed;
};

inline CheckRecord make_record(std::string suite, std::string name, std::string parameters,
                               double observed, double lo, double hi, double tolerance = 0.0) {
  const bool ok = std::isfinite(observed) && observed >= lo - tolerance && observed <= hi + tolerance;
  return {std::move(suite), std::move(name), std::move(parameters), observed, lo, hi, tolerance, ok};
}

struct SuiteOptions {
  bool deep = false;    ///< full-size Monte Carlo oracles (10^6 replications)
  unsigned workers = 0;
};

namespace detail {

inline std::string params(std::initializer_list<std::pair<const char*, std::string>> kv) {
  std::string s;
  for (const auto& [k, v] : kv) {
    if (!s.empty()) s += ' ';
    s += k;
    s += '=';
    s += v;
  }
  return s;
}

inline std::string num(double v) { return format_real(v); }

// E(S_{j,k}^m) for j in {5,10,50,100} (j < k), k in {100,1000}, m in {1,2},
// gamma in {0.25,0.5,1}, plus Var(S_{10,100}) and cov(S_{10,100}, S_{30,100})
// at gamma = 1. All cells of one k share each draw of E_1..E_{k-1}.
inline std::vector<CheckRecord> suite_moments_mc(std::uint64_t seed, const SuiteOptions& opt) {
  const std::string suite = "moments-mc";
  const std::size_t reps = opt.deep ? 1000000 : 100000;
  const std::vector<std::size_t> js = {5, 10, 50, 100};
  const std::vector<double> gammas = {0.25, 0.5, 1.0};
  std::vector<CheckRecord> out;
  for (std::size_t k : {std::size_t{100}, std::size_t{1000}}) {
    std::vector<std::size_t> jk;
    for (auto j : js) {
      if (j < k) jk.push_back(j);
    }
    const std::size_t cells = jk.size() * gammas.size() * 2;
    const bool with_cov = (k == 100);
    const double s10 = s_exact(10, 100, 1.0), s30 = s_exact(30, 100, 1.0);
    const std::size_t block = 10000;
    const std::size_t blocks = (reps + block - 1) / block;
    std::vector<std::vector<RunningStats>> acc(blocks, std::vector<RunningStats>(cells + 2));
    parallel_for(blocks, opt.workers, [&](std::size_t b) {
      RngStream stream(mix_seed(seed, k), b);
      std::vector<double> suffix(k + 1, 0.0);
      auto& a = acc[b];
      const std::size_t count = std::min(block, reps - b * block);
      const std::size_t jmin = jk.front();
      for (std::size_t r = 0; r < count; ++r) {
        double run = 0.0;
        for (std::size_t h = k - 1; h >= jmin; --h) {
          run += stream.exponential() / static_cast<double>(h);
          suffix[h] = run;
        }
        std::size_t c = 0;
        for (auto j : jk) {
          for (double g : gammas) {
            const double s = std::exp(-g * suffix[j]);
            a[c++].add(s);
            a[c++].add(s * s);
          }
        }
        if (with_cov) {
          const double x = std::exp(-suffix[10]) - s10, y = std::exp(-suffix[30]) - s30;
          a[cells].add(x * x);
          a[cells + 1].add(x * y);
        }
      }
    });
    std::vector<RunningStats> total(cells + 2);
    for (const auto& a : acc) {
      for (std::size_t c = 0; c < total.size(); ++c) total[c].merge(a[c]);
    }
    std::size_t c = 0;
    for (auto j : jk) {
      for (double g : gammas) {
        for (unsigned m = 1; m <= 2; ++m, ++c) {
          const double exact = moment_exact(j, k, m, g);
          out.push_back(make_record(
              suite, "E(S^m) Monte Carlo vs closed form",
              params({{"j", std::to_string(j)}, {"k", std::to_string(k)}, {"m", std::to_string(m)},
                      {"gamma", num(g)}, {"reps", std::to_string(reps)}}),
              total[c].mean(), exact, exact, 4.0 * total[c].std_error()));
        }
      }
    }
    if (with_cov) {
      const double var = variance_exact(10, 100, 1.0);
      out.push_back(make_record(suite, "Var(S) Monte Carlo vs closed form",
                                params({{"j", "10"}, {"k", "100"}, {"gamma", "1"},
                                        {"reps", std::to_string(reps)}}),
                                total[cells].mean(), var, var, 4.0 * total[cells].std_error()));
      const double cov = covariance_exact(10, 20, 100, 1.0);
      out.push_back(make_record(suite, "cov(S_j, S_j+l) Monte Carlo vs closed form",
                                params({{"j", "10"}, {"ell", "20"}, {"k", "100"}, {"gamma", "1"},
                                        {"reps", std::to_string(reps)}}),
                                total[cells + 1].mean(), cov, cov,
                                4.0 * total[cells + 1].std_error()));
    }
  }
  return out;
}

inline std::vector<CheckRecord> suite_telescoping(std::uint64_t seed, const SuiteOptions&) {
  RngStream stream(seed, 0);
  double worst = 0.0;
  std::string where;
  for (int i = 0; i < 1000; ++i) {
    auto a = static_cast<std::size_t>(1 + stream.uniform() * 10000.0);
    auto b = static_cast<std::size_t>(1 + stream.uniform() * 10000.0);
    a = std::min<std::size_t>(a, 10000);
    b = std::min<std::size_t>(b, 10000);
    if (a == b) b = (a == 10000) ? a - 1 : a + 1;
    const std::size_t j = std::min(a, b), k = std::max(a, b);
    const double exact = static_cast<double>(j) / static_cast<double>(k);
    const double rel = std::abs(s_exact(j, k, 1.0) - exact) / exact;
    if (rel > worst) {
      worst = rel;
      where = params({{"j", std::to_string(j)}, {"k", std::to_string(k)}});
    }
  }
  return {make_record("telescoping", "max relative error of s(j,k,1) vs j/k over 1000 pairs",
                      "worst " + where, worst, 0.0, 1e-12)};
}

inline std::vector<CheckRecord> suite_conditional_mean(std::uint64_t seed, const SuiteOptions& opt) {
  const std::size_t extensions = opt.deep ? 1000000 : 100000;
  const MartingaleConfig config{1.0, WeightFunction::power(0.25), 100};
  std::vector<CheckRecord> out(20);
  parallel_for(20, opt.workers, [&](std::size_t i) {
    RngStream prefix_stream(mix_seed(seed, 1), i);
    const auto prefix = exp_stream(prefix_stream, config.k);
    RngStream ext_stream(mix_seed(seed, 2), i);
    const auto res = conditional_mean_check(config, prefix, extensions, ext_stream);
    out[i] = make_record("conditional-mean", "E(W_{k+1} | F_k) vs gamma(k+1) W_k",
                         params({{"prefix", std::to_string(i)}, {"gamma", "1"}, {"tau", "0.25"},
                                 {"k", "100"}, {"extensions", std::to_string(extensions)}}),
                         res.empirical, res.predicted, res.predicted, 4.0 * res.std_error);
  });
  return out;
}

inline std::vector<CheckRecord> suite_theorem2(std::uint64_t seed, const SuiteOptions& opt) {
  const std::size_t reps = 1000, n = 10000, k = 2000;
  const auto f = WeightFunction::power(0.25);
  const MartingaleConfig config{1.0, f, k};
  const auto model = find_model("weibull1", 1.0);
  std::vector<double> observed(reps);
  parallel_for(reps, opt.workers, [&](std::size_t i) {
    RngStream stream(mix_seed(seed, 3), i);
    observed[i] = observed_W(sample_model(model, n, stream), config, 1.0);
  });
  const auto table = tabulate_null(1.0, f, k, reps, mix_seed(seed, 4), opt.workers);
  const double d = ks_two_sample(observed, table.values);
  return {make_record("theorem2-distribution",
                      "two-sample KS: observed W* on pure Weibull data vs simulated W",
                      params({{"n", std::to_string(n)}, {"k", std::to_string(k)}, {"gamma", "1"},
                              {"tau", "0.25"}, {"y0", "1"}, {"reps", std::to_string(reps)},
                              {"level", "0.01"}}),
                      d, 0.0, ks_two_sample_critical(reps, reps, 0.01))};
}

inline constexpr double kStabilityThreshold = 0.08;

inline std::vector<CheckRecord> suite_stability(std::uint64_t seed, const SuiteOptions& opt) {
  const std::vector<std::size_t> ks = {2000, 3000, 5000};
  const auto d = stability_check(1.0, WeightFunction::power(0.25), ks, 1000, seed, opt.workers);
  std::vector<CheckRecord> out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.push_back(make_record("stability", "KS distance between consecutive tables",
                              params({{"k_pair", std::to_string(ks[i]) + "/" + std::to_string(ks[i + 1])},
                                      {"gamma", "1"}, {"tau", "0.25"}, {"reps", "1000"}}),
                              d[i], 0.0, kStabilityThreshold));
  }
  return out;
}

inline std::vector<CheckRecord> suite_support(std::uint64_t seed, const SuiteOptions& opt) {
  const auto t = tabulate_null(1.0, WeightFunction::power(0.25), 2000, 1000,
                               stability_seed(seed, 2000), opt.workers);
  const auto inside = std::count_if(t.values.begin(), t.values.end(),
                                    [](double v) { return v >= -0.55 && v <= 0.55; });
  const double share = static_cast<double>(inside) / static_cast<double>(t.values.size());
  return {make_record("support", "share of tabulated W in [-0.55, 0.55]",
                      params({{"gamma", "1"}, {"tau", "0.25"}, {"k", "2000"}, {"reps", "1000"},
                              {"min", num(t.values.front())}, {"max", num(t.values.back())}}),
                      share, 0.99, 1.0)};
}

inline std::vector<CheckRecord> suite_table1(std::uint64_t seed, const SuiteOptions& opt) {
  Table1Options o;
  o.workers = opt.workers;
  const auto report = reproduce_table1(seed, 200, std::nullopt, o);
  const std::string suite = "table1";
  std::vector<CheckRecord> out;
  auto rate = [&](const std::string& id) {
    for (const auto& r : report.rows) {
      if (r.model == id) return r.rejection_rate;
    }
    throw LookupError(id);
  };
  const std::string p = params({{"n", "300"}, {"k", "200"}, {"runs", "200"}, {"level", "0.05"},
                                {"table_k", std::to_string(report.table.k)}});
  out.push_back(make_record(suite, "weibull1 rejection rate", p, rate("weibull1"), 0.0, 0.15));
  out.push_back(make_record(suite, "pareto rejection rate", p, rate("pareto"), 0.95, 1.0));
  out.push_back(make_record(suite, "exponential rejection rate", p, rate("exponential"), 0.95, 1.0));
  std::string rates;
  for (int q = 4; q <= 9; ++q) rates += (q > 4 ? "/" : "") + num(rate("weibull2-q" + std::to_string(q)));
  out.push_back(make_record(suite, "increases of rejection rate along q=4..9",
                            p + " rates=" + rates,
                            static_cast<double>(perturbation_inversions(report)), 0.0, 1.0));
  return out;
}

inline std::vector<CheckRecord> suite_moments_grid(std::uint64_t seed, const SuiteOptions&) {
  const std::string suite = "moments-grid";
  std::size_t checked = 0, violations = 0;
  std::string first_violation;
  auto note = [&](bool ok, const std::string& what) {
    ++checked;
    if (!ok) {
      ++violations;
      if (first_violation.empty()) first_violation = what;
    }
  };
  for (double eps : {0.1, 0.5, 1.0}) {
    for (double g : {0.25, 0.5, 1.0, 2.0}) {
      for (std::size_t k : {std::size_t{100}, std::size_t{1000}, std::size_t{100000}}) {
        for (unsigned m = 1; m <= 3; ++m) {
          const std::size_t t = validity_threshold(m, g, eps);
          for (std::size_t j : {t, 2 * t, std::size_t{50}, std::size_t{100}, std::size_t{500},
                                k / 2, k - 2, k - 1}) {
            if (j < t || j + 1 > k) continue;
            const auto br = moment_approx(j, k, m, g, eps);
            const double exact = moment_exact(j, k, m, g);
            note(br.contains(exact) && br.lo <= br.nominal && br.nominal <= br.hi,
                 params({{"op", "moment_approx"}, {"j", std::to_string(j)}, {"k", std::to_string(k)},
                         {"m", std::to_string(m)}, {"gamma", num(g)}, {"eps", num(eps)}}));
            if (m == 1 && j >= std::max(t, validity_threshold(2, g, eps))) {
              const auto vb = variance_approx(j, k, g, eps);
              const double v = variance_exact(j, k, g);
              note(vb.contains(v) && vb.hi <= 1.0,
                   params({{"op", "variance_approx"}, {"j", std::to_string(j)},
                           {"k", std::to_string(k)}, {"gamma", num(g)}, {"eps", num(eps)}}));
            }
          }
        }
      }
    }
  }
  std::vector<CheckRecord> out;
  out.push_back(make_record(suite, "bracket containment violations",
                            params({{"checked", std::to_string(checked)}}) +
                                (first_violation.empty() ? "" : " first: " + first_violation),
                            static_cast<double>(violations), 0.0, 0.0));

  RngStream stream(seed, 0);
  std::size_t hv = 0;
  std::string first_h;
  for (int i = 0; i < 1000; ++i) {
    const auto j = static_cast<std::size_t>(1 + stream.uniform() * 5000.0);
    const auto k = j + 1 + static_cast<std::size_t>(stream.uniform() * 5000.0);
    const double b = -3.0 + 6.0 * stream.uniform();
    CompensatedSum direct;
    for (std::size_t h = j; h < k; ++h) direct.add(std::pow(static_cast<double>(h), -b));
    const auto [lo, hi] = harmonic_bounds(j, k, b);
    const double slack = 1e-12 * std::abs(direct.value());
    if (!(lo - slack <= direct.value() && direct.value() <= hi + slack)) {
      ++hv;
      if (first_h.empty()) {
        first_h = params({{"j", std::to_string(j)}, {"k", std::to_string(k)}, {"b", num(b)}});
      }
    }
  }
  out.push_back(make_record(suite, "harmonic bound violations over 1000 random (j,k,b)",
                            first_h.empty() ? "" : "first: " + first_h, static_cast<double>(hv),
                            0.0, 0.0));
  return out;
}

inline std::vector<std::size_t> k1_grid() {
  std::vector<std::size_t> g;
  for (std::size_t decade = 100; decade <= 10000; decade *= 10) {
    for (std::size_t mult : {1, 2, 5}) g.push_back(decade * mult);
  }
  g.push_back(100000);
  return g;
}

inline std::vector<CheckRecord> suite_k1(std::uint64_t, const SuiteOptions&) {
  const std::string suite = "k1-boundedness";
  const auto grid = k1_grid();
  std::vector<CheckRecord> out;
  for (double g : {0.5, 1.0}) {
    for (double tau : {0.1, 0.25, 0.4, 0.5}) {
      const auto r = k1_diagnostic(WeightFunction::power(tau), g, 10, grid);
      out.push_back(make_record(suite, "terminal log-log slope of a_k (bounded regime)",
                                params({{"tau", num(tau)}, {"gamma", num(g)}, {"L", "10"},
                                        {"k_max", "100000"}, {"max", num(r.max_value)}}),
                                std::isfinite(r.max_value) ? r.terminal_slope : HUGE_VAL,
                                -HUGE_VAL, 0.02));
    }
    const auto r = k1_diagnostic(WeightFunction::power(1.0), g, 10, grid);
    out.push_back(make_record(suite, "terminal log-log slope of a_k (tau=1 growth)",
                              params({{"tau", "1"}, {"gamma", num(g)}, {"L", "10"}, {"k_max", "100000"}}),
                              r.terminal_slope, 0.5, 0.5, 0.05));
  }
  return out;
}

inline std::vector<CheckRecord> suite_determinism(std::uint64_t seed, const SuiteOptions&) {
  namespace fs = std::filesystem;
  const auto f = WeightFunction::power(0.25);
  const auto dir = fs::temp_directory_path();
  const auto tag = std::to_string(seed) + "-" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  const auto p1 = (dir / ("fhill-det-1-" + tag + ".csv")).string();
  const auto p2 = (dir / ("fhill-det-n-" + tag + ".csv")).string();
  const unsigned many = std::max(8u, default_workers());
  save_table(tabulate_null(1.0, f, 2000, 1000, seed, 1), p1);
  save_table(tabulate_null(1.0, f, 2000, 1000, seed, many), p2);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const auto a = slurp(p1), b = slurp(p2);
  fs::remove(p1);
  fs::remove(p2);
  const double differ = (a.empty() || a != b) ? 1.0 : 0.0;
  return {make_record("determinism", "table files differ between 1 and many workers",
                      params({{"workers", "1/" + std::to_string(many)}, {"k", "2000"},
                              {"reps", "1000"}, {"bytes", std::to_string(a.size())}}),
                      differ, 0.0, 0.0)};
}

using SuiteFn = std::vector<CheckRecord> (*)(std::uint64_t, const SuiteOptions&);

inline const std::vector<std::pair<std::string, SuiteFn>>& suites() {
  static const std::vector<std::pair<std::string, SuiteFn>> all = {
      {"moments-mc", &suite_moments_mc},
      {"telescoping", &suite_telescoping},
      {"conditional-mean", &suite_conditional_mean},
      {"theorem2-distribution", &suite_theorem2},
      {"stability", &suite_stability},
      {"support", &suite_support},
      {"table1", &suite_table1},
      {"moments-grid", &suite_moments_grid},
      {"k1-boundedness", &suite_k1},
      {"determinism", &suite_determinism},
  };
  return all;
}

}  // namespace detail

/// Names of all suites, in execution order.
inline std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : detail::suites()) names.push_back(name);
  return names;
}

/// Runs the selected suites (in canonical order) and returns their records.
/// Each suite draws from streams derived from (master_seed, suite position).
inline std::vector<CheckRecord> run_suite(const std::set<std::string>& selection,
                                          std::uint64_t master_seed, const SuiteOptions& opt = {}) {
  if (selection.empty()) throw ArgumentError("run_suite: empty selection");
  const auto names = suite_names();
  for (const auto& s : selection) {
    if (std::find(names.begin(), names.end(), s) == names.end()) {
      throw ArgumentError("run_suite: unknown suite '" + s + "'");
    }
  }
  std::vector<CheckRecord> out;
  for (std::size_t i = 0; i < detail::suites().size(); ++i) {
    const auto& [name, fn] = detail::suites()[i];
    if (!selection.count(name)) continue;
    auto recs = fn(mix_seed(master_seed, 1000 + i), opt);
    out.insert(out.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
  }
  return out;
}

inline bool all_passed(const std::vector<CheckRecord>& records) {
  return std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.passed; });
}

inline std::vector<std::string> check_record_columns() {
  return {"suite", "name", "parameters", "observed", "expected_lo", "expected_hi", "tolerance", "passed"};
}

/// Row cells for a records file; free-text fields are quoted.
inline std::vector<std::string> check_record_row(const CheckRecord& r) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  return {r.suite, quote(r.name), quote(r.parameters), detail::format_real(r.observed),
          detail::format_real(r.expected_lo), detail::format_real(r.expected_hi),
          detail::format_real(r.tolerance), r.passed ? "1" : "0"};
}

/// One aligned text line per record.
inline std::string format_check_record(const CheckRecord& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS " : "FAIL ") << '[' << r.suite << "] " << r.name << ": observed "
     << detail::format_real(r.observed) << ", expected ";
  if (r.expected_lo == r.expected_hi) {
    os << detail::format_real(r.expected_lo);
  } else {
    os << '[' << detail::format_real(r.expected_lo) << ", " << detail::format_real(r.expected_hi) << ']';
  }
  if (r.tolerance > 0.0) os << " +/- " << detail::format_real(r.tolerance);
  if (!r.parameters.empty()) os << " (" << r.parameters << ')';
  return os.str();
}

}  // namespace fhill

#endif  // FHILL_DIAGNOSTICS_HPP

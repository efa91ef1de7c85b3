// fhill: command-line front end for the functional Hill library.
//
// Exit codes: 0 success (for `test`: H0 not rejected), 1 runtime or I/O error
// (for `check`: some record failed), 2 usage or configuration error,
// 3 `test` rejected H0.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fhill/fhill.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRejected = 3;

using fhill::detail::format_real;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

void check_tau(double tau) {
  if (tau > 0.5) {
    warn("tau=" + format_real(tau) +
         " > 1/2 is outside the non-Gaussian small-tau regime; computing anyway");
  }
}

struct SimulateArgs {
  std::string model;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double gamma = 1.0;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  const auto model = fhill::find_model(a.model, a.gamma);
  fhill::RngStream stream(a.seed, 0);
  const auto sample = fhill::sample_model(model, a.n, stream);
  fhill::save_sample(sample, a.out,
                     {{"format_version", "1"},
                      {"model", model.id},
                      {"gamma", format_real(model.gamma)},
                      {"n", std::to_string(a.n)},
                      {"seed", std::to_string(a.seed)}});
  std::cout << "wrote " << a.n << " draws from " << model.id << " to " << a.out << '\n';
  return kExitOk;
}

struct EstimateArgs {
  std::string input;
  double tau = 0.25;
  std::size_t k = 0;
  double gamma = 1.0;
  std::optional<double> y0;
};

int run_estimate(const EstimateArgs& a) {
  check_tau(a.tau);
  const auto sample = fhill::load_sample(a.input);
  const auto f = fhill::WeightFunction::power(a.tau);
  std::vector<std::string> warnings;
  const double t = fhill::functional_hill(sample, f, a.k);
  const double dl = fhill::diop_lo(sample, a.tau, a.k);
  const double t_star = fhill::normalized_hill(sample, f, a.k, a.y0, &warnings);
  const fhill::MartingaleConfig config{a.gamma, f, a.k};
  const double anchored = fhill::anchored_hill(sample, f, a.k, a.y0);
  const double centering = fhill::centering_A(config);
  for (const auto& w : warnings) warn(w);
  std::cout << "# format_version=1\n"
            << "# input=" << a.input << "\n# n=" << sample.size() << "\n# k=" << a.k
            << "\n# tau=" << format_real(a.tau) << "\n# gamma=" << format_real(a.gamma)
            << "\n# y0=" << (a.y0 ? format_real(*a.y0) : std::string("log X_{n,n}")) << '\n'
            << "T_n=" << format_real(t) << '\n'
            << "diop_lo=" << format_real(dl) << '\n'
            << "T_n_star=" << format_real(t_star) << '\n'
            << "T_anchored=" << format_real(anchored) << '\n'
            << "A_kn=" << format_real(centering) << '\n'
            << "W_star=" << format_real(centering - anchored) << '\n';
  return kExitOk;
}

struct TabulateArgs {
  double gamma = 1.0;
  double tau = 0.25;
  std::size_t k = fhill::kDefaultTableK;
  std::size_t reps = fhill::kDefaultTableReps;
  std::uint64_t seed = 0;
  std::string out;
  unsigned workers = 0;
};

int run_tabulate(const TabulateArgs& a) {
  check_tau(a.tau);
  const auto table = fhill::tabulate_null(a.gamma, fhill::WeightFunction::power(a.tau), a.k,
                                          a.reps, a.seed, a.workers);
  fhill::save_table(table, a.out);
  std::cout << "wrote " << table.reps << " replicates (gamma=" << format_real(a.gamma)
            << ", tau=" << format_real(a.tau) << ", k=" << a.k << ", seed=" << a.seed << ") to "
            << a.out << '\n'
            << "min=" << format_real(table.values.front())
            << " max=" << format_real(table.values.back()) << '\n';
  if (table.reps >= 2) {
    for (double p : {0.01, 0.05, 0.5, 0.95, 0.99}) {
      std::cout << "q" << format_real(p) << '=' << format_real(fhill::quantile(table, p)) << '\n';
    }
  }
  return kExitOk;
}

struct CdfArgs {
  std::string table;
  std::optional<double> x;
  std::optional<double> p;
  bool curve = false;
};

int run_cdf(const CdfArgs& a) {
  if (!a.x && !a.p && !a.curve) throw UsageError("cdf needs at least one of --x, --p, --curve");
  const auto table = fhill::load_table(a.table);
  if (a.curve) {
    std::cout << "# format_version=1\n# table=" << a.table << "\n# gamma=" << format_real(table.gamma)
              << "\n# weight=" << table.weight << "\n# k=" << table.k << "\n# reps=" << table.reps
              << "\nvalue,probability\n";
    for (std::size_t i = 0; i < table.values.size(); ++i) {
      std::cout << format_real(table.values[i]) << ','
                << format_real(static_cast<double>(i + 1) / static_cast<double>(table.reps)) << '\n';
    }
    return kExitOk;
  }
  if (a.x) {
    std::cout << "G(x)=" << format_real(fhill::ecdf_eval(table, *a.x)) << '\n'
              << "P(|W|<=|x|)=" << format_real(fhill::abs_prob(table, *a.x)) << '\n';
  }
  if (a.p) std::cout << "quantile(p)=" << format_real(fhill::quantile(table, *a.p)) << '\n';
  return kExitOk;
}

struct TestArgs {
  std::string input;
  double gamma = 1.0;
  double tau = 0.25;
  std::size_t k = 0;
  std::string table;
  double level = fhill::kDefaultLevel;
  std::optional<double> y0;
  std::string records;
};

int run_test(const TestArgs& a) {
  check_tau(a.tau);
  const auto sample = fhill::load_sample(a.input);
  const auto table = fhill::load_table(a.table);
  if (table.k != a.k) {
    warn("null table was tabulated at k=" + std::to_string(table.k) + " but the test uses k=" +
         std::to_string(a.k) + "; the law of W depends on k");
  }
  std::vector<std::string> warnings;
  const auto r = fhill::weibull_domain_test(sample, a.gamma, a.tau, a.k, table, a.level, a.y0, &warnings);
  for (const auto& w : warnings) warn(w);
  std::cout << "H0: F in the Weibull max-domain with index -" << format_real(a.gamma) << '\n'
            << "  n=" << r.n << " k=" << r.k << " tau=" << format_real(r.tau) << '\n'
            << "  T*=" << format_real(r.statistic_T) << "  W*=" << format_real(r.statistic_W) << '\n'
            << "  p-value=" << format_real(r.p_value) << " (table reps=" << r.table.reps
            << ", k=" << r.table.k << ")\n"
            << "  decision at level " << format_real(r.level) << ": "
            << (r.reject ? "REJECT" : "do not reject") << '\n';
  const fhill::MetaList meta = {{"input", a.input},       {"table", a.table},
                                {"gamma", format_real(a.gamma)}, {"tau", format_real(a.tau)},
                                {"k", std::to_string(a.k)}, {"level", format_real(a.level)},
                                {"y0", a.y0 ? format_real(*a.y0) : "log X_{n,n}"}};
  const std::vector<std::string> cols = {"n", "k", "gamma", "tau", "statistic_T", "statistic_W",
                                         "p_value", "reject", "level", "table_k", "table_reps", "table_seed"};
  const std::vector<std::vector<std::string>> rows = {
      {std::to_string(r.n), std::to_string(r.k), format_real(r.gamma), format_real(r.tau),
       format_real(r.statistic_T), format_real(r.statistic_W), format_real(r.p_value),
       r.reject ? "1" : "0", format_real(r.level), std::to_string(r.table.k),
       std::to_string(r.table.reps),
       r.table.master_seed ? std::to_string(*r.table.master_seed) : std::string()}};
  if (a.records.empty()) {
    std::cout << '\n';
    fhill::write_records(std::cout, meta, cols, rows);
  } else {
    fhill::write_records_file(a.records, meta, cols, rows);
  }
  return r.reject ? kExitRejected : kExitOk;
}

struct Table1Args {
  std::size_t runs = 200;
  std::uint64_t seed = 1;
  std::string table;
  std::string records;
  unsigned workers = 0;
};

int run_table1(const Table1Args& a) {
  fhill::Table1Options opt;
  opt.workers = a.workers;
  std::optional<fhill::NullTable> table;
  if (!a.table.empty()) table = fhill::load_table(a.table);
  const auto report = fhill::reproduce_table1(a.seed, a.runs, table, opt);
  std::cout << "# n=" << opt.n << " k=" << opt.k << " gamma=" << format_real(opt.gamma)
            << " tau=" << format_real(opt.tau) << " level=" << format_real(opt.level)
            << " runs=" << a.runs << " seed=" << a.seed << " table_k=" << report.table.k
            << " table_reps=" << report.table.reps << '\n';
  std::cout << std::left << std::setw(14) << "model" << std::right << std::setw(10) << "reject%"
            << std::setw(10) << "mean_T" << std::setw(10) << "mean_p" << std::setw(12) << "ref_T"
            << std::setw(10) << "ref_p" << '\n';
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : report.rows) {
    std::cout << std::left << std::setw(14) << r.model << std::right << std::fixed
              << std::setprecision(1) << std::setw(10) << 100.0 * r.rejection_rate
              << std::setprecision(4) << std::setw(10) << r.mean_T << std::setw(10) << r.mean_p
              << std::setw(12) << r.reference_T << std::setw(10) << r.reference_p << '\n';
    rows.push_back({r.model, std::to_string(r.runs), format_real(r.rejection_rate),
                    format_real(r.mean_T), format_real(r.mean_p), format_real(r.reference_T),
                    format_real(r.reference_p)});
  }
  std::cout << std::defaultfloat;
  if (!a.records.empty()) {
    fhill::write_records_file(
        a.records,
        {{"seed", std::to_string(a.seed)}, {"runs", std::to_string(a.runs)},
         {"n", std::to_string(opt.n)}, {"k", std::to_string(opt.k)},
         {"gamma", format_real(opt.gamma)}, {"tau", format_real(opt.tau)},
         {"level", format_real(opt.level)}, {"table_k", std::to_string(report.table.k)},
         {"table_reps", std::to_string(report.table.reps)}},
        {"name", "runs", "rejection_rate", "mean_T", "mean_p", "reference_T", "reference_p"}, rows);
  }
  return kExitOk;
}

struct CheckArgs {
  std::vector<std::string> suites;
  std::uint64_t seed = 20261016;
  bool deep = false;
  std::string records;
  unsigned workers = 0;
};

int run_check(const CheckArgs& a, const std::vector<std::string>& default_suites) {
  std::set<std::string> selection(a.suites.begin(), a.suites.end());
  if (selection.empty()) selection.insert(default_suites.begin(), default_suites.end());
  const auto records = fhill::run_suite(selection, a.seed, {a.deep, a.workers});
  std::size_t failed = 0;
  for (const auto& r : records) {
    std::cout << fhill::format_check_record(r) << '\n';
    failed += r.passed ? 0 : 1;
  }
  std::cout << records.size() - failed << "/" << records.size() << " records passed\n";
  if (!a.records.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : records) rows.push_back(fhill::check_record_row(r));
    std::string names;
    for (const auto& s : selection) names += (names.empty() ? "" : ";") + s;
    fhill::write_records_file(a.records,
                              {{"seed", std::to_string(a.seed)}, {"deep", a.deep ? "1" : "0"},
                               {"suites", names}},
                              fhill::check_record_columns(), rows);
  }
  return failed == 0 ? kExitOk : kExitError;
}

void add_check_options(CLI::App* cmd, CheckArgs& a, bool with_suite) {
  if (with_suite) {
    cmd->add_option("--suite", a.suites, "Suite to run (repeatable; default: all)")
        ->check(CLI::IsMember(fhill::suite_names()));
  }
  cmd->add_option("--seed", a.seed, "Master seed");
  cmd->add_flag("--deep", a.deep, "Run the 10^6-replication Monte Carlo oracles");
  cmd->add_option("--records", a.records, "Write machine-readable records to this file");
  cmd->add_option("--workers", a.workers, "Worker threads (0 = hardware concurrency)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional Hill process: estimation, null tables and Weibull-domain tests"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Draw a sample from a reference model");
  c_sim->add_option("--model", sim.model, "Model id")->required()->check(CLI::IsMember([] {
    std::vector<std::string> ids;
    for (const auto& m : fhill::model_registry()) ids.push_back(m.id);
    return ids;
  }()));
  c_sim->add_option("--n", sim.n, "Sample size")->required()->check(CLI::PositiveNumber);
  c_sim->add_option("--seed", sim.seed, "Master seed");
  c_sim->add_option("--gamma", sim.gamma, "Weibull index for the Weibull-type models")
      ->check(CLI::PositiveNumber);
  c_sim->add_option("--out", sim.out, "Output sample file")->required();

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Compute T_n(f_tau), T_n* and W* for a sample");
  c_est->add_option("--input", est.input, "Sample file")->required();
  c_est->add_option("--tau", est.tau, "Power-weight exponent")->check(CLI::PositiveNumber);
  c_est->add_option("--k", est.k, "Number of upper order statistics")->required();
  c_est->add_option("--gamma", est.gamma, "Weibull index used for the centering")
      ->check(CLI::PositiveNumber);
  c_est->add_option("--y0", est.y0, "Known log upper endpoint");

  TabulateArgs tab;
  auto* c_tab = app.add_subcommand("tabulate", "Tabulate the null law of W by Monte Carlo");
  c_tab->add_option("--gamma", tab.gamma)->check(CLI::PositiveNumber);
  c_tab->add_option("--tau", tab.tau)->check(CLI::PositiveNumber);
  c_tab->add_option("--k", tab.k)->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
  c_tab->add_option("--reps", tab.reps)->check(CLI::PositiveNumber);
  c_tab->add_option("--seed", tab.seed);
  c_tab->add_option("--out", tab.out, "Output table file")->required();
  c_tab->add_option("--workers", tab.workers, "Worker threads (0 = hardware concurrency)");

  CdfArgs cdf;
  auto* c_cdf = app.add_subcommand("cdf", "Query a null table");
  c_cdf->add_option("--table", cdf.table)->required();
  c_cdf->add_option("--x", cdf.x, "Print G(x) and P(|W| <= |x|)");
  c_cdf->add_option("--p", cdf.p, "Print the p-quantile");
  c_cdf->add_flag("--curve", cdf.curve, "Emit the full ECDF as value,probability CSV");

  TestArgs tst;
  auto* c_tst = app.add_subcommand("test", "Test membership in the Weibull max-domain");
  c_tst->add_option("--input", tst.input, "Sample file")->required();
  c_tst->add_option("--gamma", tst.gamma)->check(CLI::PositiveNumber);
  c_tst->add_option("--tau", tst.tau)->check(CLI::PositiveNumber);
  c_tst->add_option("--k", tst.k)->required();
  c_tst->add_option("--table", tst.table, "Null table file")->required();
  c_tst->add_option("--level", tst.level)->check(CLI::Range(0.0, 1.0));
  c_tst->add_option("--y0", tst.y0, "Known log upper endpoint");
  c_tst->add_option("--records", tst.records, "Write the machine-readable record here");

  Table1Args t1;
  auto* c_t1 = app.add_subcommand("table1", "Rejection rates of the test over the nine reference models");
  c_t1->add_option("--runs", t1.runs)->check(CLI::PositiveNumber);
  c_t1->add_option("--seed", t1.seed);
  c_t1->add_option("--table", t1.table, "Null table (default: generated at the test's k)");
  c_t1->add_option("--records", t1.records);
  c_t1->add_option("--workers", t1.workers);

  CheckArgs chk;
  auto* c_chk = app.add_subcommand("check", "Run verification suites");
  add_check_options(c_chk, chk, true);

  CheckArgs mchk;
  auto* c_mom = app.add_subcommand("moments", "Moment formulas");
  c_mom->require_subcommand(1);
  auto* c_mom_chk = c_mom->add_subcommand("check", "Verify closed forms, brackets and bounds");
  add_check_options(c_mom_chk, mchk, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*c_sim) return run_simulate(sim);
    if (*c_est) return run_estimate(est);
    if (*c_tab) return run_tabulate(tab);
    if (*c_cdf) return run_cdf(cdf);
    if (*c_tst) return run_test(tst);
    if (*c_t1) return run_table1(t1);
    if (*c_chk) return run_check(chk, fhill::suite_names());
    if (*c_mom_chk) {
      return run_check(mchk, {"moments-mc", "telescoping", "moments-grid", "k1-boundedness"});
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fhill::ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fhill::ArgumentError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fhill::LookupError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

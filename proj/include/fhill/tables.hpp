#ifndef FHILL_TABLES_HPP
#define FHILL_TABLES_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "martingale.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "stats.hpp"
#include "weights.hpp"

namespace fhill {

inline constexpr int kTableFormatVersion = 1;
inline constexpr std::size_t kDefaultTableK = 2000;
inline constexpr std::size_t kDefaultTableReps = 1000;

/// Sorted Monte Carlo replicates of W at truncation k, with the metadata that
/// regenerates them.
struct NullTable {
  double gamma = 1.0;
  std::string weight;          ///< WeightFunction::descriptor()
  std::optional<double> tau;   ///< set for power weights
  std::size_t k = 0;
  std::size_t reps = 0;
  std::optional<std::uint64_t> master_seed;
  std::vector<double> values;  ///< ascending, size == reps

  bool operator==(const NullTable&) const = default;
};

/// reps independent draws of W (replication b uses stream (master_seed, b)),
/// sorted. The worker count only changes how replications are scheduled.
inline NullTable tabulate_null(double gamma, const WeightFunction& f, std::size_t k,
                               std::size_t reps, std::uint64_t master_seed,
                               unsigned workers = 0) {
  if (reps < 1) throw ArgumentError("tabulate_null: reps must be >= 1");
  const MartingaleConfig config{gamma, f, k};
  config.validate();
  std::vector<double> values(reps);
  parallel_blocks(reps, workers, [&](std::size_t begin, std::size_t end) {
    WSimulator sim(config);
    for (std::size_t b = begin; b < end; ++b) {
      RngStream stream(master_seed, b);
      values[b] = sim.draw(stream);
    }
  });
  std::sort(values.begin(), values.end());
  return {gamma, f.descriptor(), f.tau(), k, reps, master_seed, std::move(values)};
}

/// Right-continuous ECDF: #{values <= x} / reps.
inline double ecdf_eval(const NullTable& table, double x) {
  if (table.values.empty()) throw ArgumentError("ecdf_eval: empty table");
  const auto it = std::upper_bound(table.values.begin(), table.values.end(), x);
  return static_cast<double>(it - table.values.begin()) / static_cast<double>(table.values.size());
}

/// P(|W| <= |x|) as the share of replicates in [-|x|, |x|].
inline double abs_prob(const NullTable& table, double x) {
  if (table.values.empty()) throw ArgumentError("abs_prob: empty table");
  const double a = std::abs(x);
  const auto lo = std::lower_bound(table.values.begin(), table.values.end(), -a);
  const auto hi = std::upper_bound(table.values.begin(), table.values.end(), a);
  return static_cast<double>(hi - lo) / static_cast<double>(table.values.size());
}

/// Order-statistic quantile: the ceil(p * reps)-th smallest value.
inline double quantile(const NullTable& table, double p) {
  if (table.values.empty()) throw ArgumentError("quantile: empty table");
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("quantile: p must lie in (0,1)");
  const double n = static_cast<double>(table.values.size());
  auto idx = static_cast<std::size_t>(std::ceil(p * n));
  idx = std::clamp<std::size_t>(idx, 1, table.values.size());
  return table.values[idx - 1];
}

/// Seed used for the table at truncation k inside a stability scan.
inline std::uint64_t stability_seed(std::uint64_t master_seed, std::size_t k) {
  return mix_seed(master_seed, k);
}

/// KS distances between tables at consecutive entries of k_list. Each table
/// uses its own seed derived from (master_seed, k), so equal k give equal
/// tables and distinct k give independent ones.
inline std::vector<double> stability_check(double gamma, const WeightFunction& f,
                                           const std::vector<std::size_t>& k_list,
                                           std::size_t reps, std::uint64_t master_seed,
                                           unsigned workers = 0) {
  if (k_list.size() < 2) throw ArgumentError("stability_check: need at least two k values");
  std::vector<NullTable> tables;
  for (std::size_t k : k_list) {
    tables.push_back(tabulate_null(gamma, f, k, reps, stability_seed(master_seed, k), workers));
  }
  std::vector<double> d;
  for (std::size_t i = 1; i < tables.size(); ++i) {
    d.push_back(ks_two_sample(tables[i - 1].values, tables[i].values));
  }
  return d;
}

namespace detail {

/// Shortest text that parses back to exactly v.
inline std::string format_real(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace detail

/// Serializes a table. Layout:
///   # format_version=1
///   # gamma=<g>
///   # tau=<t>            (or # family=<descriptor> for non-power weights)
///   # k=<k>
///   # reps=<B>
///   # seed=<s>           (omitted when unknown)
///   # checksum=<fnv1a-64 of every other line, newline-terminated>
///   one value per line, ascending, shortest round-trip decimal form
inline std::string format_table(const NullTable& t) {
  std::vector<std::string> lines;
  lines.push_back("# format_version=" + std::to_string(kTableFormatVersion));
  lines.push_back("# gamma=" + detail::format_real(t.gamma));
  if (t.tau) {
    lines.push_back("# tau=" + detail::format_real(*t.tau));
  } else {
    lines.push_back("# family=" + t.weight);
  }
  lines.push_back("# k=" + std::to_string(t.k));
  lines.push_back("# reps=" + std::to_string(t.reps));
  if (t.master_seed) lines.push_back("# seed=" + std::to_string(*t.master_seed));
  const std::size_t header_end = lines.size();
  for (double v : t.values) lines.push_back(detail::format_real(v));

  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& l : lines) h = detail::fnv1a(l + "\n", h);
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i == header_end) out += "# checksum=" + detail::hex64(h) + "\n";
    out += lines[i];
    out += '\n';
  }
  if (lines.size() == header_end) out += "# checksum=" + detail::hex64(h) + "\n";
  return out;
}

inline void save_table(const NullTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write table file '" + path + "'");
  out << format_table(table);
  if (!out) throw IoError("failed writing table file '" + path + "'");
}

/// Parses a table file. Required keys: gamma, k, and tau or family. reps,
/// seed and checksum are optional; when present they are enforced.
inline NullTable parse_table(std::istream& in) {
  std::map<std::string, std::pair<std::string, std::size_t>> meta;
  std::vector<double> values;
  std::optional<std::string> checksum;
  std::uint64_t h = 1469598103934665603ULL;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      auto body = detail::trim(t.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        h = detail::fnv1a(std::string(t) + "\n", h);
        continue;
      }
      std::string key(detail::trim(body.substr(0, eq)));
      std::string value(detail::trim(body.substr(eq + 1)));
      if (key == "checksum") {
        checksum = value;
        continue;
      }
      h = detail::fnv1a(std::string(t) + "\n", h);
      meta[key] = {value, lineno};
      continue;
    }
    auto v = detail::parse_double(t);
    if (!v || !std::isfinite(*v)) throw ParseError(lineno, "cannot parse table value '" + std::string(t) + "'");
    if (!values.empty() && *v < values.back()) throw ParseError(lineno, "table values are not sorted");
    values.push_back(*v);
    h = detail::fnv1a(std::string(t) + "\n", h);
  }

  auto number = [&](const std::string& key) -> std::optional<double> {
    auto it = meta.find(key);
    if (it == meta.end()) return std::nullopt;
    auto v = detail::parse_double(it->second.first);
    if (!v) throw ParseError(it->second.second, "bad value for '" + key + "'");
    return v;
  };
  auto integer = [&](const std::string& key) -> std::optional<std::uint64_t> {
    auto it = meta.find(key);
    if (it == meta.end()) return std::nullopt;
    std::uint64_t v = 0;
    const auto& s = it->second.first;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ParseError(it->second.second, "bad integer for '" + key + "'");
    }
    return v;
  };

  if (auto ver = integer("format_version"); ver && *ver != static_cast<std::uint64_t>(kTableFormatVersion)) {
    throw ParseError(meta["format_version"].second, "unsupported format_version");
  }
  NullTable table;
  auto gamma = number("gamma");
  if (!gamma || !(*gamma > 0.0)) throw ParseError(lineno + 1, "missing or invalid 'gamma' header");
  table.gamma = *gamma;
  if (auto tau = number("tau")) {
    table.tau = *tau;
    table.weight = WeightFunction::power(*tau).descriptor();
  } else if (auto it = meta.find("family"); it != meta.end()) {
    table.weight = it->second.first;
  } else {
    throw ParseError(lineno + 1, "missing 'tau' or 'family' header");
  }
  auto k = integer("k");
  if (!k || *k < 2) throw ParseError(lineno + 1, "missing or invalid 'k' header");
  table.k = static_cast<std::size_t>(*k);
  table.master_seed = integer("seed");
  if (values.empty()) throw ParseError(lineno + 1, "table has no values");
  if (auto reps = integer("reps"); reps && *reps != values.size()) {
    throw ParseError(lineno + 1, "expected " + std::to_string(*reps) + " values, found " +
                                     std::to_string(values.size()) + " (truncated file?)");
  }
  if (checksum && *checksum != detail::hex64(h)) {
    throw IntegrityError("table checksum mismatch: header says " + *checksum + ", content hashes to " +
                         detail::hex64(h));
  }
  table.reps = values.size();
  table.values = std::move(values);
  return table;
}

inline NullTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open table file '" + path + "'");
  return parse_table(in);
}

}  // namespace fhill

#endif  // FHILL_TABLES_HPP

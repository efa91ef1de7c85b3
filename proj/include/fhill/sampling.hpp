#ifndef FHILL_SAMPLING_HPP
#define FHILL_SAMPLING_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace fhill {

/// A positive real sample together with its ascending order statistics.
class SampleData {
public:
  SampleData(std::vector<double> values, std::string source = "memory")
      : values_(std::move(values)), source_(std::move(source)) {
    if (values_.empty()) throw ValidationError("sample is empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
        throw ValidationError(i + 1, "sample value must be finite and strictly positive");
      }
    }
    sorted_ = values_;
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& sorted() const noexcept { return sorted_; }
  const std::string& source() const noexcept { return source_; }

  /// X_{i,n}, 1-based.
  double order_stat(std::size_t i) const {
    if (i < 1 || i > sorted_.size()) throw ArgumentError("order_stat: index out of range");
    return sorted_[i - 1];
  }

private:
  std::vector<double> values_;
  std::vector<double> sorted_;
  std::string source_;
};

/// n iid Uniform(0,1) variates, sorted ascending.
inline std::vector<double> uniform_order_stats(RngStream& stream, std::size_t n) {
  if (n == 0) throw ArgumentError("uniform_order_stats: n must be >= 1");
  std::vector<double> u(n);
  for (auto& x : u) x = stream.uniform();
  std::sort(u.begin(), u.end());
  return u;
}

/// Malmquist transform E_h = h * log(U_{h+1,n} / U_{h,n}), h = 1..n-1.
inline std::vector<double> malmquist_exponentials(std::span<const double> sorted_uniforms) {
  const std::size_t n = sorted_uniforms.size();
  if (n < 2) throw ArgumentError("malmquist_exponentials: need at least two order statistics");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sorted_uniforms[i] > 0.0)) throw DomainError("malmquist_exponentials: nonpositive entry");
    if (i > 0 && sorted_uniforms[i] < sorted_uniforms[i - 1]) {
      throw ArgumentError("malmquist_exponentials: input not nondecreasing");
    }
  }
  std::vector<double> e(n - 1);
  for (std::size_t h = 1; h < n; ++h) {
    e[h - 1] = static_cast<double>(h) * std::log(sorted_uniforms[h] / sorted_uniforms[h - 1]);
  }
  return e;
}

/// A distribution given through its upper quantile map u -> F^{-1}(1-u).
struct QuantileModel {
  std::string id;
  double gamma = 1.0;
  std::optional<int> q;
  std::function<double(double)> quantile;
};

namespace detail {

inline QuantileModel weibull_pure(double gamma) {
  return {"weibull1", gamma, std::nullopt,
          [gamma](double u) { return std::exp(1.0 - std::pow(u, gamma)); }};
}

inline QuantileModel weibull_perturbed(double gamma, int q) {
  return {"weibull2-q" + std::to_string(q), gamma, q, [gamma, q](double u) {
            return std::exp(1.0 - std::pow(u, gamma) * (1.0 + std::pow(u, q)));
          }};
}

}  // namespace detail

/// The nine reference models, in reporting order: pure Weibull, the
/// (1 + u^q) perturbed Weibulls for q = 9 down to 4, standard exponential and
/// Pareto. gamma applies to the Weibull-type rows.
inline std::vector<QuantileModel> model_registry(double gamma = 1.0) {
  if (!(gamma > 0.0)) throw ArgumentError("model_registry: gamma must be positive");
  std::vector<QuantileModel> models;
  models.push_back(detail::weibull_pure(gamma));
  for (int q = 9; q >= 4; --q) models.push_back(detail::weibull_perturbed(gamma, q));
  models.push_back({"exponential", 1.0, std::nullopt, [](double u) { return -std::log(u); }});
  models.push_back({"pareto", 1.0, std::nullopt, [](double u) { return 1.0 / u; }});
  return models;
}

inline QuantileModel find_model(std::string_view id, double gamma = 1.0) {
  for (auto& m : model_registry(gamma)) {
    if (m.id == id) return m;
  }
  throw LookupError("unknown model id '" + std::string(id) + "'");
}

/// n iid draws X = F^{-1}(1 - U) by inverse transform.
inline SampleData sample_model(const QuantileModel& model, std::size_t n, RngStream& stream) {
  if (n == 0) throw ArgumentError("sample_model: n must be >= 1");
  std::vector<double> x(n);
  for (auto& v : x) v = model.quantile(stream.uniform());
  return SampleData(std::move(x), model.id);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Parses a sample from text: one value per line, `#` comment lines and
/// blank lines skipped.
inline SampleData parse_sample(std::istream& in, std::string source) {
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto v = detail::parse_double(t);
    if (!v) throw ParseError(lineno, "cannot parse '" + std::string(t) + "' as a number");
    if (!(*v > 0.0) || !std::isfinite(*v)) {
      throw ValidationError(lineno, "sample value " + std::string(t) + " is not strictly positive");
    }
    values.push_back(*v);
  }
  if (values.empty()) throw ValidationError("sample '" + source + "' contains no values");
  return SampleData(std::move(values), std::move(source));
}

inline SampleData load_sample(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sample file '" + path + "'");
  return parse_sample(in, path);
}

/// Writes a sample file; header lines become `# key=value` comments.
inline void save_sample(const SampleData& sample, const std::string& path,
                        const std::vector<std::pair<std::string, std::string>>& header = {}) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write sample file '" + path + "'");
  for (const auto& [key, value] : header) out << "# " << key << '=' << value << '\n';
  char buf[32];
  for (double v : sample.values()) {
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out << std::string_view(buf, res.ptr - buf) << '\n';
  }
  if (!out) throw IoError("failed writing sample file '" + path + "'");
}

}  // namespace fhill

#endif  // FHILL_SAMPLING_HPP

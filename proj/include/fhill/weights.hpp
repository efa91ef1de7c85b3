#ifndef FHILL_WEIGHTS_HPP
#define FHILL_WEIGHTS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace fhill {

/// Nondecreasing weight f on the nonnegative integers with f(0) = 0.
///
/// Two families: the power weights f_tau(j) = j^tau, and a user table
/// f(0), f(1), ..., f(N) evaluated only up to N.
class WeightFunction {
public:
  static WeightFunction power(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ArgumentError("power weight: tau must be positive");
    WeightFunction w;
    w.tau_ = tau;
    return w;
  }

  static WeightFunction table(std::vector<double> values) {
    if (values.empty() || values.front() != 0.0) throw ArgumentError("weight table: f(0) must be 0");
    for (std::size_t j = 1; j < values.size(); ++j) {
      if (!std::isfinite(values[j]) || values[j] < values[j - 1]) {
        throw ArgumentError("weight table: f must be finite and nondecreasing (j=" +
                            std::to_string(j) + ")");
      }
    }
    WeightFunction w;
    w.table_ = std::move(values);
    return w;
  }

  /// f identically zero on 0..N.
  static WeightFunction zero(std::size_t n) { return table(std::vector<double>(n + 1, 0.0)); }

  double operator()(std::size_t j) const {
    if (j == 0) return 0.0;
    if (tau_) return std::exp(*tau_ * std::log(static_cast<double>(j)));
    check_range(j);
    return table_[j];
  }

  /// f(j) - f(j-1) for j >= 1. The power branch avoids cancellation for large j.
  double increment(std::size_t j) const {
    if (j == 0) throw ArgumentError("weight increment: j must be >= 1");
    if (tau_) {
      if (j == 1) return 1.0;
      const double dj = static_cast<double>(j);
      return (*this)(j) * -std::expm1(*tau_ * std::log1p(-1.0 / dj));
    }
    check_range(j);
    return table_[j] - table_[j - 1];
  }

  /// Increments indexed 0..upto with slot 0 set to 0.
  std::vector<double> increments(std::size_t upto) const {
    std::vector<double> d(upto + 1, 0.0);
    for (std::size_t j = 1; j <= upto; ++j) d[j] = increment(j);
    return d;
  }

  std::optional<double> tau() const noexcept { return tau_; }

  /// Largest j at which f is defined (unbounded for power weights).
  std::optional<std::size_t> max_index() const noexcept {
    if (tau_) return std::nullopt;
    return table_.size() - 1;
  }

  /// Stable text key for this weight, used to match tables to requests.
  std::string descriptor() const {
    std::ostringstream os;
    os.precision(17);
    if (tau_) {
      os << "power:" << *tau_;
    } else {
      std::uint64_t h = 1469598103934665603ULL;
      for (double v : table_) {
        os.str("");
        os << v << ';';
        for (char c : os.str()) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
      }
      os.str("");
      os << "table:" << (table_.size() - 1) << ':' << std::hex << h;
    }
    return os.str();
  }

private:
  WeightFunction() = default;

  void check_range(std::size_t j) const {
    if (j >= table_.size()) {
      throw ArgumentError("weight table defined up to j=" + std::to_string(table_.size() - 1) +
                          ", requested j=" + std::to_string(j));
    }
  }

  std::optional<double> tau_;
  std::vector<double> table_;
};

/// Nonnegative kernel K on (0,1].
class KernelFunction {
public:
  KernelFunction(std::string name, std::function<double(double)> k)
      : name_(std::move(name)), k_(std::move(k)) {}

  static KernelFunction constant(double c = 1.0) {
    return {"constant", [c](double) { return c; }};
  }

  double operator()(double t) const {
    const double v = k_(t);
    if (!(v >= 0.0)) throw DomainError("kernel '" + name_ + "' is negative or NaN");
    return v;
  }

  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
  std::function<double(double)> k_;
};

}  // namespace fhill

#endif  // FHILL_WEIGHTS_HPP

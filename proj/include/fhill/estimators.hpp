#ifndef FHILL_ESTIMATORS_HPP
#define FHILL_ESTIMATORS_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "sampling.hpp"
#include "stats.hpp"
#include "weights.hpp"

namespace fhill {

namespace detail {

inline void check_k(const SampleData& sample, std::size_t k) {
  if (k < 1 || k >= sample.size()) {
    throw ArgumentError("k=" + std::to_string(k) + " must satisfy 1 <= k < n=" +
                        std::to_string(sample.size()));
  }
}

}  // namespace detail

/// Top log-spacings log X_{n-j+1,n} - log X_{n-j,n} for j = 1..k (slot 0 unused).
inline std::vector<double> log_spacings(const SampleData& sample, std::size_t k) {
  detail::check_k(sample, k);
  const auto& x = sample.sorted();
  const std::size_t n = x.size();
  std::vector<double> s(k + 1, 0.0);
  double upper = std::log(x[n - 1]);
  for (std::size_t j = 1; j <= k; ++j) {
    const double lower = std::log(x[n - j - 1]);
    s[j] = upper - lower;
    upper = lower;
  }
  return s;
}

/// Functional Hill process T_n(f) = sum_{j=1}^k f(j) (log X_{n-j+1,n} - log X_{n-j,n}).
inline double functional_hill(const SampleData& sample, const WeightFunction& f, std::size_t k) {
  const auto s = log_spacings(sample, k);
  CompensatedSum sum;
  for (std::size_t j = 1; j <= k; ++j) sum.add(f(j) * s[j]);
  return sum.value();
}

/// Power-weight statistic T_n(f_tau) / k^tau; tau = 1 is the Hill estimator.
inline double diop_lo(const SampleData& sample, double tau, std::size_t k) {
  const auto f = WeightFunction::power(tau);
  return functional_hill(sample, f, k) / f(k);
}

/// Kernel-weighted Hill ratio
///   sum_j j K(j/k) spacing_j / sum_j K(j/k),
/// which reduces to the Hill estimator for constant K.
inline double kernel_hill(const SampleData& sample, const KernelFunction& kernel, std::size_t k) {
  const auto s = log_spacings(sample, k);
  const double dk = static_cast<double>(k);
  CompensatedSum num, mass;
  for (std::size_t j = 1; j <= k; ++j) {
    const double w = kernel(static_cast<double>(j) / dk);
    num.add(static_cast<double>(j) * w * s[j]);
    mass.add(w);
  }
  if (!(mass.value() > 0.0)) throw DegenerateError("kernel_hill: kernel has zero mass on {j/k}");
  return num.value() / mass.value();
}

/// T_n*(f) = T_n(f) / (y0 - log X_{n-k+1,n}). Without y0 the endpoint is
/// replaced by log X_{n,n}. Appends a warning when y0 is given and the sample
/// has values <= 1.
inline double normalized_hill(const SampleData& sample, const WeightFunction& f, std::size_t k,
                              std::optional<double> y0 = std::nullopt,
                              std::vector<std::string>* warnings = nullptr) {
  detail::check_k(sample, k);
  const auto& x = sample.sorted();
  const std::size_t n = x.size();
  const double log_max = std::log(x[n - 1]);
  const double log_anchor = std::log(x[n - k]);
  double endpoint = log_max;
  if (y0) {
    if (*y0 < log_max) {
      throw ArgumentError("normalized_hill: y0 is below log of the sample maximum");
    }
    if (warnings && x.front() <= 1.0) {
      warnings->push_back("sample has values <= 1 while a log-endpoint y0 was supplied");
    }
    endpoint = *y0;
  }
  const double denom = endpoint - log_anchor;
  if (!(denom > 0.0)) {
    throw DegenerateError("normalized_hill: zero denominator (tied top order statistics or y0 at "
                          "log X_{n-k+1,n})");
  }
  return functional_hill(sample, f, k) / denom;
}

/// The statistic tied exactly to the centered process: the k-1 spacings above
/// the anchor X_{n-k+1,n}, normalized by the endpoint gap,
///   sum_{j=1}^{k-1} f(j) (log X_{n-j+1,n} - log X_{n-j,n}) / (y0 - log X_{n-k+1,n}).
/// Without y0 the endpoint is replaced by log X_{n,n}. Requires 2 <= k <= n.
inline double anchored_hill(const SampleData& sample, const WeightFunction& f, std::size_t k,
                            std::optional<double> y0 = std::nullopt,
                            std::vector<std::string>* warnings = nullptr) {
  const std::size_t n = sample.size();
  if (k < 2 || k > n) {
    throw ArgumentError("anchored_hill: k=" + std::to_string(k) + " must satisfy 2 <= k <= n=" +
                        std::to_string(n));
  }
  const auto& x = sample.sorted();
  const double log_max = std::log(x[n - 1]);
  const double log_anchor = std::log(x[n - k]);
  double endpoint = log_max;
  if (y0) {
    if (*y0 < log_max) throw ArgumentError("anchored_hill: y0 is below log of the sample maximum");
    if (warnings && x.front() <= 1.0) {
      warnings->push_back("sample has values <= 1 while a log-endpoint y0 was supplied");
    }
    endpoint = *y0;
  }
  const double denom = endpoint - log_anchor;
  if (!(denom > 0.0)) {
    throw DegenerateError("anchored_hill: zero denominator (tied top order statistics or y0 at "
                          "log X_{n-k+1,n})");
  }
  CompensatedSum sum;
  double upper = log_max;
  for (std::size_t j = 1; j < k; ++j) {
    const double lower = std::log(x[n - j - 1]);
    sum.add(f(j) * (upper - lower));
    upper = lower;
  }
  return sum.value() / denom;
}

}  // namespace fhill

#endif  // FHILL_ESTIMATORS_HPP

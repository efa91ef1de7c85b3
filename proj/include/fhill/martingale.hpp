#ifndef FHILL_MARTINGALE_HPP
#define FHILL_MARTINGALE_HPP

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "estimators.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "weights.hpp"

namespace fhill {

/// Parameters of the centered exponential-functional process.
///
/// Public convention: for a given k the process uses exponentials E_1..E_{k-1},
/// weights Delta f(j) for j = 1..k-1 and suffix sums over h = j..k-1, which is
/// the form that matches the observable statistic on k upper order statistics.
struct MartingaleConfig {
  double gamma = 1.0;
  WeightFunction f = WeightFunction::power(0.25);
  std::size_t k = 2000;

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ArgumentError("gamma must be positive");
    if (k < 2) throw ArgumentError("k must be >= 2");
    if (auto top = f.max_index(); top && *top < k) {
      throw ArgumentError("weight table too short for k=" + std::to_string(k));
    }
  }
};

/// One point of a trajectory W_k, with the rescaled value W_k / gamma(k).
struct TrajectoryPoint {
  std::size_t k;
  double w;
  double scaled;
};

/// gamma(m) = (1 + gamma/m)^{-1} = E exp(-gamma E_m / m).
inline double gamma_factor(double gamma, std::size_t m) {
  return 1.0 / (1.0 + gamma / static_cast<double>(m));
}

/// s_{j,k} = prod_{h=j}^{k-1} (1 + gamma/h)^{-1}, accumulated in log space.
/// j = k is the empty product and is accepted only with allow_empty.
inline double s_exact(std::size_t j, std::size_t k, double gamma, bool allow_empty = false) {
  if (!(gamma > 0.0)) throw ArgumentError("s_exact: gamma must be positive");
  if (j == k && allow_empty && j >= 1) return 1.0;
  if (j < 1 || j + 1 > k) throw ArgumentError("s_exact: need 1 <= j <= k-1");
  CompensatedSum log_sum;
  for (std::size_t h = j; h < k; ++h) log_sum.add(std::log1p(gamma / static_cast<double>(h)));
  return std::exp(-log_sum.value());
}

namespace detail {

/// Expectations s_j = prod_{h=j}^{upper} (1+gamma/h)^{-1} for j = 1..upper,
/// by one backward pass; slot 0 unused.
inline std::vector<double> suffix_expectations(double gamma, std::size_t upper) {
  std::vector<double> s(upper + 1, 0.0);
  CompensatedSum log_sum;
  for (std::size_t j = upper; j >= 1; --j) {
    log_sum.add(std::log1p(gamma / static_cast<double>(j)));
    s[j] = std::exp(-log_sum.value());
  }
  return s;
}

/// sum_{j=1}^{upper} df[j] (exp(-gamma R_j) - s[j]) with R_j = sum_{h=j}^{upper} E_h / h.
/// exps[h-1] holds E_h.
inline double centered_sum(double gamma, std::span<const double> df, std::span<const double> s,
                           std::span<const double> exps, std::size_t upper) {
  double r = 0.0;
  CompensatedSum w;
  for (std::size_t j = upper; j >= 1; --j) {
    r += exps[j - 1] / static_cast<double>(j);
    w.add(df[j] * (std::exp(-gamma * r) - s[j]));
  }
  return w.value();
}

}  // namespace detail

/// Precomputed increments and expectations for repeated draws of W at fixed
/// (gamma, f, k). Each draw is O(k).
class WSimulator {
public:
  explicit WSimulator(const MartingaleConfig& config)
      : gamma_(config.gamma), upper_((config.validate(), config.k - 1)),
        df_(config.f.increments(upper_)), s_(detail::suffix_expectations(gamma_, upper_)),
        scratch_(upper_) {}

  /// W from given exponentials E_1..E_{k-1}.
  double evaluate(std::span<const double> exps) const {
    if (exps.size() < upper_) throw ArgumentError("WSimulator: need k-1 exponentials");
    return detail::centered_sum(gamma_, df_, s_, exps, upper_);
  }

  /// Fresh draw of k-1 exponentials from the stream.
  double draw(RngStream& stream) {
    for (auto& e : scratch_) e = stream.exponential();
    return evaluate(scratch_);
  }

  std::size_t exponentials_per_draw() const noexcept { return upper_; }

private:
  double gamma_;
  std::size_t upper_;
  std::vector<double> df_;
  std::vector<double> s_;
  std::vector<double> scratch_;
};

/// One draw of the centered process at truncation k.
inline double simulate_W(const MartingaleConfig& config, RngStream& stream) {
  WSimulator sim(config);
  return sim.draw(stream);
}

/// A_{k,n}(f) = f(k-1) - sum_{j=1}^{k-1} Delta f(j) s_{j,k}.
inline double centering_A(const MartingaleConfig& config) {
  config.validate();
  const std::size_t upper = config.k - 1;
  const auto s = detail::suffix_expectations(config.gamma, upper);
  CompensatedSum sum;
  sum.add(config.f(upper));
  for (std::size_t j = 1; j <= upper; ++j) sum.add(-config.f.increment(j) * s[j]);
  return sum.value();
}

/// W*_{k-1,n}(f) = A_{k,n}(f) - anchored_hill(sample, f, k, y0). Under the pure
/// Weibull quantile model with the true y0 this has exactly the law of
/// simulate_W at the same k. Without y0 the endpoint is approximated by
/// log X_{n,n}.
inline double observed_W(const SampleData& sample, const MartingaleConfig& config,
                         std::optional<double> y0 = std::nullopt,
                         std::vector<std::string>* warnings = nullptr) {
  config.validate();
  if (config.k + 1 > sample.size()) throw ArgumentError("observed_W: need 2 <= k <= n-1");
  return centering_A(config) - anchored_hill(sample, config.f, config.k, y0, warnings);
}

/// The path W_1, ..., W_{k_max} built from E_1..E_{k_max} (upper limit of the
/// inner sums equal to the path index), via the product recursion
///   P_{k+1} = V_{k+1} (P_k + Delta f(k+1)),  C_{k+1} = gamma(k+1) (C_k + Delta f(k+1)),
/// with W_k = P_k - C_k.
inline std::vector<TrajectoryPoint> trajectory_from(double gamma, const WeightFunction& f,
                                                    std::span<const double> exps) {
  std::vector<TrajectoryPoint> path;
  path.reserve(exps.size());
  double p = 0.0, c = 0.0;
  for (std::size_t m = 1; m <= exps.size(); ++m) {
    const double d = f.increment(m);
    const double dm = static_cast<double>(m);
    p = std::exp(-gamma * exps[m - 1] / dm) * (p + d);
    c = gamma_factor(gamma, m) * (c + d);
    const double w = p - c;
    path.push_back({m, w, w * (1.0 + gamma / dm)});
  }
  return path;
}

inline std::vector<TrajectoryPoint> simulate_trajectory(double gamma, const WeightFunction& f,
                                                        std::size_t k_max, RngStream& stream) {
  return trajectory_from(gamma, f, exp_stream(stream, k_max));
}

struct ConditionalMeanResult {
  double empirical;  ///< Monte Carlo mean of W_{k+1} with E_1..E_k held fixed
  double predicted;  ///< gamma(k+1) W_k
  double std_error;  ///< standard error of `empirical`
  double w_k;
};

/// Holds the prefix E_1..E_k fixed (k = prefix length = config.k), draws
/// independent E_{k+1} and compares the mean of W_{k+1} with gamma(k+1) W_k.
/// Here the inner sums run up to the path index, so W_{k+1} extends W_k by one
/// factor.
inline ConditionalMeanResult conditional_mean_check(const MartingaleConfig& config,
                                                    std::span<const double> prefix,
                                                    std::size_t extensions, RngStream& stream) {
  config.validate();
  const std::size_t k = config.k;
  if (prefix.size() != k) throw ArgumentError("conditional_mean_check: prefix length must equal k");
  if (extensions == 0) throw ArgumentError("conditional_mean_check: extensions must be >= 1");
  const double g = config.gamma;

  // P_k and C_k by direct suffix sums.
  const auto s = detail::suffix_expectations(g, k);
  CompensatedSum p_sum, c_sum;
  double r = 0.0;
  for (std::size_t j = k; j >= 1; --j) {
    r += prefix[j - 1] / static_cast<double>(j);
    const double d = config.f.increment(j);
    p_sum.add(d * std::exp(-g * r));
    c_sum.add(d * s[j]);
  }
  const double p = p_sum.value(), c = c_sum.value();
  const double w_k = p - c;
  const double d_next = config.f.increment(k + 1);
  const double v_mean = gamma_factor(g, k + 1);
  const double dk1 = static_cast<double>(k + 1);

  RunningStats stats;
  for (std::size_t i = 0; i < extensions; ++i) {
    const double v = std::exp(-g * stream.exponential() / dk1);
    stats.add(v * (p + d_next) - v_mean * (c + d_next));
  }
  return {stats.mean(), v_mean * w_k, stats.std_error(), w_k};
}

}  // namespace fhill

#endif  // FHILL_MARTINGALE_HPP

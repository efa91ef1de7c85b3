#ifndef FHILL_MOMENTS_HPP
#define FHILL_MOMENTS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "error.hpp"
#include "martingale.hpp"
#include "stats.hpp"
#include "weights.hpp"

// Moments of S_{j,k} = exp(-gamma sum_{h=j}^{k-1} E_h / h), their certified
// large-j brackets, integral-comparison bounds for power sums, and the
// convergence / regime diagnostics for a weight f.

namespace fhill {

namespace detail {

inline void check_jk(std::size_t j, std::size_t k, const char* who) {
  if (j < 1 || j + 1 > k) throw ArgumentError(std::string(who) + ": need 1 <= j <= k-1");
}

inline void check_gamma(double gamma, const char* who) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ArgumentError(std::string(who) + ": gamma must be positive");
  }
}

}  // namespace detail

/// E(S_{j,k}^m) = prod_{h=j}^{k-1} (1 + m gamma / h)^{-1}.
inline double moment_exact(std::size_t j, std::size_t k, unsigned m, double gamma) {
  detail::check_jk(j, k, "moment_exact");
  detail::check_gamma(gamma, "moment_exact");
  if (m == 0) throw ArgumentError("moment_exact: m must be >= 1");
  const double mg = static_cast<double>(m) * gamma;
  CompensatedSum log_sum;
  for (std::size_t h = j; h < k; ++h) log_sum.add(std::log1p(mg / static_cast<double>(h)));
  return std::exp(-log_sum.value());
}

/// Var(S_{j,k}) = E(S^2) - E(S)^2, evaluated as s^2 * expm1(sum log1p(x^2/(1+2x)))
/// with x = gamma/h, which avoids the cancellation of the direct difference.
inline double variance_exact(std::size_t j, std::size_t k, double gamma) {
  detail::check_jk(j, k, "variance_exact");
  detail::check_gamma(gamma, "variance_exact");
  CompensatedSum excess;
  for (std::size_t h = j; h < k; ++h) {
    const double x = gamma / static_cast<double>(h);
    excess.add(std::log1p(x * x / (1.0 + 2.0 * x)));
  }
  const double s = s_exact(j, k, gamma);
  return s * s * std::expm1(excess.value());
}

/// cov(S_{j,k}, S_{j+ell,k}) = Var(S_{j+ell,k}) * s_{j,j+ell}.
inline double covariance_exact(std::size_t j, std::size_t ell, std::size_t k, double gamma) {
  if (ell < 1 || j < 1 || j + ell + 1 > k) {
    throw ArgumentError("covariance_exact: need 1 <= j < j+ell <= k-1");
  }
  return variance_exact(j + ell, k, gamma) * s_exact(j, j + ell, gamma);
}

/// Interval bracketing an exact quantity, with its leading-order value.
struct MomentBracket {
  double lo;
  double hi;
  double nominal;

  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  double width() const noexcept { return hi - lo; }
};

/// Constants of the second-order expansion log(1+u) = u + theta u^2.
///
/// theta(u) = (log(1+u) - u)/u^2 increases from -1/2 on (0, inf). u0 is the
/// largest u <= 1/2 such that theta stays inside [a1, a2] = [-eps-1/2, eps-1/2]
/// on (0, u0].
struct ExpansionConstants {
  double eps;
  double a1;
  double a2;
  double u0;
};

inline double log_expansion_theta(double u) {
  if (u < 1e-4) return -0.5 + u / 3.0 - u * u / 4.0;
  return (std::log1p(u) - u) / (u * u);
}

inline ExpansionConstants expansion_constants(double eps = 0.1) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ArgumentError("eps must lie in (0,1]");
  const double a1 = -eps - 0.5, a2 = eps - 0.5;
  double u0 = 0.5;
  if (log_expansion_theta(u0) > a2) {
    double lo = 0.0, hi = 0.5;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (log_expansion_theta(mid) <= a2 ? lo : hi) = mid;
    }
    u0 = lo;
  }
  return {eps, a1, a2, u0};
}

/// Smallest j at which the bracket for E(S^m) is certified:
/// max(J0(m), J1(eps, m)) with J0(m) = ceil(m gamma / u0) (so every
/// m gamma / h with h >= j is inside the expansion region) and
/// J1 = ceil(|a1| m^2 gamma / eps).
inline std::size_t validity_threshold(unsigned m, double gamma, double eps = 0.1) {
  const auto c = expansion_constants(eps);
  const double mg = static_cast<double>(m) * gamma;
  const double j0 = std::ceil(mg / c.u0);
  const double j1 = std::ceil(std::abs(c.a1) * static_cast<double>(m) * mg / eps);
  return static_cast<std::size_t>(std::max({1.0, j0, j1}));
}

/// Bounds on sum_{h=j}^{k-1} h^{-b} from comparing with int_j^{k-1} x^{-b} dx.
/// b > 0 (decreasing summand): [I + (k-1)^{-b}, I + j^{-b}];
/// b < 0 (increasing summand): [I + j^{-b}, I + (k-1)^{-b}].
inline std::pair<double, double> harmonic_bounds(std::size_t j, std::size_t k, double b) {
  detail::check_jk(j, k, "harmonic_bounds");
  const double dj = static_cast<double>(j), dk1 = static_cast<double>(k - 1);
  const double log_ratio = std::log(dk1 / dj);
  double integral;
  if (b == 1.0) {
    integral = log_ratio;
  } else {
    const double e = 1.0 - b;
    integral = std::pow(dj, e) * std::expm1(e * log_ratio) / e;
  }
  const double at_j = std::pow(dj, -b), at_end = std::pow(dk1, -b);
  if (b >= 0.0) return {integral + at_end, integral + at_j};
  return {integral + at_j, integral + at_end};
}

/// Bounds on sum_{h=j}^{k-1} 1/h - log((k-1)/j): [1/(k-1), 1/j].
inline std::pair<double, double> harmonic_excess_bounds(std::size_t j, std::size_t k) {
  detail::check_jk(j, k, "harmonic_excess_bounds");
  return {1.0 / static_cast<double>(k - 1), 1.0 / static_cast<double>(j)};
}

/// Bounds on sum_{h=j}^{k-1} h^{-2}: 1/j - 1/(k-1) plus (k-1)^{-2} or j^{-2}.
inline std::pair<double, double> inverse_square_bounds(std::size_t j, std::size_t k) {
  detail::check_jk(j, k, "inverse_square_bounds");
  const double dj = static_cast<double>(j), dk1 = static_cast<double>(k - 1);
  const double base = 1.0 / dj - 1.0 / dk1;
  return {base + 1.0 / (dk1 * dk1), base + 1.0 / (dj * dj)};
}

/// Bracket for E(S_{j,k}^m) around the leading term (j/(k-1))^{m gamma}.
///
/// log E(S^m) = -m gamma H - m^2 gamma^2 sum theta_h / h^2, with
/// H - log((k-1)/j) in [1/(k-1), 1/j] and theta_h in [a1, a2].
inline MomentBracket moment_approx(std::size_t j, std::size_t k, unsigned m, double gamma,
                                   double eps = 0.1) {
  detail::check_jk(j, k, "moment_approx");
  detail::check_gamma(gamma, "moment_approx");
  if (m == 0) throw ArgumentError("moment_approx: m must be >= 1");
  const std::size_t threshold = validity_threshold(m, gamma, eps);
  if (j < threshold) {
    throw ValidityError(static_cast<long>(threshold),
                        "moment_approx: j=" + std::to_string(j) +
                            " below validity threshold " + std::to_string(threshold));
  }
  const auto c = expansion_constants(eps);
  const double mg = static_cast<double>(m) * gamma;
  const double mg2 = mg * mg;
  const double nominal = std::pow(static_cast<double>(j) / static_cast<double>(k - 1), mg);
  const auto [harm_lo, harm_hi] = harmonic_excess_bounds(j, k);
  const auto [sq_lo, sq_hi] = inverse_square_bounds(j, k);
  const double neg_theta_lo = -c.a2, neg_theta_hi = -c.a1;  // -theta in [1/2 - eps, 1/2 + eps]
  const double second_lo = neg_theta_lo >= 0.0 ? neg_theta_lo * sq_lo : neg_theta_lo * sq_hi;
  const double second_hi = neg_theta_hi * sq_hi;
  double lo = nominal * std::exp(-mg * harm_hi + mg2 * second_lo);
  double hi = nominal * std::exp(-mg * harm_lo + mg2 * second_hi);
  lo = std::min(lo, nominal);
  hi = std::min(1.0, std::max(hi, nominal));
  return {lo, hi, nominal};
}

/// Envelope [0, (j/(k-1))^{2 gamma} V1 V2] for Var(S_{j,k}), where
/// V1 = (upper first-moment factor)^2 and V2 >= 2 gamma^2 |a1| / j.
/// Var = E(S)^2 (e^D - 1) with 0 <= D <= gamma^2 sum_{h>=j} h^{-2} makes the
/// upper end rigorous.
inline MomentBracket variance_approx(std::size_t j, std::size_t k, double gamma,
                                     double eps = 0.1) {
  detail::check_jk(j, k, "variance_approx");
  detail::check_gamma(gamma, "variance_approx");
  const std::size_t threshold =
      std::max(validity_threshold(1, gamma, eps), validity_threshold(2, gamma, eps));
  if (j < threshold) {
    throw ValidityError(static_cast<long>(threshold),
                        "variance_approx: j=" + std::to_string(j) +
                            " below validity threshold " + std::to_string(threshold));
  }
  const auto c = expansion_constants(eps);
  const double dj = static_cast<double>(j), dk1 = static_cast<double>(k - 1);
  const double lead = std::pow(dj / dk1, 2.0 * gamma);
  const auto first = moment_approx(j, k, 1, gamma, eps);
  const double v1 = (first.hi / first.nominal) * (first.hi / first.nominal);
  const double g2 = gamma * gamma;
  const double v2 = std::max(2.0 * g2 * std::abs(c.a1) / dj,
                             std::expm1(g2 * inverse_square_bounds(j, k).second));
  const double hi = std::min(1.0, lead * v1 * v2);
  const double nominal = std::min(hi, lead * g2 * (1.0 / dj - 1.0 / dk1));
  return {0.0, hi, nominal};
}

/// a_k = k^{-gamma} sum_{j=L}^{k-1} Delta f(j) j^{gamma - 1/2} along a grid of
/// k, with the log-log slope between the last two grid points.
struct K1Result {
  std::vector<std::size_t> k_grid;
  std::vector<double> values;
  double max_value = 0.0;
  double terminal_slope = 0.0;

  bool bounded(double slope_tolerance) const {
    return std::isfinite(max_value) && terminal_slope <= slope_tolerance;
  }
};

inline K1Result k1_diagnostic(const WeightFunction& f, double gamma, std::size_t L,
                              std::span<const std::size_t> k_grid) {
  detail::check_gamma(gamma, "k1_diagnostic");
  if (L < 1) throw ArgumentError("k1_diagnostic: L must be >= 1");
  if (k_grid.empty()) throw ArgumentError("k1_diagnostic: empty grid");
  for (std::size_t i = 1; i < k_grid.size(); ++i) {
    if (k_grid[i] <= k_grid[i - 1]) throw ArgumentError("k1_diagnostic: grid must increase");
  }
  K1Result out;
  out.k_grid.assign(k_grid.begin(), k_grid.end());
  CompensatedSum running;
  std::size_t next_j = L;
  for (std::size_t k : k_grid) {
    for (; next_j + 1 <= k; ++next_j) {
      running.add(f.increment(next_j) * std::pow(static_cast<double>(next_j), gamma - 0.5));
    }
    const double a = std::pow(static_cast<double>(k), -gamma) * running.value();
    out.values.push_back(a);
    out.max_value = std::max(out.max_value, a);
  }
  const std::size_t n = out.values.size();
  if (n >= 2 && out.values[n - 1] > 0.0 && out.values[n - 2] > 0.0) {
    out.terminal_slope = std::log(out.values[n - 1] / out.values[n - 2]) /
                         std::log(static_cast<double>(k_grid[n - 1]) /
                                  static_cast<double>(k_grid[n - 2]));
  }
  return out;
}

/// Truncated A(2,f) = sum_{j=1}^k f(j)^2 / j^2 and
/// B_n(f) = max_{j<=k} (f(j)/j) / sqrt(A2_partial), 0 when f vanishes.
struct RegimeDiagnostics {
  double a2_partial;
  double bn;
};

inline RegimeDiagnostics regime_diagnostics(const WeightFunction& f, std::size_t k) {
  if (k < 1) throw ArgumentError("regime_diagnostics: k must be >= 1");
  CompensatedSum a2;
  double max_ratio = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    const double r = f(j) / static_cast<double>(j);
    a2.add(r * r);
    max_ratio = std::max(max_ratio, r);
  }
  const double a = a2.value();
  return {a, a > 0.0 ? max_ratio / std::sqrt(a) : 0.0};
}

}  // namespace fhill

#endif  // FHILL_MOMENTS_HPP

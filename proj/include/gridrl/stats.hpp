#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gridrl {

namespace stats_detail {

// Continued-fraction evaluation of the regularized incomplete beta function
// (modified Lentz). Converges to ~1e-15 for the Student-t use case.
inline double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace stats_detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::domain_error("incomplete_beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * stats_detail::betacf(a, b, x) / a;
  return 1.0 - front * stats_detail::betacf(b, a, 1.0 - x) / b;
}

// CDF of Student's t with `dof` degrees of freedom.
inline double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw std::domain_error("student_t_cdf: dof must be > 0");
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  const double x = dof / (dof + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

struct PairedTTest {
  double t = 0.0;
  double p_one_sided = 0.5; // H1: mean(a - b) > 0
  int dof = 0;
};

// Paired t-test on per-profile returns; one-sided alternative a > b.
inline PairedTTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t_test: unequal lengths");
  const std::size_t n = a.size();
  if (n < 2) throw std::invalid_argument("paired_t_test: need at least two pairs");

  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) mean += a[k] - b[k];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = (a[k] - b[k]) - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  PairedTTest result;
  result.dof = static_cast<int>(n) - 1;
  if (sd == 0.0) {
    if (mean == 0.0) {
      result.t = 0.0;
      result.p_one_sided = 0.5;
    } else {
      result.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
      result.p_one_sided = mean > 0.0 ? 0.0 : 1.0;
    }
    return result;
  }
  result.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  result.p_one_sided = 1.0 - student_t_cdf(result.t, static_cast<double>(result.dof));
  return result;
}

struct FiveNumberSummary {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

// Linear-interpolation quantile over sorted data, inclusive method.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty data");
  if (sorted.size() == 1) return sorted[0];
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline FiveNumberSummary five_number_summary(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("five_number_summary: empty data");
  std::sort(values.begin(), values.end());
  FiveNumberSummary s;
  s.min = values.front();
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  s.max = values.back();
  return s;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace gridrl

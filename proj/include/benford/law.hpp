#pragma once

// The Benford reference law and distances from simple families to it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "benford/errors.hpp"
#include "benford/significand.hpp"

namespace benford {

/// P(S(X) <= t) = log10 t for a Benford X.
inline double benford_cdf(double t) {
  if (!(t >= 1.0 && t < 10.0)) throw DomainError("benford_cdf needs t in [1, 10)");
  return std::log10(t);
}

inline double first_digit_pmf(int d) {
  if (d < 1 || d > 9) throw DomainError("first digit must be in 1..9");
  return std::log1p(1.0 / d) / std::numbers::ln10;
}

/// P(D1 = d1, ..., Dm = dm) = log10(1 + 1 / (d1 d2 ... dm as an integer)).
inline double digit_tuple_prob(const DigitVector& q) {
  if (q.is_zero()) throw DomainError("digit tuple needs a leading digit in 1..9");
  if (q.size() > 18) throw DomainError("digit tuple longer than 18 digits");
  std::int64_t n = 0;
  for (int d : q.digits()) n = 10 * n + d;
  return std::log1p(1.0 / static_cast<double>(n)) / std::numbers::ln10;
}

/// Uniform law on [a, b].
struct UniformFamily {
  double a;
  double b;

  UniformFamily(double lo, double hi) : a(lo), b(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      throw DomainError("uniform family needs finite a < b");
    }
  }
};

namespace detail {

inline double pow10i(std::int64_t k) { return static_cast<double>(std::pow(10.0L, static_cast<long double>(k))); }

// Lebesgue measure of [0, x] ∩ ⋃_k [10^k, t·10^k], for x >= 0 and t in [1, 10].
inline double significand_measure_from_zero(double x, double t) {
  if (x == 0.0) return 0.0;
  const auto d = significand(x);
  const double scale = pow10i(d.exponent);
  return scale * ((t - 1.0) / 9.0 + (std::min(t, d.significand) - 1.0));
}

// Same measure restricted to [lo, hi] with 0 <= lo <= hi.
inline double significand_measure(double lo, double hi, double t) {
  if (lo == 0.0) return significand_measure_from_zero(hi, t);
  const std::int64_t klo = significand(lo).exponent;
  const std::int64_t khi = significand(hi).exponent;
  if (khi - klo > 40) return significand_measure_from_zero(hi, t) - significand_measure_from_zero(lo, t);
  double total = 0.0;
  for (std::int64_t k = klo; k <= khi; ++k) {
    const double p = pow10i(k);
    const double left = std::max(lo, p);
    const double right = std::min(hi, t * p);
    if (right > left) total += right - left;
  }
  return total;
}

// P(S(U) <= t) for U uniform on f; t may be 10 here, for the closing breakpoint.
inline double uniform_significand_cdf_unchecked(const UniformFamily& f, double t) {
  double m = 0.0;
  if (f.a >= 0.0) {
    m = significand_measure(f.a, f.b, t);
  } else if (f.b <= 0.0) {
    m = significand_measure(-f.b, -f.a, t);
  } else {
    m = significand_measure(0.0, -f.a, t) + significand_measure(0.0, f.b, t);
  }
  return std::clamp(m / (f.b - f.a), 0.0, 1.0);
}

}  // namespace detail

/// Exact P(S(U) <= t) for U uniform on [a, b].
inline double uniform_significand_cdf(const UniformFamily& f, double t) {
  if (!(t >= 1.0 && t < 10.0)) throw DomainError("significand CDF needs t in [1, 10)");
  return detail::uniform_significand_cdf_unchecked(f, t);
}

/// sup over t in (1, 10) of |P(S(U) <= t) − log10 t|.
///
/// The CDF is linear in t between the significands of the endpoints, so on
/// each piece the gap is linear minus log and its only critical point is
/// t = 1 / (slope · ln 10).
inline double uniform_benford_distance(const UniformFamily& f) {
  std::vector<double> cuts = {1.0, 10.0};
  for (double e : {f.a, f.b}) {
    if (e != 0.0) cuts.push_back(significand(e).significand);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto gap = [&](double t) { return std::fabs(detail::uniform_significand_cdf_unchecked(f, t) - std::log10(t)); };
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double t1 = cuts[i];
    const double t2 = cuts[i + 1];
    best = std::max({best, gap(t1), gap(t2)});
    const double slope = (detail::uniform_significand_cdf_unchecked(f, t2) -
                          detail::uniform_significand_cdf_unchecked(f, t1)) / (t2 - t1);
    if (slope > 0.0) {
      const double ts = 1.0 / (slope * std::numbers::ln10);
      if (ts > t1 && ts < t2) best = std::max(best, gap(ts));
    }
  }
  return best;
}

namespace detail {

// P(lo <= X <= hi) for X ~ N(mean, sd), with the tail taken on the side that keeps precision.
inline double normal_interval(double mean, double sd, double lo, double hi) {
  const double zl = (lo - mean) / (sd * std::numbers::sqrt2);
  const double zh = (hi - mean) / (sd * std::numbers::sqrt2);
  if (zl >= 0.0) return 0.5 * (std::erfc(zl) - std::erfc(zh));
  if (zh <= 0.0) return 0.5 * (std::erfc(-zh) - std::erfc(-zl));
  return 1.0 - 0.5 * std::erfc(zh) - 0.5 * std::erfc(-zl);
}

}  // namespace detail

/// P(D1(X) = d) for X ~ N(mean, sd), by decade sums of erfc differences.
/// Decades whose magnitudes lie beyond mean ± 12 sd are dropped.
inline double normal_digit_prob(double mean, double sd, int d) {
  if (!(sd > 0.0) || !std::isfinite(sd) || !std::isfinite(mean)) throw DomainError("normal law needs finite mean and sd > 0");
  if (d < 1 || d > 9) throw DomainError("first digit must be in 1..9");
  const double lo = mean - 12.0 * sd;
  const double hi = mean + 12.0 * sd;
  const double top = std::max(std::fabs(lo), std::fabs(hi));
  std::int64_t kmin = 0;
  if (lo <= 0.0 && hi >= 0.0) {
    kmin = static_cast<std::int64_t>(std::floor(std::log10(sd))) - 17;
  } else {
    kmin = significand(std::min(std::fabs(lo), std::fabs(hi))).exponent;
  }
  const std::int64_t kmax = significand(top).exponent;

  double total = 0.0;
  for (std::int64_t k = kmin; k <= kmax; ++k) {
    const double p = detail::pow10i(k);
    const double a = d * p;
    const double b = (d + 1) * p;
    total += detail::normal_interval(mean, sd, a, b);
    total += detail::normal_interval(mean, sd, -b, -a);
  }
  return total;
}

}  // namespace benford

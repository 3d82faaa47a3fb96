#pragma once

// Fractional parts, Weyl rotations and the star discrepancy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "benford/errors.hpp"
#include "benford/fixed_log.hpp"
#include "benford/rational.hpp"
#include "benford/significand.hpp"

namespace benford {

/// x − ⌊x⌋, kept strictly below 1 when the subtraction rounds up.
inline double frac(double x) {
  if (!std::isfinite(x)) throw DomainError("frac of a non-finite value");
  const double r = x - std::floor(x);
  return r < 1.0 ? r : std::nextafter(1.0, 0.0);
}

inline std::int64_t floor_part(double x) {
  if (!std::isfinite(x) || std::fabs(x) >= 0x1p62) throw DomainError("floor_part argument out of range");
  return static_cast<std::int64_t>(std::floor(x));
}

/// A finite sequence of points in [0, 1).
class Mod1Sequence {
 public:
  Mod1Sequence() = default;
  explicit Mod1Sequence(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
      if (!(v >= 0.0 && v < 1.0)) throw DomainError("mod-1 values must lie in [0, 1)");
    }
  }

  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool empty() const { return values_.empty(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] auto begin() const { return values_.begin(); }
  [[nodiscard]] auto end() const { return values_.end(); }

 private:
  std::vector<double> values_;
};

struct DiscrepancyResult {
  double star_discrepancy = 0.0;
  std::int64_t n = 0;
  double sup_location = 0.0;  // the sorted point at which the sup is attained
};

/// Star discrepancy of a point set in [0, 1), from the sorted points.
inline DiscrepancyResult star_discrepancy_of(std::vector<double> u) {
  if (u.empty()) throw DomainError("star discrepancy of an empty sequence");
  std::stable_sort(u.begin(), u.end());
  const auto n = static_cast<double>(u.size());
  DiscrepancyResult r{0.0, static_cast<std::int64_t>(u.size()), 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double above = static_cast<double>(i + 1) / n - u[i];
    const double below = u[i] - static_cast<double>(i) / n;
    const double d = std::max(above, below);
    if (d > r.star_discrepancy) {
      r.star_discrepancy = d;
      r.sup_location = u[i];
    }
  }
  return r;
}

inline DiscrepancyResult star_discrepancy(const Mod1Sequence& s) { return star_discrepancy_of(s.values()); }

/// ⟨alpha⟩, ⟨2 alpha⟩, ..., ⟨n alpha⟩ from a 128-bit fixed-point alpha; term k is
/// computed directly as k · alpha, so chunks can be produced in any order.
inline Mod1Sequence weyl_sequence(const FixedLog& alpha, std::int64_t n) {
  if (n < 1) throw DomainError("weyl sequence needs n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::int64_t k = 1; k <= n; ++k) out[static_cast<std::size_t>(k - 1)] = alpha.times(k).fraction();
  return Mod1Sequence(std::move(out));
}

inline Mod1Sequence weyl_sequence(double alpha, std::int64_t n) {
  return weyl_sequence(FixedLog::from_double(alpha), n);
}

/// Rational rotation p/q, in exact integer arithmetic.
inline Mod1Sequence weyl_sequence(const Rational& alpha, std::int64_t n) {
  if (n < 1) throw DomainError("weyl sequence needs n >= 1");
  const std::int64_t q = alpha.den();
  std::int64_t p = alpha.num() % q;
  if (p < 0) p += q;
  std::vector<double> out(static_cast<std::size_t>(n));
  std::int64_t r = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    r = static_cast<std::int64_t>((static_cast<__int128>(r) + p) % q);
    out[static_cast<std::size_t>(k)] = static_cast<double>(r) / static_cast<double>(q);
  }
  return Mod1Sequence(std::move(out));
}

/// Rotation by log10 q for a positive rational q.
inline Mod1Sequence weyl_log10_sequence(const Rational& q, std::int64_t n) {
  if (q.num() <= 0) throw DomainError("log10 needs a positive rational");
  return weyl_sequence(FixedLog::log10_of(q), n);
}

/// ⟨log10 |x|⟩ element-wise, with log 0 taken as 0.
inline Mod1Sequence log_mod1_of(std::span<const double> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(log_significand(x));
  return Mod1Sequence(std::move(out));
}

}  // namespace benford

#pragma once

// Decimal significand S(x) in [1, 10), decimal exponent, and significant digits.

#include <gmpxx.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "benford/errors.hpp"
#include "benford/rational.hpp"

namespace benford {

/// x = sign · significand · 10^exponent, with significand in [1, 10), or all zeros for x = 0.
struct SignificandDecomposition {
  int sign = 0;
  double significand = 0.0;
  std::int64_t exponent = 0;

  [[nodiscard]] double reconstruct() const {
    return sign * static_cast<double>(significand * std::pow(10.0L, exponent));
  }
  friend bool operator==(const SignificandDecomposition&, const SignificandDecomposition&) = default;
};

/// Leading significant digits D1..Dm. Either all zero (x = 0) or D1 in 1..9.
class DigitVector {
 public:
  explicit DigitVector(std::vector<int> digits) : digits_(std::move(digits)) {
    if (digits_.empty()) throw DomainError("digit vector needs at least one digit");
    const bool all_zero = std::all_of(digits_.begin(), digits_.end(), [](int d) { return d == 0; });
    if (all_zero) return;
    if (digits_[0] < 1 || digits_[0] > 9) throw DomainError("leading digit must be in 1..9");
    for (int d : digits_) {
      if (d < 0 || d > 9) throw DomainError("digits must be in 0..9");
    }
  }

  [[nodiscard]] std::size_t size() const { return digits_.size(); }
  [[nodiscard]] int operator[](std::size_t i) const { return digits_[i]; }
  [[nodiscard]] std::span<const int> digits() const { return digits_; }
  [[nodiscard]] bool is_zero() const { return digits_[0] == 0; }

  friend bool operator==(const DigitVector&, const DigitVector&) = default;

 private:
  std::vector<int> digits_;
};

/// Significant digits beyond this are noise on a binary double.
inline constexpr int kFloatDigitBudget = 15;

/// Default cap on the size (in bits) of big integers built by the exact path.
inline constexpr std::uint64_t kDefaultBigIntBudgetBits = std::uint64_t{1} << 25;

inline SignificandDecomposition significand(double x) {
  if (!std::isfinite(x)) throw DomainError("significand of a non-finite value");
  if (x == 0.0) return {};
  const int sign = x < 0 ? -1 : 1;
  const long double a = std::fabs(static_cast<long double>(x));
  auto k = static_cast<std::int64_t>(std::floor(std::log10(a)));
  // 10^j is exact in long double for |j| <= 27; beyond that the single
  // rounding is still far below double resolution.
  long double s = k >= 0 ? a / std::pow(10.0L, static_cast<long double>(k))
                         : a * std::pow(10.0L, static_cast<long double>(-k));
  while (s >= 10.0L) {
    s /= 10.0L;
    ++k;
  }
  while (s < 1.0L) {
    s *= 10.0L;
    --k;
  }
  // Within 2^-52 of the next decade is float noise: the nearest double to a
  // decimal power of ten can fall just below it (1e23, 1e-21, ...).
  if (s >= 10.0L * (1.0L - 0x1p-52L)) return {sign, 1.0, k + 1};
  return {sign, static_cast<double>(s), k};
}

namespace detail {

// Sign of (num/den − 10^k) for positive num, den.
inline int compare_to_power_of_ten(const mpz_class& num, const mpz_class& den, std::int64_t k) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(k >= 0 ? k : -k));
  return k >= 0 ? cmp(num, den * p) : cmp(num * p, den);
}

}  // namespace detail

/// Significand of base^n from exact big-integer arithmetic, correctly rounded to double.
inline SignificandDecomposition significand_exact_pow(const Rational& base, std::int64_t n,
                                                      std::uint64_t bit_budget = kDefaultBigIntBudgetBits) {
  if (base.num() <= 0) throw DomainError("exact power needs a positive base");
  if (n < 1) throw DomainError("exact power needs n >= 1");
  const auto bits_of = [](std::int64_t v) { return static_cast<std::uint64_t>(std::bit_width(static_cast<std::uint64_t>(v))); };
  const std::uint64_t estimate = static_cast<std::uint64_t>(n) * (bits_of(base.num()) + bits_of(base.den()));
  if (estimate > bit_budget) throw ResourceError("big-integer budget exceeded for exact power");

  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), mpz_class(static_cast<long>(base.num())).get_mpz_t(), static_cast<unsigned long>(n));
  mpz_pow_ui(den.get_mpz_t(), mpz_class(static_cast<long>(base.den())).get_mpz_t(), static_cast<unsigned long>(n));

  const double approx = static_cast<double>(n) * (std::log10(static_cast<double>(base.num())) -
                                                  std::log10(static_cast<double>(base.den())));
  auto k = static_cast<std::int64_t>(std::floor(approx));
  while (detail::compare_to_power_of_ten(num, den, k) < 0) --k;
  while (detail::compare_to_power_of_ten(num, den, k + 1) >= 0) ++k;

  // 25 leading digits plus a sticky digit give a correctly rounded strtod.
  constexpr std::int64_t kLead = 24;
  mpz_class scaled_num = num, scaled_den = den, p;
  const std::int64_t shift = kLead - k;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(shift >= 0 ? shift : -shift));
  if (shift >= 0) {
    scaled_num *= p;
  } else {
    scaled_den *= p;
  }
  mpz_class lead, rem;
  mpz_tdiv_qr(lead.get_mpz_t(), rem.get_mpz_t(), scaled_num.get_mpz_t(), scaled_den.get_mpz_t());
  const std::string d = lead.get_str();
  std::string text = d.substr(0, 1) + "." + d.substr(1);
  if (rem != 0) text += "1";
  double s = std::strtod(text.c_str(), nullptr);
  if (s >= 10.0) {
    s = 1.0;
    ++k;
  }
  return {1, s, k};
}

/// Float path for base^n: multiply significands and carry the decade count separately.
inline SignificandDecomposition significand_pow(double base, std::int64_t n) {
  if (!(base > 0.0) || !std::isfinite(base)) throw DomainError("power needs a positive finite base");
  if (n < 1) throw DomainError("power needs n >= 1");
  const SignificandDecomposition b = significand(base);
  double acc = 1.0;
  std::int64_t exponent = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    acc *= b.significand;
    exponent += b.exponent;
    if (acc >= 10.0) {
      acc /= 10.0;
      ++exponent;
    }
  }
  return {1, acc, exponent};
}

/// First m significant digits, read from |x| rounded to 15 significant digits
/// (the terminating representation is used, so 2018.9999999999999 gives 2,0,1,9).
inline DigitVector digits(double x, int m) {
  if (m < 1 || m > kFloatDigitBudget) throw DomainError("digit count must be in 1..15");
  if (!std::isfinite(x)) throw DomainError("digits of a non-finite value");
  std::vector<int> out(static_cast<std::size_t>(m), 0);
  if (x == 0.0) return DigitVector(std::move(out));
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.14e", std::fabs(x));
  out[0] = buf[0] - '0';
  for (int j = 1; j < m; ++j) out[static_cast<std::size_t>(j)] = buf[j + 1] - '0';
  return DigitVector(std::move(out));
}

/// D1(x), or 0 for x = 0. Agrees with digits(x, 1).
inline int first_digit(double x) {
  if (x == 0.0) return 0;
  const double s = significand(x).significand;
  const double d = std::floor(s);
  if (s - d < 1.0 - 1e-13) return static_cast<int>(d);
  return digits(x, 1)[0];
}

/// ⟨log10|x|⟩ in [0, 1), with log 0 taken as 0. S(x) = 10^result.
inline double log_significand(double x) {
  if (!std::isfinite(x)) throw DomainError("log significand of a non-finite value");
  if (x == 0.0) return 0.0;
  const double r = std::log10(significand(x).significand);
  return r < 1.0 ? r : std::nextafter(1.0, 0.0);
}

}  // namespace benford

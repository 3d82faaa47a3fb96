#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "benford/detail/mp.hpp"
#include "benford/errors.hpp"
#include "benford/rational.hpp"

namespace benford {

__extension__ using uint128 = unsigned __int128;

/// Signed fixed-point real with a 64-bit integer part and 128 fractional bits.
///
/// Used for decimal logarithms of long products: additions are exact, so the
/// fractional part of a sum of N terms carries no accumulated rounding drift.
/// The value represented is whole() + frac_bits() / 2^128.
class FixedLog {
 public:
  constexpr FixedLog() = default;
  constexpr FixedLog(std::int64_t whole, uint128 frac) : whole_(whole), frac_(frac) {}

  static FixedLog from_long_double(long double x);
  static FixedLog from_double(double x) { return from_long_double(static_cast<long double>(x)); }
  /// Exact m/k (k ≥ 1), truncated toward −∞ at bit 128.
  static FixedLog ratio(std::int64_t m, std::int64_t k);
  /// Rounds a high-precision value to the fixed grid (toward −∞).
  static FixedLog from_big(const detail::BigFloat& x);
  /// log10|q| for a nonzero rational, accurate to about 2^−120.
  static FixedLog log10_of(const Rational& q) {
    return from_big(detail::log10_abs(detail::to_mpq(q), 256));
  }

  [[nodiscard]] constexpr std::int64_t whole() const { return whole_; }
  [[nodiscard]] constexpr uint128 frac_bits() const { return frac_; }

  /// Fractional part in [0, 1), rounded to double.
  [[nodiscard]] double fraction() const {
    const double hi = std::ldexp(static_cast<double>(static_cast<std::uint64_t>(frac_ >> 64)), -64);
    const double lo = std::ldexp(static_cast<double>(static_cast<std::uint64_t>(frac_)), -128);
    const double f = hi + lo;
    return f < 1.0 ? f : std::nextafter(1.0, 0.0);
  }
  [[nodiscard]] double to_double() const { return static_cast<double>(whole_) + fraction(); }
  /// Exact copy into MPFR; prec below 192 bits rounds.
  [[nodiscard]] detail::BigFloat to_big(mpfr_prec_t prec = 256) const;

  FixedLog& operator+=(const FixedLog& o) {
    const uint128 sum = frac_ + o.frac_;
    whole_ += o.whole_ + (sum < frac_ ? 1 : 0);
    frac_ = sum;
    return *this;
  }
  FixedLog& operator-=(const FixedLog& o) { return *this += -o; }
  friend FixedLog operator+(FixedLog a, const FixedLog& b) { return a += b; }
  friend FixedLog operator-(FixedLog a, const FixedLog& b) { return a -= b; }
  FixedLog operator-() const {
    if (frac_ == 0) return {-whole_, 0};
    return {-whole_ - 1, static_cast<uint128>(0) - frac_};
  }

  /// k · this, exact modulo the 64-bit range of the integer part.
  [[nodiscard]] FixedLog times(std::int64_t k) const;

  friend constexpr bool operator==(const FixedLog&, const FixedLog&) = default;

 private:
  std::int64_t whole_ = 0;
  uint128 frac_ = 0;
};

inline FixedLog FixedLog::from_long_double(long double x) {
  if (!std::isfinite(x) || std::fabs(x) >= 0x1p62L) {
    throw DomainError("value out of fixed-point range");
  }
  long double fl = std::floor(x);
  long double f = x - fl;
  if (f >= 1.0L) {  // tiny negative x: 1 − |x| rounded up to 1
    fl += 1.0L;
    f = 0.0L;
  }
  uint128 bits = 0;
  if (f > 0) {
    int e = 0;
    const long double m = std::frexp(f, &e);  // f = m · 2^e, m in [0.5, 1), e <= 0
    const auto mant = static_cast<std::uint64_t>(std::ldexp(m, 64));
    const int shift = 64 + e;
    if (shift >= 0) {
      bits = static_cast<uint128>(mant) << shift;
    } else if (shift > -64) {
      bits = static_cast<uint128>(mant >> (-shift));
    }
  }
  return {static_cast<std::int64_t>(fl), bits};
}

inline FixedLog FixedLog::ratio(std::int64_t m, std::int64_t k) {
  if (k <= 0) throw DomainError("fixed-point ratio needs a positive denominator");
  std::int64_t q = m / k;
  std::int64_t r = m % k;
  if (r < 0) {
    r += k;
    q -= 1;
  }
  const auto uk = static_cast<uint128>(k);
  const uint128 hi_num = static_cast<uint128>(r) << 64;
  const uint128 hi = hi_num / uk;
  const uint128 lo = ((hi_num % uk) << 64) / uk;
  return {q, (hi << 64) | lo};
}

inline FixedLog FixedLog::from_big(const detail::BigFloat& x) {
  const mpfr_prec_t prec = x.prec() + 192;
  detail::BigFloat fl(prec);
  mpfr_floor(fl.get(), x.get());
  if (mpfr_cmp_si(fl.get(), INT64_MAX / 2) > 0 || mpfr_cmp_si(fl.get(), INT64_MIN / 2) < 0) {
    throw DomainError("value out of fixed-point range");
  }
  const auto whole = static_cast<std::int64_t>(mpfr_get_sj(fl.get(), MPFR_RNDN));
  detail::BigFloat f(prec);
  mpfr_sub(f.get(), x.get(), fl.get(), MPFR_RNDN);
  mpfr_mul_2ui(f.get(), f.get(), 128, MPFR_RNDN);
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), f.get(), MPFR_RNDD);
  return {whole, detail::mpz_to_u128(z)};
}

inline detail::BigFloat FixedLog::to_big(mpfr_prec_t prec) const {
  detail::BigFloat out(prec);
  mpfr_set_uj(out.get(), static_cast<std::uint64_t>(frac_ >> 64), MPFR_RNDN);
  mpfr_mul_2ui(out.get(), out.get(), 64, MPFR_RNDN);
  detail::BigFloat lo(prec);
  mpfr_set_uj(lo.get(), static_cast<std::uint64_t>(frac_), MPFR_RNDN);
  mpfr_add(out.get(), out.get(), lo.get(), MPFR_RNDN);
  mpfr_div_2ui(out.get(), out.get(), 128, MPFR_RNDN);
  mpfr_add_si(out.get(), out.get(), static_cast<long>(whole_), MPFR_RNDN);
  return out;
}

inline FixedLog FixedLog::times(std::int64_t k) const {
  if (k == 0) return {};
  if (k < 0) return (-*this).times(-k);
  const auto uk = static_cast<uint128>(static_cast<std::uint64_t>(k));
  const uint128 lo = frac_ & ~static_cast<std::uint64_t>(0);
  const uint128 hi = frac_ >> 64;
  const uint128 lo_prod = uk * lo;
  const uint128 hi_prod = uk * hi;
  const uint128 frac = lo_prod + (hi_prod << 64);
  const uint128 carry = (hi_prod >> 64) + (((lo_prod >> 64) + (hi_prod & ~static_cast<std::uint64_t>(0))) >> 64);
  return {whole_ * k + static_cast<std::int64_t>(carry), frac};
}

}  // namespace benford

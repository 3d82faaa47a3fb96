#pragma once

// Deterministic sequences, generated as ⟨log10 x_n⟩, and a rule-based
// classifier for which of them are Benford.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "benford/detail/mp.hpp"
#include "benford/errors.hpp"
#include "benford/fixed_log.hpp"
#include "benford/mod1.hpp"
#include "benford/rational.hpp"

namespace benford {

/// 10^(m/k), kept with k >= 1 and gcd(m, k) = 1.
struct TenPower {
  std::int64_t m = 0;
  std::int64_t k = 1;
  friend bool operator==(const TenPower&, const TenPower&) = default;
};

/// A positive real given exactly: either a rational or a rational power of ten.
class ExactBase {
 public:
  ExactBase() : v_(Rational(1)) {}
  ExactBase(const Rational& r) : v_(r) {  // NOLINT
    if (r.sign() <= 0) throw DomainError("exact base must be positive");
  }
  ExactBase(std::int64_t num, std::int64_t den = 1) : ExactBase(Rational(num, den)) {}  // NOLINT

  static ExactBase ten_power(std::int64_t m, std::int64_t k) {
    if (k == 0) throw DomainError("10^(m/k) needs k != 0");
    if (k < 0) {
      m = -m;
      k = -k;
    }
    const std::int64_t g = std::gcd(m, k);
    ExactBase b;
    b.v_ = TenPower{m / g, k / g};
    return b;
  }

  /// "2", "3/7", "0.5", "10^3", "10^(1/2)".
  static ExactBase parse(std::string_view text);

  [[nodiscard]] bool is_rational() const { return std::holds_alternative<Rational>(v_); }
  [[nodiscard]] const Rational& rational() const { return std::get<Rational>(v_); }
  [[nodiscard]] const TenPower& ten_exponent() const { return std::get<TenPower>(v_); }

  [[nodiscard]] FixedLog log10() const {
    if (is_rational()) return FixedLog::log10_of(rational());
    return FixedLog::ratio(ten_exponent().m, ten_exponent().k);
  }
  [[nodiscard]] detail::BigFloat log10_big(mpfr_prec_t prec) const {
    if (is_rational()) return detail::log10_abs(detail::to_mpq(rational()), prec);
    detail::BigFloat out(prec);
    mpfr_set_si(out.get(), static_cast<long>(ten_exponent().m), MPFR_RNDN);
    mpfr_div_si(out.get(), out.get(), static_cast<long>(ten_exponent().k), MPFR_RNDN);
    return out;
  }
  [[nodiscard]] double to_double() const {
    if (is_rational()) return rational().to_double();
    return std::pow(10.0, static_cast<double>(ten_exponent().m) / static_cast<double>(ten_exponent().k));
  }
  [[nodiscard]] bool greater_than_one() const {
    if (is_rational()) return rational().num() > rational().den();
    return ten_exponent().m > 0;
  }

  [[nodiscard]] ExactBase reciprocal() const {
    if (is_rational()) return ExactBase(Rational(rational().den(), rational().num()));
    return ten_power(-ten_exponent().m, ten_exponent().k);
  }
  [[nodiscard]] ExactBase pow(std::int64_t e) const;

  [[nodiscard]] std::string to_string() const {
    if (is_rational()) return rational().to_string();
    const auto& t = ten_exponent();
    if (t.k == 1) return "10^" + std::to_string(t.m);
    return "10^(" + std::to_string(t.m) + "/" + std::to_string(t.k) + ")";
  }

  friend bool operator==(const ExactBase&, const ExactBase&) = default;

 private:
  std::variant<Rational, TenPower> v_;
};

inline ExactBase ExactBase::pow(std::int64_t e) const {
  if (!is_rational()) {
    const __int128 m = static_cast<__int128>(ten_exponent().m) * e;
    if (m > INT64_MAX || m < INT64_MIN) throw DomainError("exponent overflow");
    return ten_power(static_cast<std::int64_t>(m), ten_exponent().k);
  }
  const ExactBase base = e < 0 ? reciprocal() : *this;
  const std::int64_t ae = e < 0 ? -e : e;
  mpz_class p, q;
  mpz_pow_ui(p.get_mpz_t(), mpz_class(static_cast<long>(base.rational().num())).get_mpz_t(), static_cast<unsigned long>(ae));
  mpz_pow_ui(q.get_mpz_t(), mpz_class(static_cast<long>(base.rational().den())).get_mpz_t(), static_cast<unsigned long>(ae));
  if (!p.fits_slong_p() || !q.fits_slong_p()) throw DomainError("power of base overflows 64 bits");
  return ExactBase(Rational(p.get_si(), q.get_si()));
}

namespace detail {

inline bool is_power_of_ten(const mpz_class& v) {
  if (v < 1) return false;
  mpz_class x = v;
  while (x % 10 == 0) x /= 10;
  return x == 1;
}

// p/q in lowest terms equals 10^a for an integer a.
inline bool is_integer_power_of_ten(const mpq_class& q) {
  if (q <= 0) return false;
  return (q.get_den() == 1 && is_power_of_ten(q.get_num())) || (q.get_num() == 1 && is_power_of_ten(q.get_den()));
}

}  // namespace detail

/// True iff b = 10^(m/k) for integers m, k != 0.
///
/// For a rational p/q in lowest terms, (p/q)^k = 10^m means p^k = 2^m 5^m q^k
/// with gcd(p, q) = 1, so q^k divides 2^m 5^m and p^k does too. Comparing the
/// exponents of 2 and 5 then forces p/q = 10^(m/k) with k | m, so only integer
/// powers of ten (and reciprocals) qualify.
inline bool is_rational_power_of_ten(const ExactBase& b) {
  if (!b.is_rational()) return true;
  return detail::is_integer_power_of_ten(detail::to_mpq(b.rational()));
}

namespace seq {

struct Power {
  ExactBase base;
};
/// x_{n+1} = a x_n + b.
struct AffineIterate {
  ExactBase a;
  Rational b;
  Rational x0;
};
/// x_n = a n^b.
struct PolynomialTerm {
  Rational a;
  Rational b;
};
/// x_n = n!.
struct Factorial {};
/// x_n = c_1 x_{n-1} + ... + c_k x_{n-k}; the first k terms are init.
struct LinearRecurrence {
  std::vector<Rational> coeffs;
  std::vector<Rational> init;
};
/// x_{n+1} = f(x_n) with f given by coefficients, lowest degree first.
struct PolynomialIterate {
  std::vector<Rational> coeffs;
  Rational x0;
};
/// x_{2j+1} = a1 x_{2j} + b1, x_{2j+2} = a2 x_{2j+1} + b2.
struct AlternatingAffine {
  ExactBase a1;
  Rational b1;
  ExactBase a2;
  Rational b2;
  Rational x0;
};

}  // namespace seq

using SequenceSpec = std::variant<seq::Power, seq::AffineIterate, seq::PolynomialTerm, seq::Factorial,
                                  seq::LinearRecurrence, seq::PolynomialIterate, seq::AlternatingAffine>;

inline seq::LinearRecurrence fibonacci() { return {{Rational(1), Rational(1)}, {Rational(1), Rational(1)}}; }

namespace detail {

inline int polynomial_degree(std::span<const Rational> coeffs) {
  for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) {
    if (coeffs[static_cast<std::size_t>(i)].sign() != 0) return i;
  }
  return -1;
}

}  // namespace detail

/// Throws DomainError when the spec is outside the family it names.
inline void validate(const SequenceSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, seq::AffineIterate>) {
          if (!s.a.greater_than_one()) throw DomainError("affine multiplier must exceed 1");
          if (s.b.sign() < 0) throw DomainError("affine offset must be >= 0");
          if (s.x0.sign() <= 0) throw DomainError("affine start must be > 0");
        } else if constexpr (std::is_same_v<T, seq::AlternatingAffine>) {
          if (!s.a1.greater_than_one() || !s.a2.greater_than_one()) throw DomainError("affine multipliers must exceed 1");
          if (s.b1.sign() < 0 || s.b2.sign() < 0) throw DomainError("affine offsets must be >= 0");
          if (s.x0.sign() <= 0) throw DomainError("affine start must be > 0");
        } else if constexpr (std::is_same_v<T, seq::PolynomialTerm>) {
          if (s.a.sign() == 0) throw DomainError("polynomial term needs a != 0");
        } else if constexpr (std::is_same_v<T, seq::LinearRecurrence>) {
          if (s.coeffs.empty()) throw DomainError("recurrence order must be >= 1");
          if (s.init.size() != s.coeffs.size()) throw DomainError("recurrence needs one initial value per coefficient");
        } else if constexpr (std::is_same_v<T, seq::PolynomialIterate>) {
          if (detail::polynomial_degree(s.coeffs) < 2) throw DomainError("iterated polynomial must have degree >= 2");
        }
      },
      spec);
}

struct GenerateOptions {
  /// Factorial and recurrence terms are exact big integers up to this index.
  std::int64_t exact_limit = 10000;
};

inline constexpr std::int64_t kMaxSequenceLength = 1000000;

/// ⟨log10 |x_n|⟩ as 128 fractional bits; zero terms follow log 0 = 0.
struct LogTerm {
  uint128 frac = 0;
  bool zero = false;
};

namespace detail {

// Rounding in the generators is far below 2^-100. Reading terms through this
// margin puts exact values such as 2·10^k and 10^(3/3) on the right side of
// digit and decade boundaries.
inline constexpr uint128 kBoundaryGuard = static_cast<uint128>(1) << 28;

inline LogTerm term_from_bits(uint128 bits) { return {bits, false}; }
inline LogTerm term_from_big(const BigFloat& l) { return term_from_bits(fraction_bits(l)); }

inline void check_length(std::int64_t n) {
  if (n < 1) throw DomainError("sequence length must be >= 1");
  if (n > kMaxSequenceLength) throw ResourceError("sequence length above 10^6");
}

inline std::vector<LogTerm> gen_power(const seq::Power& s, std::int64_t n) {
  const FixedLog step = s.base.log10();
  std::vector<LogTerm> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 1; i <= n; ++i) out.push_back(term_from_bits(step.times(i).frac_bits()));
  return out;
}

// Affine steps in the log domain: L' = L + log a + log10(1 + (b/a) 10^-L). The
// correction is evaluated in MPFR until it drops below the fixed-point grid.
struct AffineStep {
  FixedLog log_a;
  BigFloat log_a_big;
  std::optional<BigFloat> log_b;

  AffineStep(const ExactBase& a, const Rational& b) : log_a(a.log10()), log_a_big(a.log10_big(256)) {
    if (b.sign() > 0) log_b = log10_abs(to_mpq(b), 256);
  }

  void apply(FixedLog& l) const {
    if (log_b) {
      BigFloat r(256);
      const BigFloat cur = l.to_big(256);
      mpfr_sub(r.get(), log_b->get(), log_a_big.get(), MPFR_RNDN);
      mpfr_sub(r.get(), r.get(), cur.get(), MPFR_RNDN);
      if (mpfr_cmp_si(r.get(), -45) > 0) {
        mpfr_exp10(r.get(), r.get(), MPFR_RNDN);
        mpfr_log1p(r.get(), r.get(), MPFR_RNDN);
        BigFloat ln10(256);
        mpfr_set_ui(ln10.get(), 10, MPFR_RNDN);
        mpfr_log(ln10.get(), ln10.get(), MPFR_RNDN);
        mpfr_div(r.get(), r.get(), ln10.get(), MPFR_RNDN);
        l += FixedLog::from_big(r);
      }
    }
    l += log_a;
  }
};

inline std::vector<LogTerm> gen_affine(const std::vector<const AffineStep*>& steps, const Rational& x0, std::int64_t n) {
  FixedLog l = FixedLog::log10_of(x0);
  std::vector<LogTerm> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    steps[static_cast<std::size_t>(i) % steps.size()]->apply(l);
    out.push_back(term_from_bits(l.frac_bits()));
  }
  return out;
}

inline std::vector<LogTerm> gen_poly_term(const seq::PolynomialTerm& s, std::int64_t n) {
  const BigFloat log_a = log10_abs(to_mpq(s.a), 192);
  const mpq_class b = to_mpq(s.b);
  std::vector<LogTerm> out;
  out.reserve(static_cast<std::size_t>(n));
  BigFloat l(192);
  for (std::int64_t i = 1; i <= n; ++i) {
    mpfr_set_ui(l.get(), static_cast<unsigned long>(i), MPFR_RNDN);
    mpfr_log10(l.get(), l.get(), MPFR_RNDN);
    mpfr_mul_q(l.get(), l.get(), b.get_mpq_t(), MPFR_RNDN);
    mpfr_add(l.get(), l.get(), log_a.get(), MPFR_RNDN);
    out.push_back(term_from_big(l));
  }
  return out;
}

inline LogTerm term_of_exact(const mpq_class& q) {
  if (q == 0) return {0, true};
  return term_from_big(log10_abs(q, 192));
}

inline LogTerm term_of_value(const BigFloat& x) {
  if (x.is_zero()) return {0, true};
  BigFloat l(192);
  BigFloat a(x.prec());
  mpfr_abs(a.get(), x.get(), MPFR_RNDN);
  mpfr_log10(l.get(), a.get(), MPFR_RNDN);
  return term_from_big(l);
}

inline std::vector<LogTerm> gen_factorial(std::int64_t n, const GenerateOptions& opt) {
  std::vector<LogTerm> out;
  out.reserve(static_cast<std::size_t>(n));
  mpz_class acc = 1;
  BigFloat x(256);
  for (std::int64_t i = 1; i <= n; ++i) {
    if (i <= opt.exact_limit) {
      acc *= static_cast<unsigned long>(i);
      out.push_back(term_from_big(log10_abs(acc, 192)));
      if (i == opt.exact_limit) mpfr_set_z(x.get(), acc.get_mpz_t(), MPFR_RNDN);
    } else {
      if (i == 1) mpfr_set_ui(x.get(), 1, MPFR_RNDN);
      mpfr_mul_ui(x.get(), x.get(), static_cast<unsigned long>(i), MPFR_RNDN);
      out.push_back(term_of_value(x));
    }
  }
  return out;
}

inline std::vector<LogTerm> gen_recurrence(const seq::LinearRecurrence& s, std::int64_t n, const GenerateOptions& opt) {
  const std::size_t k = s.coeffs.size();
  std::vector<mpq_class> c;
  for (const auto& r : s.coeffs) c.push_back(to_mpq(r));
  std::vector<mpq_class> window;
  for (const auto& r : s.init) window.push_back(to_mpq(r));

  std::vector<LogTerm> out;
  out.reserve(static_cast<std::size_t>(n));
  std::int64_t i = 0;
  for (; i < n && i < static_cast<std::int64_t>(k); ++i) out.push_back(term_of_exact(window[static_cast<std::size_t>(i)]));
  // window holds x_{i-k} .. x_{i-1}
  for (; i < n && i < opt.exact_limit; ++i) {
    mpq_class next = 0;
    for (std::size_t j = 0; j < k; ++j) next += c[j] * window[k - 1 - j];
    window.erase(window.begin());
    window.push_back(next);
    out.push_back(term_of_exact(next));
  }
  if (i >= n) return out;

  // high-precision float continuation past the exact range
  std::vector<BigFloat> w;
  std::vector<BigFloat> cf;
  for (const auto& q : window) {
    w.emplace_back(256);
    mpfr_set_q(w.back().get(), q.get_mpq_t(), MPFR_RNDN);
  }
  for (const auto& q : c) {
    cf.emplace_back(256);
    mpfr_set_q(cf.back().get(), q.get_mpq_t(), MPFR_RNDN);
  }
  BigFloat next(256), t(256);
  for (; i < n; ++i) {
    mpfr_set_zero(next.get(), 1);
    for (std::size_t j = 0; j < k; ++j) {
      mpfr_mul(t.get(), cf[j].get(), w[k - 1 - j].get(), MPFR_RNDN);
      mpfr_add(next.get(), next.get(), t.get(), MPFR_RNDN);
    }
    std::rotate(w.begin(), w.begin() + 1, w.end());
    mpfr_set(w.back().get(), next.get(), MPFR_RNDN);
    out.push_back(term_of_value(next));
  }
  return out;
}

}  // namespace detail

/// Orbit of a polynomial map carried at a fixed binary precision.
///
/// Values are iterated directly while |x| stays within 10^±150; outside that
/// the orbit is tracked as sign · 10^L with the recurrence expanded about the
/// dominant monomial (the top one far out, the lowest nonconstant one near 0).
/// Iterates of a degree-d map lose about log2(d) bits of their logarithm's
/// fraction per step, so the working precision must cover that for the whole run.
class PolynomialOrbit {
 public:
  static constexpr double kValueLimit = 1e150;

  PolynomialOrbit(std::span<const Rational> coeffs, mpfr_prec_t prec)
      : prec_(prec), x_(prec), l_(prec), corr_(prec), t_(prec) {
    degree_ = detail::polynomial_degree(coeffs);
    if (degree_ < 1) throw DomainError("polynomial orbit needs a nonconstant map");
    for (int i = 0; i <= degree_; ++i) {
      c_.emplace_back(prec);
      set_rational(c_.back(), coeffs[static_cast<std::size_t>(i)]);
      if (coeffs[static_cast<std::size_t>(i)].sign() != 0 && i >= 1 && lowest_ == 0) lowest_ = i;
    }
    constant_ = coeffs[0].sign() != 0;
    for (int e : {degree_, lowest_}) {
      logc_.emplace_back(prec);
      mpfr_abs(logc_.back().get(), c_[static_cast<std::size_t>(e)].get(), MPFR_RNDN);
      mpfr_log10(logc_.back().get(), logc_.back().get(), MPFR_RNDN);
    }
    for (int e : {degree_, lowest_}) {
      auto& row = ratio_.emplace_back();
      for (int i = 0; i <= degree_; ++i) {
        row.emplace_back(prec);
        mpfr_div(row.back().get(), c_[static_cast<std::size_t>(i)].get(), c_[static_cast<std::size_t>(e)].get(),
                 MPFR_RNDN);
      }
    }
  }

  /// Bits needed to follow n steps of a degree-d map from moderate starts.
  static mpfr_prec_t precision_for(std::int64_t n, int degree) {
    return static_cast<mpfr_prec_t>(224 + std::ceil(static_cast<double>(n) * std::log2(static_cast<double>(degree))));
  }

  void start(const detail::BigFloat& x0) {
    mpfr_set(x_.get(), x0.get(), MPFR_RNDN);
    log_mode_ = false;
    maybe_enter_log_mode();
  }

  LogTerm step() {
    if (!log_mode_) {
      horner();
      maybe_enter_log_mode();
    } else {
      log_step();
    }
    if (log_mode_) return detail::term_from_big(l_);
    return detail::term_of_value(x_);
  }

  [[nodiscard]] int degree() const { return degree_; }

 private:
  void horner() {
    detail::BigFloat acc(prec_);
    mpfr_set(acc.get(), c_[static_cast<std::size_t>(degree_)].get(), MPFR_RNDN);
    for (int i = degree_ - 1; i >= 0; --i) {
      mpfr_mul(acc.get(), acc.get(), x_.get(), MPFR_RNDN);
      mpfr_add(acc.get(), acc.get(), c_[static_cast<std::size_t>(i)].get(), MPFR_RNDN);
    }
    mpfr_swap(x_.get(), acc.get());
  }

  void maybe_enter_log_mode() {
    if (x_.is_zero()) return;
    const double ax = std::fabs(x_.to_double());
    const bool huge = ax > kValueLimit;
    const bool tiny = ax < 1.0 / kValueLimit && !constant_;
    if (!huge && !tiny) return;
    sign_ = x_.sign();
    mpfr_abs(l_.get(), x_.get(), MPFR_RNDN);
    mpfr_log10(l_.get(), l_.get(), MPFR_RNDN);
    log_mode_ = true;
  }

  void leave_log_mode() {
    mpfr_exp10(x_.get(), l_.get(), MPFR_RNDN);
    if (sign_ < 0) mpfr_neg(x_.get(), x_.get(), MPFR_RNDN);
    log_mode_ = false;
  }

  void log_step() {
    const bool far = mpfr_sgn(l_.get()) > 0;
    if (!far && constant_) {  // f is close to its constant term here
      leave_log_mode();
      horner();
      maybe_enter_log_mode();
      return;
    }
    const int e = far ? degree_ : lowest_;
    const detail::BigFloat& logc = logc_[far ? 0 : 1];
    const detail::BigFloat& ce = c_[static_cast<std::size_t>(e)];
    const auto& ratios = ratio_[far ? 0 : 1];

    // corr = 1 + Σ_{i≠e} (c_i/c_e) sign^(i−e) 10^((i−e)L)
    mpfr_set_ui(corr_.get(), 1, MPFR_RNDN);
    bool exact_one = true;
    const double lmag = std::fabs(mpfr_get_d(l_.get(), MPFR_RNDN));
    for (int i = 0; i <= degree_; ++i) {
      if (i == e || mpfr_zero_p(c_[static_cast<std::size_t>(i)].get())) continue;
      const detail::BigFloat& r = ratios[static_cast<std::size_t>(i)];
      const double scale_bits = std::log2(std::fabs(mpfr_get_d(r.get(), MPFR_RNDN)));
      const double exp_bits = -std::abs(i - e) * lmag * std::log2(10.0);
      if (exp_bits + scale_bits < -static_cast<double>(prec_ + 16)) continue;
      mpfr_mul_si(t_.get(), l_.get(), i - e, MPFR_RNDN);
      mpfr_exp10(t_.get(), t_.get(), MPFR_RNDN);
      mpfr_mul(t_.get(), t_.get(), r.get(), MPFR_RNDN);
      if (sign_ < 0 && ((i - e) & 1)) mpfr_neg(t_.get(), t_.get(), MPFR_RNDN);
      mpfr_add(corr_.get(), corr_.get(), t_.get(), MPFR_RNDN);
      exact_one = false;
    }
    if (mpfr_sgn(corr_.get()) == 0) {  // exact cancellation; fall back to values
      leave_log_mode();
      horner();
      maybe_enter_log_mode();
      return;
    }
    int s = mpfr_sgn(ce.get()) * (sign_ < 0 && (e & 1) ? -1 : 1);
    if (mpfr_sgn(corr_.get()) < 0) s = -s;
    mpfr_mul_si(l_.get(), l_.get(), e, MPFR_RNDN);
    if (!mpfr_zero_p(logc.get())) mpfr_add(l_.get(), l_.get(), logc.get(), MPFR_RNDN);
    if (!exact_one) {
      mpfr_abs(corr_.get(), corr_.get(), MPFR_RNDN);
      mpfr_log10(corr_.get(), corr_.get(), MPFR_RNDN);
      mpfr_add(l_.get(), l_.get(), corr_.get(), MPFR_RNDN);
    }
    sign_ = s;
    if (std::fabs(mpfr_get_d(l_.get(), MPFR_RNDN)) < 140.0) leave_log_mode();
  }

  mpfr_prec_t prec_;
  int degree_ = 0;
  int lowest_ = 0;
  bool constant_ = false;
  std::vector<detail::BigFloat> c_;
  std::vector<detail::BigFloat> logc_;
  std::vector<std::vector<detail::BigFloat>> ratio_;  // c_i / c_e for e = degree, lowest
  detail::BigFloat x_;
  detail::BigFloat l_;
  detail::BigFloat corr_;
  detail::BigFloat t_;
  int sign_ = 1;
  bool log_mode_ = false;
};

/// Cap on steps × working bits for polynomial orbits.
inline constexpr double kOrbitWorkBudget = 2e11;

inline std::vector<LogTerm> polynomial_orbit_terms(std::span<const Rational> coeffs, const detail::BigFloat& x0,
                                                   std::int64_t n, mpfr_prec_t prec) {
  if (static_cast<double>(n) * static_cast<double>(prec) > kOrbitWorkBudget) {
    throw ResourceError("polynomial orbit too long for its precision budget");
  }
  PolynomialOrbit orbit(coeffs, prec);
  orbit.start(x0);
  std::vector<LogTerm> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) out.push_back(orbit.step());
  return out;
}

/// Terms 1..n of the sequence as 128-bit log fractions.
inline std::vector<LogTerm> generate_terms(const SequenceSpec& spec, std::int64_t n, const GenerateOptions& opt = {}) {
  validate(spec);
  detail::check_length(n);
  return std::visit(
      [&](const auto& s) -> std::vector<LogTerm> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, seq::Power>) {
          return detail::gen_power(s, n);
        } else if constexpr (std::is_same_v<T, seq::AffineIterate>) {
          const detail::AffineStep st(s.a, s.b);
          return detail::gen_affine({&st}, s.x0, n);
        } else if constexpr (std::is_same_v<T, seq::AlternatingAffine>) {
          const detail::AffineStep s1(s.a1, s.b1);
          const detail::AffineStep s2(s.a2, s.b2);
          return detail::gen_affine({&s1, &s2}, s.x0, n);
        } else if constexpr (std::is_same_v<T, seq::PolynomialTerm>) {
          return detail::gen_poly_term(s, n);
        } else if constexpr (std::is_same_v<T, seq::Factorial>) {
          return detail::gen_factorial(n, opt);
        } else if constexpr (std::is_same_v<T, seq::LinearRecurrence>) {
          return detail::gen_recurrence(s, n, opt);
        } else {
          const int d = detail::polynomial_degree(s.coeffs);
          const mpfr_prec_t prec = PolynomialOrbit::precision_for(n, d);
          detail::BigFloat x0(prec);
          set_rational(x0, s.x0);
          return polynomial_orbit_terms(s.coeffs, x0, n, prec);
        }
      },
      spec);
}

inline double term_fraction(const LogTerm& t) {
  if (t.zero || t.frac + detail::kBoundaryGuard < t.frac) return 0.0;
  return FixedLog(0, t.frac).fraction();
}

/// D1 of a term from its log fraction; 0 for a zero term.
inline int term_first_digit(const LogTerm& t) {
  static const std::vector<uint128> cuts = [] {
    std::vector<uint128> v;
    for (int d = 2; d <= 9; ++d) v.push_back(FixedLog::log10_of(Rational(d)).frac_bits());
    return v;
  }();
  if (t.zero) return 0;
  const uint128 f = t.frac + detail::kBoundaryGuard;
  return 1 + static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), f) - cuts.begin());
}

/// S(x_n) = 10^⟨log10 |x_n|⟩, or 0 for a zero term.
inline double term_significand(const LogTerm& t) {
  if (t.zero) return 0.0;
  const double s = std::pow(10.0, term_fraction(t));
  return s < 10.0 ? s : std::nextafter(10.0, 0.0);
}

inline Mod1Sequence to_mod1(std::span<const LogTerm> terms) {
  std::vector<double> v;
  v.reserve(terms.size());
  for (const auto& t : terms) v.push_back(term_fraction(t));
  return Mod1Sequence(std::move(v));
}

/// ⟨log10 x_1⟩, ..., ⟨log10 x_n⟩.
inline Mod1Sequence generate(const SequenceSpec& spec, std::int64_t n, const GenerateOptions& opt = {}) {
  return to_mod1(generate_terms(spec, n, opt));
}

/// First digits observed among the first n terms.
inline std::set<int> first_digit_support(const SequenceSpec& spec, std::int64_t n) {
  if (n < 1 || n > 100000) throw DomainError("first_digit_support needs 1 <= n <= 10^5");
  std::set<int> out;
  for (const auto& t : generate_terms(spec, n)) out.insert(term_first_digit(t));
  return out;
}

enum class Verdict { Benford, NotBenford, Unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Benford: return "Benford";
    case Verdict::NotBenford: return "NotBenford";
    case Verdict::Unknown: return "Unknown";
  }
  return "?";
}

struct BenfordClassification {
  Verdict verdict = Verdict::Unknown;
  std::string rule;  // empty or "open-problem" when the verdict is Unknown
  std::string note;
};

namespace detail {

inline bool product_is_rational_power_of_ten(const ExactBase& a, const ExactBase& b) {
  if (!a.is_rational() && !b.is_rational()) return true;
  if (!a.is_rational()) return is_rational_power_of_ten(b);
  if (!b.is_rational()) return is_rational_power_of_ten(a);
  mpq_class q = to_mpq(a.rational()) * to_mpq(b.rational());
  q.canonicalize();
  return is_integer_power_of_ten(q);
}

inline BenfordClassification multiplier_verdict(bool rpt, const char* rule, const char* what) {
  if (rpt) return {Verdict::NotBenford, rule, std::string(what) + " is a rational power of 10"};
  return {Verdict::Benford, rule, std::string(what) + " is not a rational power of 10"};
}

}  // namespace detail

inline BenfordClassification classify(const SequenceSpec& spec) {
  validate(spec);
  return std::visit(
      [](const auto& s) -> BenfordClassification {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, seq::Power>) {
          return detail::multiplier_verdict(is_rational_power_of_ten(s.base), "geometric-multiplier", "multiplier");
        } else if constexpr (std::is_same_v<T, seq::AffineIterate>) {
          return detail::multiplier_verdict(is_rational_power_of_ten(s.a), "affine-multiplier", "multiplier");
        } else if constexpr (std::is_same_v<T, seq::AlternatingAffine>) {
          return detail::multiplier_verdict(detail::product_is_rational_power_of_ten(s.a1, s.a2),
                                            "alternating-affine-product", "product of multipliers");
        } else if constexpr (std::is_same_v<T, seq::PolynomialTerm>) {
          return {Verdict::NotBenford, "polynomial-growth", "sequences a·n^b are never Benford"};
        } else if constexpr (std::is_same_v<T, seq::Factorial>) {
          return {Verdict::Benford, "known-sequence", "factorials are Benford"};
        } else if constexpr (std::is_same_v<T, seq::LinearRecurrence>) {
          const bool fib = s.coeffs.size() == 2 && s.coeffs[0] == Rational(1) && s.coeffs[1] == Rational(1) &&
                           s.init[0].sign() >= 0 && s.init[1].sign() >= 0 &&
                           (s.init[0].sign() > 0 || s.init[1].sign() > 0);
          if (fib) return {Verdict::Benford, "known-sequence", "Fibonacci-type recurrences are Benford"};
          return {Verdict::Unknown, "", "general linear recurrences are not classified"};
        } else {
          return {Verdict::Unknown, "open-problem",
                  "it is unknown whether this orbit is Benford; orbits from continuous random starts are "
                  "Benford with probability one"};
        }
      },
      spec);
}

// ---- text form used by the command line ----

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Splits on commas that are not inside brackets.
inline std::vector<std::string_view> split_top(std::string_view s) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '[' || s[i] == '(') ++depth;
    if (s[i] == ']' || s[i] == ')') --depth;
    if (s[i] == ',' && depth == 0) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (start < s.size()) out.push_back(trim(s.substr(start)));
  return out;
}

struct KeyValues {
  std::vector<std::pair<std::string, std::string>> items;

  [[nodiscard]] std::optional<std::string> get(const std::string& key) const {
    for (const auto& [k, v] : items) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
  [[nodiscard]] std::string need(const std::string& key) const {
    auto v = get(key);
    if (!v) throw DomainError("missing parameter '" + key + "'");
    return *v;
  }
};

inline KeyValues parse_key_values(std::string_view s, std::initializer_list<std::string_view> allowed) {
  KeyValues kv;
  for (auto part : split_top(s)) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw DomainError("expected key=value, got '" + std::string(part) + "'");
    std::string key(trim(part.substr(0, eq)));
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw DomainError("unknown parameter '" + key + "'");
    }
    kv.items.emplace_back(key, std::string(trim(part.substr(eq + 1))));
  }
  return kv;
}

inline std::vector<Rational> parse_rational_list(std::string_view s) {
  s = trim(s);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw DomainError("expected a [..] list");
  std::vector<Rational> out;
  for (auto part : split_top(s.substr(1, s.size() - 2))) out.push_back(Rational::parse(part));
  return out;
}

inline std::string list_to_string(const std::vector<Rational>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += v[i].to_string();
  }
  return s + "]";
}

}  // namespace detail

inline ExactBase ExactBase::parse(std::string_view text) {
  text = detail::trim(text);
  if (text.starts_with("10^")) {
    std::string_view e = text.substr(3);
    if (e.size() >= 2 && e.front() == '(' && e.back() == ')') e = e.substr(1, e.size() - 2);
    const Rational r = Rational::parse(e);
    return ten_power(r.num(), r.den());
  }
  return ExactBase(Rational::parse(text));
}

/// Parses "power:2", "affine:a=2,b=1,x0=1", "fib", "poly-iter:f=[1,0,1],x0=1", ...
inline SequenceSpec parse_sequence_spec(std::string_view text) {
  text = detail::trim(text);
  const auto colon = text.find(':');
  const std::string kind(text.substr(0, colon));
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  SequenceSpec spec;
  if (kind == "power") {
    spec = seq::Power{ExactBase::parse(rest)};
  } else if (kind == "affine") {
    const auto kv = detail::parse_key_values(rest, {"a", "b", "x0"});
    spec = seq::AffineIterate{ExactBase::parse(kv.need("a")), Rational::parse(kv.get("b").value_or("0")),
                              Rational::parse(kv.get("x0").value_or("1"))};
  } else if (kind == "poly-term") {
    const auto kv = detail::parse_key_values(rest, {"a", "b"});
    spec = seq::PolynomialTerm{Rational::parse(kv.get("a").value_or("1")), Rational::parse(kv.need("b"))};
  } else if (kind == "factorial") {
    spec = seq::Factorial{};
  } else if (kind == "fib") {
    spec = fibonacci();
  } else if (kind == "recurrence") {
    const auto kv = detail::parse_key_values(rest, {"c", "init"});
    spec = seq::LinearRecurrence{detail::parse_rational_list(kv.need("c")), detail::parse_rational_list(kv.need("init"))};
  } else if (kind == "poly-iter") {
    const auto kv = detail::parse_key_values(rest, {"f", "x0"});
    spec = seq::PolynomialIterate{detail::parse_rational_list(kv.need("f")), Rational::parse(kv.need("x0"))};
  } else if (kind == "alt-affine") {
    const auto kv = detail::parse_key_values(rest, {"a1", "b1", "a2", "b2", "x0"});
    spec = seq::AlternatingAffine{ExactBase::parse(kv.need("a1")), Rational::parse(kv.get("b1").value_or("0")),
                                  ExactBase::parse(kv.need("a2")), Rational::parse(kv.get("b2").value_or("0")),
                                  Rational::parse(kv.get("x0").value_or("1"))};
  } else {
    throw DomainError("unknown sequence kind '" + kind + "'");
  }
  if (kind != "factorial" && kind != "fib" && rest.empty()) throw DomainError("sequence '" + kind + "' needs parameters");
  validate(spec);
  return spec;
}

inline std::string to_string(const SequenceSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, seq::Power>) {
          return "power:" + s.base.to_string();
        } else if constexpr (std::is_same_v<T, seq::AffineIterate>) {
          return "affine:a=" + s.a.to_string() + ",b=" + s.b.to_string() + ",x0=" + s.x0.to_string();
        } else if constexpr (std::is_same_v<T, seq::PolynomialTerm>) {
          return "poly-term:a=" + s.a.to_string() + ",b=" + s.b.to_string();
        } else if constexpr (std::is_same_v<T, seq::Factorial>) {
          return "factorial";
        } else if constexpr (std::is_same_v<T, seq::LinearRecurrence>) {
          return "recurrence:c=" + detail::list_to_string(s.coeffs) + ",init=" + detail::list_to_string(s.init);
        } else if constexpr (std::is_same_v<T, seq::PolynomialIterate>) {
          return "poly-iter:f=" + detail::list_to_string(s.coeffs) + ",x0=" + s.x0.to_string();
        } else {
          return "alt-affine:a1=" + s.a1.to_string() + ",b1=" + s.b1.to_string() + ",a2=" + s.a2.to_string() +
                 ",b2=" + s.b2.to_string() + ",x0=" + s.x0.to_string();
        }
      },
      spec);
}

}  // namespace benford

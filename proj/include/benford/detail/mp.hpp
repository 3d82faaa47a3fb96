#pragma once

// Thin RAII layer over MPFR plus GMP conversion helpers. Everything that needs
// more than 64 bits of precision goes through here.

#include <cstdint>  // before mpfr.h, for the intmax_t entry points
#include <utility>

#include <gmpxx.h>
#include <mpfr.h>

#include "benford/rational.hpp"

namespace benford::detail {

class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  BigFloat(mpfr_prec_t prec, double x) : BigFloat(prec) { mpfr_set_d(v_, x, MPFR_RNDN); }

  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  [[nodiscard]] mpfr_srcptr get() const { return v_; }
  [[nodiscard]] mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  [[nodiscard]] double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  [[nodiscard]] bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  [[nodiscard]] int sign() const { return mpfr_sgn(v_); }

 private:
  mpfr_t v_;
};

inline mpq_class to_mpq(const Rational& r) {
  mpq_class q(mpz_class(static_cast<long>(r.num())), mpz_class(static_cast<long>(r.den())));
  q.canonicalize();
  return q;
}

inline void set_rational(BigFloat& out, const Rational& r) {
  const mpq_class q = to_mpq(r);
  mpfr_set_q(out.get(), q.get_mpq_t(), MPFR_RNDN);
}

/// log10|q| at the requested precision; q must be nonzero.
inline BigFloat log10_abs(const mpq_class& q, mpfr_prec_t prec) {
  BigFloat x(prec + 16);
  mpfr_set_q(x.get(), q.get_mpq_t(), MPFR_RNDN);
  mpfr_abs(x.get(), x.get(), MPFR_RNDN);
  BigFloat out(prec);
  mpfr_log10(out.get(), x.get(), MPFR_RNDN);
  return out;
}

inline BigFloat log10_abs(const mpz_class& z, mpfr_prec_t prec) {
  BigFloat x(prec + 16);
  mpfr_set_z(x.get(), z.get_mpz_t(), MPFR_RNDN);
  mpfr_abs(x.get(), x.get(), MPFR_RNDN);
  BigFloat out(prec);
  mpfr_log10(out.get(), x.get(), MPFR_RNDN);
  return out;
}

/// x − ⌊x⌋ rounded toward zero, so the result is always in [0, 1).
inline double fractional_part(const BigFloat& x) {
  BigFloat fl(x.prec());
  mpfr_floor(fl.get(), x.get());
  BigFloat diff(x.prec());
  mpfr_sub(diff.get(), x.get(), fl.get(), MPFR_RNDN);  // exact
  return mpfr_get_d(diff.get(), MPFR_RNDD);
}

inline unsigned __int128 mpz_to_u128(const mpz_class& z);

/// Top 128 bits of x − ⌊x⌋, truncated. Exact for any magnitude that fits x's precision.
inline unsigned __int128 fraction_bits(const BigFloat& x) {
  BigFloat fl(x.prec());
  mpfr_floor(fl.get(), x.get());
  BigFloat f(x.prec());
  mpfr_sub(f.get(), x.get(), fl.get(), MPFR_RNDD);
  mpfr_mul_2ui(f.get(), f.get(), 128, MPFR_RNDD);
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), f.get(), MPFR_RNDD);
  return mpz_to_u128(z);
}

inline unsigned __int128 mpz_to_u128(const mpz_class& z) {
  unsigned __int128 out = 0;
  std::size_t count = 0;
  std::uint64_t words[2] = {0, 0};
  mpz_export(words, &count, -1, sizeof(std::uint64_t), 0, 0, z.get_mpz_t());
  out = (static_cast<unsigned __int128>(words[1]) << 64) | words[0];
  return out;
}

}  // namespace benford::detail

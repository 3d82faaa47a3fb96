#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>

#include "benford/significand.hpp"

using namespace benford;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<int> as_vec(const DigitVector& v) { return {v.digits().begin(), v.digits().end()}; }

}  // namespace

TEST_CASE("significand: worked examples") {
  const auto a = benford::significand(2019.0);
  CHECK(a.sign == 1);
  CHECK(a.significand == 2.019);
  CHECK(a.exponent == 3);

  CHECK(benford::significand(0.0) == SignificandDecomposition{});

  const auto b = benford::significand(-20.19);
  CHECK(b.sign == -1);
  CHECK(b.significand == 2.019);
  CHECK(b.exponent == 1);

  const auto c = benford::significand(0.02019);
  CHECK(c.significand == 2.019);
  CHECK(c.exponent == -2);

  CHECK_THROWS_AS(benford::significand(INFINITY), DomainError);
  CHECK_THROWS_AS(benford::significand(std::nan("")), DomainError);
}

TEST_CASE("significand: negation only flips the sign") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> expo(-300, 300);
  for (int i = 0; i < 10000; ++i) {
    const double x = std::pow(10.0, expo(rng));
    auto p = benford::significand(x);
    auto m = benford::significand(-x);
    REQUIRE(m.sign == -1);
    m.sign = 1;
    REQUIRE(p == m);
  }
}

TEST_CASE("significand: exact powers of ten") {
  for (int k = -300; k <= 300; ++k) {
    const double x = std::strtod(("1e" + std::to_string(k)).c_str(), nullptr);
    const auto d = benford::significand(x);
    REQUIRE(d.significand == 1.0);
    REQUIRE(d.exponent == k);
    REQUIRE(log_significand(x) == 0.0);
  }
}

TEST_CASE("significand: round trip on random doubles") {
  std::mt19937_64 rng(20190);
  std::uniform_int_distribution<int> e(-1020, 1020);
  std::uniform_real_distribution<double> m(0.5, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    double x = std::ldexp(m(rng), e(rng));
    if (i & 1) x = -x;
    const auto d = benford::significand(x);
    REQUIRE(d.significand >= 1.0);
    REQUIRE(d.significand < 10.0);
    REQUIRE(d.sign == (x < 0 ? -1 : 1));
    const long double back = d.sign * static_cast<long double>(d.significand) * std::pow(10.0L, d.exponent);
    worst = std::max(worst, static_cast<double>(std::fabs((back - x) / x)));
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("significand: scaling by 10^k leaves digits alone") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> mant(100000000000LL, 999999999999LL);
  std::uniform_int_distribution<int> shift(-20, 20);
  for (int i = 0; i < 20000; ++i) {
    const std::string body = std::to_string(mant(rng));
    const double x = std::strtod((body + "e-7").c_str(), nullptr);
    const int k = shift(rng);
    const double y = std::strtod((body + "e" + std::to_string(k - 7)).c_str(), nullptr);
    REQUIRE(digits(x, 15) == digits(y, 15));
    REQUIRE_THAT(benford::significand(y).significand, WithinRel(benford::significand(x).significand, 1e-15));
    REQUIRE(benford::significand(y).exponent == benford::significand(x).exponent + k);
  }
  // the multiplied double, not a re-parsed one
  CHECK(digits(3.14159 * 100.0, 6) == digits(3.14159, 6));
}

TEST_CASE("significand: boundary clamp keeps [1, 10)") {
  const auto d = significand_exact_pow(Rational(999999999999999999LL, 100000000000000000LL), 1);
  CHECK(d.significand == 1.0);
  CHECK(d.exponent == 1);
  CHECK(as_vec(digits(9.999999999999999, 3)) == std::vector<int>{1, 0, 0});
  const auto e = benford::significand(9.999999999999998);
  CHECK(e.significand == 1.0);
  CHECK(e.exponent == 1);
  CHECK(benford::significand(1e23).exponent == 23);
  CHECK(benford::significand(9.99999999999999e5).significand < 10.0);
}

TEST_CASE("digits: worked examples") {
  CHECK(as_vec(digits(2019, 4)) == std::vector<int>{2, 0, 1, 9});
  CHECK(as_vec(digits(2019, 6)) == std::vector<int>{2, 0, 1, 9, 0, 0});
  CHECK(as_vec(digits(-20.19, 1)) == std::vector<int>{2});
  CHECK(as_vec(digits(2018.9999999999999, 4)) == std::vector<int>{2, 0, 1, 9});
  CHECK(digits(0.0, 3).is_zero());
  CHECK(as_vec(digits(0.0, 3)) == std::vector<int>{0, 0, 0});
  CHECK_THROWS_AS(digits(1.0, 0), DomainError);
  CHECK_THROWS_AS(digits(1.0, 16), DomainError);
  CHECK_THROWS_AS(DigitVector({0, 3}), DomainError);
  CHECK_THROWS_AS(DigitVector({3, 10}), DomainError);
  CHECK_THROWS_AS(DigitVector(std::vector<int>{}), DomainError);
}

TEST_CASE("digits: prefix consistency and first digit agreement") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> expo(-200, 200);
  for (int i = 0; i < 20000; ++i) {
    const double x = std::pow(10.0, expo(rng));
    const auto full = digits(x, 15);
    for (int j = 1; j <= 15; ++j) {
      const auto p = digits(x, j);
      for (int t = 0; t < j; ++t) REQUIRE(p[static_cast<std::size_t>(t)] == full[static_cast<std::size_t>(t)]);
    }
    REQUIRE(first_digit(x) == full[0]);
  }
}

TEST_CASE("log significand") {
  CHECK_THAT(log_significand(2.0), WithinAbs(0.30102999566398120, 1e-15));
  CHECK(log_significand(-20.19) == log_significand(2.019));
  CHECK(log_significand(0.0) == 0.0);
  CHECK_THROWS_AS(log_significand(NAN), DomainError);
  const double r = log_significand(7.5e-42);
  CHECK_THAT(std::pow(10.0, r), WithinRel(7.5, 1e-14));
}

TEST_CASE("exact pow: worked examples") {
  auto a = significand_exact_pow(Rational(2), 10);
  CHECK(a.significand == 1.024);
  CHECK(a.exponent == 3);
  auto b = significand_exact_pow(Rational(10), 7);
  CHECK(b.significand == 1.0);
  CHECK(b.exponent == 7);
  auto c = significand_exact_pow(Rational(1, 2), 3);
  CHECK(c.significand == 1.25);
  CHECK(c.exponent == -1);
  CHECK_THROWS_AS(significand_exact_pow(Rational(-2), 3), DomainError);
  CHECK_THROWS_AS(significand_exact_pow(Rational(2), 0), DomainError);
}

TEST_CASE("exact pow: large exponents against a high-precision log oracle") {
  auto a = significand_exact_pow(Rational(2), 100000);
  CHECK(a.exponent == 30102);
  CHECK(a.significand == 9.990020930143845079);
  auto b = significand_exact_pow(Rational(3, 7), 12345);
  CHECK(b.exponent == -4543);
  CHECK(b.significand == 2.121219145274165098);
  auto c = significand_exact_pow(Rational(999999, 1000000), 100000);
  CHECK(c.exponent == -1);
  CHECK(c.significand == 9.048373727940596411);
}

TEST_CASE("exact pow: budget") {
  CHECK_THROWS_AS(significand_exact_pow(Rational(999999, 1000000), 10000000), ResourceError);
  CHECK_THROWS_AS(significand_exact_pow(Rational(3), 1000, 100), ResourceError);
}

TEST_CASE("exact and float power paths agree") {
  const std::vector<Rational> bases = {Rational(2), Rational(3), Rational(7), Rational(1, 2), Rational(3, 7),
                                        Rational(11, 10), Rational(999, 1000)};
  for (const auto& base : bases) {
    for (std::int64_t n : {1, 2, 3, 10, 57, 100, 500, 1000}) {
      const auto e = significand_exact_pow(base, n);
      const auto f = significand_pow(base.to_double(), n);
      double fs = f.significand;
      std::int64_t fe = f.exponent;
      // the float path may sit a hair on the other side of a decade
      if (fe == e.exponent - 1) {
        fs /= 10.0;
        fe += 1;
      } else if (fe == e.exponent + 1) {
        fs *= 10.0;
        fe -= 1;
      }
      INFO(base.to_string() << "^" << n);
      REQUIRE(fe == e.exponent);
      REQUIRE_THAT(fs, WithinRel(e.significand, 1e-12));
    }
  }
}

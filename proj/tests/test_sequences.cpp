#include <catch_amalgamated.hpp>

#include <cmath>

#include "benford/sequences.hpp"

using namespace benford;
using Catch::Matchers::WithinAbs;

namespace {

double disc(const SequenceSpec& s, std::int64_t n) { return star_discrepancy(generate(s, n)).star_discrepancy; }

double exact_log_frac(const mpq_class& q) { return detail::fractional_part(detail::log10_abs(q, 192)); }

// S(z) from the leading decimal digits of an exact integer
double leading_significand(const mpz_class& z) {
  const std::string s = z.get_str();
  const std::string head = s.substr(0, 1) + "." + s.substr(1, 17);
  return std::strtod(head.c_str(), nullptr);
}

}  // namespace

TEST_CASE("generate: worked examples") {
  const auto p = generate(seq::Power{2}, 3);
  CHECK_THAT(p[0], WithinAbs(std::log10(2.0), 1e-15));
  CHECK_THAT(p[1], WithinAbs(std::log10(4.0), 1e-15));
  CHECK_THAT(p[2], WithinAbs(std::log10(8.0), 1e-15));

  const auto f = generate(seq::Factorial{}, 5);
  const double fact[5] = {1, 2, 6, 24, 120};
  for (int i = 0; i < 5; ++i) CHECK_THAT(f[static_cast<std::size_t>(i)], WithinAbs(frac(std::log10(fact[i])), 1e-15));

  const auto a = generate(seq::AffineIterate{2, 1, 1}, 3);
  const double aff[3] = {3, 7, 15};
  for (int i = 0; i < 3; ++i) CHECK_THAT(a[static_cast<std::size_t>(i)], WithinAbs(frac(std::log10(aff[i])), 1e-15));

  const auto alt = generate_terms(seq::AlternatingAffine{2, 0, 3, 0, 1}, 5);
  const double want[5] = {2, 6, 12, 36, 72};
  for (int i = 0; i < 5; ++i) CHECK_THAT(term_significand(alt[static_cast<std::size_t>(i)]), WithinAbs(benford::significand(want[i]).significand, 1e-14));
}

TEST_CASE("generate: errors") {
  CHECK_THROWS_AS(generate(seq::Power{2}, 0), DomainError);
  CHECK_THROWS_AS(generate(seq::Power{2}, 1000001), ResourceError);
  CHECK_THROWS_AS(generate(seq::AffineIterate{ExactBase(1, 2), 0, 1}, 10), DomainError);
  CHECK_THROWS_AS(generate(seq::AffineIterate{2, -1, 1}, 10), DomainError);
  CHECK_THROWS_AS(generate(seq::LinearRecurrence{{1, 1}, {1}}, 10), DomainError);
  CHECK_THROWS_AS(generate(seq::LinearRecurrence{{}, {}}, 10), DomainError);
  CHECK_THROWS_AS(generate(seq::PolynomialIterate{{1, 2}, 1}, 10), DomainError);
  CHECK_THROWS_AS(generate(seq::PolynomialTerm{0, 1}, 10), DomainError);
  CHECK_THROWS_AS(ExactBase(-2), DomainError);
  CHECK_THROWS_AS(ExactBase::ten_power(1, 0), DomainError);
}

TEST_CASE("rational powers of ten") {
  CHECK_FALSE(is_rational_power_of_ten(ExactBase(2)));
  CHECK(is_rational_power_of_ten(ExactBase::ten_power(1, 2)));
  CHECK(is_rational_power_of_ten(ExactBase(100)));
  CHECK(is_rational_power_of_ten(ExactBase(1, 1000)));
  CHECK(is_rational_power_of_ten(ExactBase(1)));
  CHECK_FALSE(is_rational_power_of_ten(ExactBase(20)));
  CHECK_FALSE(is_rational_power_of_ten(ExactBase(10, 3)));
  CHECK(ExactBase::ten_power(2, -4) == ExactBase::ten_power(-1, 2));
}

TEST_CASE("rational powers of ten: brute-force check of the lemma") {
  // (p/q)^k = 10^m for some k in 1..6 exactly when p/q is an integer power of ten
  for (long p = 1; p <= 120; ++p) {
    for (long q = 1; q <= 120; ++q) {
      if (std::gcd(p, q) != 1) continue;
      bool found = false;
      for (unsigned long k = 1; k <= 6 && !found; ++k) {
        mpz_class pk, qk;
        mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), k);
        mpz_ui_pow_ui(qk.get_mpz_t(), static_cast<unsigned long>(q), k);
        for (int m = -15; m <= 15 && !found; ++m) {
          mpz_class ten;
          mpz_ui_pow_ui(ten.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(m)));
          found = m >= 0 ? pk == qk * ten : pk * ten == qk;
        }
      }
      INFO(p << "/" << q);
      REQUIRE(found == is_rational_power_of_ten(ExactBase(p, q)));
    }
  }
}

TEST_CASE("classify: worked examples") {
  auto c = classify(seq::Power{2});
  CHECK(c.verdict == Verdict::Benford);
  CHECK(c.rule == "geometric-multiplier");
  c = classify(seq::Power{ExactBase::ten_power(1, 2)});
  CHECK(c.verdict == Verdict::NotBenford);
  CHECK(c.note == "multiplier is a rational power of 10");
  CHECK(classify(seq::AlternatingAffine{2, 0, 3, 0, 1}).verdict == Verdict::Benford);
  CHECK(classify(seq::AlternatingAffine{2, 0, 5, 0, 1}).verdict == Verdict::NotBenford);
  CHECK(classify(seq::AlternatingAffine{ExactBase::ten_power(1, 2), 1, ExactBase::ten_power(1, 2), 0, 1}).verdict ==
        Verdict::NotBenford);
  CHECK(classify(seq::AlternatingAffine{ExactBase::ten_power(1, 2), 0, 2, 0, 1}).verdict == Verdict::Benford);
  CHECK(classify(seq::AffineIterate{2, 1, 1}).verdict == Verdict::Benford);
  CHECK(classify(seq::AffineIterate{10, 1, 1}).verdict == Verdict::NotBenford);
  CHECK(classify(seq::PolynomialTerm{1, 2}).verdict == Verdict::NotBenford);
  CHECK(classify(seq::Factorial{}).verdict == Verdict::Benford);
  CHECK(classify(fibonacci()).verdict == Verdict::Benford);

  const auto rec = classify(seq::LinearRecurrence{{2, 3}, {1, 1}});
  CHECK(rec.verdict == Verdict::Unknown);
  CHECK(rec.rule.empty());
  const auto it = classify(seq::PolynomialIterate{{1, 0, 1}, 1});
  CHECK(it.verdict == Verdict::Unknown);
  CHECK(it.rule == "open-problem");
}

TEST_CASE("first digit support") {
  CHECK(first_digit_support(seq::AffineIterate{ExactBase::ten_power(1, 2), 0, 1}, 100) == std::set<int>{1, 3});
  CHECK(first_digit_support(seq::Power{10}, 50) == std::set<int>{1});
  CHECK(first_digit_support(fibonacci(), 10) == std::set<int>{1, 2, 3, 5, 8});
  CHECK(first_digit_support(seq::Power{ExactBase::ten_power(1, 3)}, 300) == std::set<int>{1, 2, 4});
  CHECK(first_digit_support(seq::AffineIterate{2, 0, 5}, 4) == std::set<int>{1, 2, 4, 8});
  CHECK_THROWS_AS(first_digit_support(seq::Power{2}, 100001), DomainError);
}

TEST_CASE("classifier soundness at 10^5 terms") {
  const std::vector<SequenceSpec> specs = {
      seq::Power{2},
      seq::Power{ExactBase(3, 7)},
      seq::Power{ExactBase(11, 10)},
      seq::Power{ExactBase::ten_power(1, 2)},
      seq::Power{ExactBase::ten_power(2, 3)},
      seq::Power{100},
      seq::AffineIterate{2, 1, 1},
      seq::AffineIterate{ExactBase(3, 2), 5, 7},
      seq::AffineIterate{10, 1, 1},
      seq::AffineIterate{ExactBase::ten_power(1, 2), 3, 1},
      seq::AlternatingAffine{2, 0, 3, 0, 1},
      seq::AlternatingAffine{2, 1, 5, 0, 1},
      seq::AlternatingAffine{ExactBase::ten_power(1, 2), 0, 2, 1, 3},
      seq::Factorial{},
      fibonacci(),
  };
  for (const auto& s : specs) {
    const auto c = classify(s);
    const double d = disc(s, 100000);
    INFO(to_string(s) << " D*=" << d);
    if (c.verdict == Verdict::Benford) CHECK(d < 0.01);
    if (c.verdict == Verdict::NotBenford) CHECK(d > 0.2);
  }
}

TEST_CASE("verdicts and discrepancies ignore the scale of the start") {
  const auto with_start = [](const SequenceSpec& s, const Rational& c) -> SequenceSpec {
    if (auto* a = std::get_if<seq::AffineIterate>(&s)) {
      auto b = *a;
      b.x0 = Rational(b.x0.num() * c.num(), b.x0.den() * c.den());
      return b;
    }
    auto b = std::get<seq::AlternatingAffine>(s);
    b.x0 = Rational(b.x0.num() * c.num(), b.x0.den() * c.den());
    return b;
  };
  const std::vector<SequenceSpec> specs = {seq::AffineIterate{2, 1, 1}, seq::AffineIterate{ExactBase::ten_power(1, 2), 1, 2},
                                           seq::AlternatingAffine{2, 0, 3, 0, 1}, seq::AlternatingAffine{2, 1, 5, 0, 1}};
  for (const auto& s : specs) {
    const double base = disc(s, 100000);
    for (const Rational& c : {Rational(3), Rational(1, 7)}) {
      const auto t = with_start(s, c);
      INFO(to_string(t));
      CHECK(classify(t).verdict == classify(s).verdict);
      // a non-Benford limit cycle moves with the start, so only Benford
      // discrepancies are expected to agree
      if (classify(s).verdict == Verdict::Benford) CHECK_THAT(disc(t, 100000), WithinAbs(base, 0.01));
    }
  }
}

TEST_CASE("reciprocals and powers of a Benford base") {
  const ExactBase two(2);
  CHECK(disc(seq::Power{two.reciprocal()}, 100000) < 0.01);
  CHECK(disc(seq::Power{two.pow(2)}, 100000) < 0.01);
  CHECK(two.pow(-3) == ExactBase(1, 8));
  CHECK(ExactBase::ten_power(1, 2).pow(4) == ExactBase::ten_power(2, 1));
}

TEST_CASE("factorial and Fibonacci: log-domain path matches exact integers") {
  GenerateOptions float_only;
  float_only.exact_limit = 0;
  for (const SequenceSpec& s : {SequenceSpec{seq::Factorial{}}, SequenceSpec{fibonacci()}}) {
    const auto exact = generate(s, 3000);
    const auto approx = generate(s, 3000, float_only);
    double worst = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      double d = std::fabs(exact[i] - approx[i]);
      worst = std::max(worst, std::min(d, 1.0 - d));
    }
    CHECK(worst < 1e-9);
  }

  // independent check against decimal strings of the integers themselves
  const auto terms = generate_terms(seq::Factorial{}, 3000);
  const auto fib = generate_terms(fibonacci(), 3000);
  mpz_class f = 1, a = 1, b = 1;
  for (unsigned long n = 1; n <= 3000; ++n) {
    f *= n;
    if (n > 2) {
      mpz_class c = a + b;
      a = b;
      b = c;
    }
    if (n % 37 == 0 || n < 30) {
      REQUIRE_THAT(term_significand(terms[n - 1]), WithinAbs(leading_significand(f), 1e-13));
      REQUIRE_THAT(term_significand(fib[n - 1]), WithinAbs(leading_significand(b), 1e-13));
    }
  }
}

TEST_CASE("polynomial iterates: first 20 steps against exact rationals") {
  struct Case {
    std::vector<Rational> f;
    Rational x0;
    int steps;
  };
  const std::vector<Case> cases = {
      {{1, 0, 1}, 1, 20},
      {{0, -2, 0, 1}, 3, 12},
      {{0, -2, 0, 1}, -3, 12},
      {{0, -5, 1}, 7, 18},
      {{Rational(1, 2), 0, Rational(1, 3)}, Rational(7, 2), 14},
      {{0, 0, 1}, Rational(1, 3), 18},  // shrinks toward 0
  };
  for (const auto& c : cases) {
    const auto got = generate_terms(seq::PolynomialIterate{c.f, c.x0}, c.steps);
    mpq_class x = detail::to_mpq(c.x0);
    for (int i = 0; i < c.steps; ++i) {
      mpq_class y = 0;
      for (int j = static_cast<int>(c.f.size()) - 1; j >= 0; --j) y = y * x + detail::to_mpq(c.f[static_cast<std::size_t>(j)]);
      y.canonicalize();
      x = y;
      INFO(to_string(SequenceSpec{seq::PolynomialIterate{c.f, c.x0}}) << " step " << i + 1);
      const double want = exact_log_frac(x);
      const double have = term_fraction(got[static_cast<std::size_t>(i)]);
      const double d = std::fabs(want - have);
      REQUIRE(std::min(d, 1.0 - d) < 1e-12);
    }
  }
}

TEST_CASE("polynomial iterates: powers of ten under squaring") {
  const auto s = generate(seq::PolynomialIterate{{0, 0, 1}, 10}, 40);
  for (double v : s) CHECK(v == 0.0);
  CHECK(star_discrepancy(s).star_discrepancy == 1.0);
}

TEST_CASE("the integers: first digit 1 dominates at 2·10^m − 1") {
  const auto terms = generate_terms(seq::PolynomialTerm{1, 1}, 199999);
  std::int64_t ones = 0;
  std::size_t next = 0;
  const std::int64_t marks[3] = {1999, 19999, 199999};
  for (std::int64_t i = 1; i <= 199999; ++i) {
    ones += term_first_digit(terms[static_cast<std::size_t>(i - 1)]) == 1;
    if (next < 3 && i == marks[next]) {
      CHECK(static_cast<double>(ones) / static_cast<double>(i) > 0.5);
      ++next;
    }
  }
  CHECK(ones == 111111);
}

TEST_CASE("spec text round trip") {
  const std::vector<std::string> texts = {"power:2",
                                          "power:10^(1/2)",
                                          "power:3/7",
                                          "affine:a=2,b=1,x0=1",
                                          "poly-term:a=1,b=2",
                                          "factorial",
                                          "recurrence:c=[1,1],init=[1,1]",
                                          "poly-iter:f=[1,0,1],x0=1",
                                          "alt-affine:a1=2,b1=0,a2=3,b2=0,x0=1"};
  for (const auto& t : texts) CHECK(to_string(parse_sequence_spec(t)) == t);
  CHECK(to_string(parse_sequence_spec("fib")) == "recurrence:c=[1,1],init=[1,1]");
  CHECK(to_string(parse_sequence_spec("power:0.5")) == "power:1/2");
  CHECK(to_string(parse_sequence_spec("power:10^3")) == "power:10^3");
  CHECK(to_string(parse_sequence_spec(" affine: a=10^(1/2), b=0, x0=1 ")) == "affine:a=10^(1/2),b=0,x0=1");
  CHECK_THROWS_AS(parse_sequence_spec("power"), DomainError);
  CHECK_THROWS_AS(parse_sequence_spec("squares:2"), DomainError);
  CHECK_THROWS_AS(parse_sequence_spec("affine:a=2,zz=1"), DomainError);
  CHECK_THROWS_AS(parse_sequence_spec("affine:a=1/2"), DomainError);
  CHECK_THROWS_AS(parse_sequence_spec("poly-iter:f=1,0,1,x0=1"), DomainError);
}

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "benford/stochastic.hpp"

using namespace benford;
using Catch::Matchers::WithinAbs;
using RV = RandomVariableSpec;

namespace {

const double kLog2 = std::log10(2.0);

double ks_of_values(const std::vector<double>& v) {
  std::vector<double> logs;
  for (double x : v) {
    if (x != 0.0) logs.push_back(log_significand(x));
  }
  return ks_log_significands(logs);
}

// sup_s |P(⟨log10 U^n⟩ ≤ s) − s| from the decade sum Σ_j (10^{(s−j)/n} − 10^{−j/n}).
double power_oracle_grid(int n) {
  double best = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double s = i / 20000.0;
    double p = 0.0;
    for (int j = 1; j < 4000 * n; ++j) {
      const double hi = std::pow(10.0, (s - j) / n);
      p += hi - std::pow(10.0, -static_cast<double>(j) / n);
      if (hi < 1e-18) break;
    }
    best = std::max(best, std::fabs(p - s));
  }
  return best;
}

// −ln(U1 U2) is Gamma(2, 1): P(G ≤ x) = 1 − e^{−x}(1 + x).
double product2_oracle_grid() {
  const auto g = [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x) * (1.0 + x); };
  double best = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double s = i / 20000.0;
    // ⟨log10 U1U2⟩ ≤ s  ⇔  G/ln10 ∈ [j − s, j) for some j ≥ 1
    double p = 0.0;
    for (int j = 1; j < 200; ++j) p += g(j * std::numbers::ln10) - g((j - s) * std::numbers::ln10);
    best = std::max(best, std::fabs(p - s));
  }
  return best;
}

}  // namespace

TEST_CASE("law specs validate, describe and parse") {
  CHECK_THROWS_AS(RV::uniform(1, 1), DomainError);
  CHECK_THROWS_AS(RV::exponential(0), DomainError);
  CHECK_THROWS_AS(RV::normal(0, -1), DomainError);
  CHECK_THROWS_AS(RV::scaled(RV::benford(), 0), DomainError);
  CHECK_THROWS_AS(RV::power(RV::benford(), 0), DomainError);
  CHECK_THROWS_AS(RV::atoms({{2, 0.5}, {3, 0.4}}), DomainError);
  CHECK_THROWS_AS(RV::power(RV::atoms({{0, 0.5}, {3, 0.5}}), -1), DomainError);
  CHECK_NOTHROW(RV::atoms({{2, 0.5}, {3, 0.5 + 1e-13}}));

  for (const char* text : {"uniform(0,1)", "exponential(1)", "normal(7,1)", "benford", "scaled(benford,3.5)",
                           "power(uniform(0,1),-2)", "atoms(2:0.5,3:0.5)", "scaled(power(normal(0,2),3),0.1)"}) {
    CHECK(describe(parse_random_variable(text)) == text);
  }
  CHECK(describe(parse_random_variable("atoms(2:1/2, 3:1/2)")) == "atoms(2:0.5,3:0.5)");
  CHECK(describe(parse_random_variable("const(4)")) == "atoms(4:1)");
  CHECK(describe(parse_random_variable("exp(2)")) == "exponential(2)");
  CHECK_THROWS_AS(parse_random_variable("uniform(0)"), DomainError);
  CHECK_THROWS_AS(parse_random_variable("cauchy(0,1)"), DomainError);
  CHECK_THROWS_AS(parse_random_variable("uniform(0,1"), DomainError);
  CHECK_THROWS_AS(parse_random_variable("uniform(0,1,5)"), DomainError);
  CHECK_THROWS_AS(parse_random_variable("normal(0,1e400)"), DomainError);

  CHECK(spec_digest(RV::uniform(0, 1)) == spec_digest(parse_random_variable("uniform(0, 1)")));
  CHECK(spec_digest(RV::uniform(0, 1)) != spec_digest(RV::uniform(0, 2)));
}

TEST_CASE("law traits") {
  CHECK(traits(RV::benford()).continuous);
  CHECK_FALSE(traits(RV::atoms({{2, 1}})).continuous);
  CHECK(traits(RV::atoms({{0, 0.5}, {1, 0.5}})).atom_at_zero);
  CHECK(traits(RV::uniform(0, 1)).all_moments);
  CHECK_FALSE(traits(RV::power(RV::uniform(0, 1), -1)).all_moments);
  CHECK(traits(RV::power(RV::uniform(1, 2), -3)).all_moments);
  CHECK_FALSE(traits(RV::power(RV::exponential(1), -1)).all_moments);
  CHECK(traits(RV::power(RV::normal(0, 1), 2)).positive);
  CHECK_FALSE(traits(RV::power(RV::normal(0, 1), 3)).positive);
}

TEST_CASE("cdf and density") {
  CHECK(cdf(RV::benford(), 2.0) == std::log10(2.0));
  CHECK(cdf(RV::benford(), 0.5) == 0.0);
  CHECK(cdf(RV::benford(), 10.0) == 1.0);
  CHECK_THAT(cdf(RV::normal(7, 1), 7), WithinAbs(0.5, 1e-15));
  CHECK_THAT(cdf(RV::power(RV::uniform(0, 1), 2), 0.25), WithinAbs(0.5, 1e-15));
  CHECK_THAT(cdf(RV::power(RV::uniform(0, 1), -1), 4.0), WithinAbs(0.75, 1e-15));
  CHECK_THAT(cdf(RV::scaled(RV::exponential(1), 2), 2.0), WithinAbs(1 - std::exp(-1.0), 1e-15));
  const auto atoms = RV::atoms({{2, 0.25}, {3, 0.75}});
  CHECK(cdf(atoms, 2.0) == 0.25);
  CHECK(cdf(atoms, 1.99) == 0.0);
  CHECK(cdf(RV::power(atoms, -1), 0.5) == 1.0);  // 1/X ≤ 1/2 ⇔ X ≥ 2
  CHECK(cdf(RV::power(atoms, -1), 0.4) == 0.75);
  CHECK_THROWS_AS(density(atoms, 2.0), DomainError);
  CHECK_THROWS_AS(cdf(RV::power(RV::normal(0, 1), 2), 1.0), DomainError);

  // densities agree with central differences of the CDF
  for (const auto& spec : {RV::uniform(-1, 3), RV::exponential(0.7), RV::normal(2, 3), RV::benford(),
                           RV::scaled(RV::benford(), 7), RV::power(RV::uniform(0, 1), 3),
                           RV::power(RV::exponential(1), -2)}) {
    for (double x : {0.3, 1.7, 2.5, 6.0}) {
      const double h = 1e-6;
      const double numeric = (cdf(spec, x + h) - cdf(spec, x - h)) / (2 * h);
      INFO(describe(spec) << " at " << x);
      REQUIRE_THAT(density(spec, x), WithinAbs(numeric, 1e-6));
    }
  }
}

TEST_CASE("rng streams") {
  Stream a(1), b(1), c(2);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  Stream s(42);
  double lo = 1, hi = 0, mean = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = s.next_uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    mean += u / 100000;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK_THAT(mean, WithinAbs(0.5, 0.005));
  CHECK(Stream(7).child(3).next_u64() == Stream(7).child(3).next_u64());
  CHECK(Stream(7).child(3).next_u64() != Stream(7).child(4).next_u64());
  CHECK(Stream(7).child(0).next_u64() != Stream(7).next_u64());
}

TEST_CASE("sample: worked examples") {
  const auto b = sample(RV::benford(), 1000000, 42);
  for (double v : b.values) REQUIRE((v >= 1.0 && v < 10.0));
  CHECK(ks_of_values(b.values) < 0.0025);
  CHECK(b.generator == "splitmix64-stream/v1");
  CHECK(b.spec == "benford");
  CHECK(b.seed == 42);

  const auto u = sample(RV::uniform(0, 1), 1000000, 42);
  const double p2 = static_cast<double>(std::count_if(u.values.begin(), u.values.end(),
                                                      [](double v) { return benford::significand(v).significand <= 2.0; })) /
                    1e6;
  CHECK_THAT(p2, WithinAbs(1.0 / 9.0, 0.002));

  const auto d = sample(RV::atoms({{2, 0.5}, {3, 0.5}}), 10000, 42);
  const auto twos = std::count(d.values.begin(), d.values.end(), 2.0);
  CHECK(twos + std::count(d.values.begin(), d.values.end(), 3.0) == 10000);
  CHECK_THAT(twos / 1e4, WithinAbs(0.5, 0.02));

  CHECK_THROWS_AS(sample(RV::benford(), 0, 1), DomainError);
  CHECK_THROWS_AS(sample(RV::benford(), kMaxSamples + 1, 1), ResourceError);
}

TEST_CASE("sample: moments of the basic laws") {
  const auto mean_var = [](const std::vector<double>& v) {
    double m = 0, q = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double x : v) q += (x - m) * (x - m);
    return std::pair{m, q / static_cast<double>(v.size())};
  };
  auto [m1, v1] = mean_var(sample(RV::exponential(2), 200000, 5).values);
  CHECK_THAT(m1, WithinAbs(0.5, 0.005));
  CHECK_THAT(v1, WithinAbs(0.25, 0.005));
  auto [m2, v2] = mean_var(sample(RV::normal(7, 3), 200000, 5).values);
  CHECK_THAT(m2, WithinAbs(7, 0.03));
  CHECK_THAT(v2, WithinAbs(9, 0.1));
  auto [m3, v3] = mean_var(sample(RV::power(RV::uniform(0, 1), 2), 200000, 5).values);
  CHECK_THAT(m3, WithinAbs(1.0 / 3, 0.003));
  CHECK_THAT(v3, WithinAbs(4.0 / 45, 0.002));
}

TEST_CASE("reproducibility and worker independence") {
  const auto spec = RV::scaled(RV::normal(1, 2), 3);
  const auto a = sample(spec, 50000, 9);
  CHECK(a.values == sample(spec, 50000, 9).values);
  CHECK(a.spec_digest == sample(spec, 50000, 10).spec_digest);
  const auto c = sample(spec, 50000, 10);
  CHECK(a.values != c.values);
  // two-sample KS at the 99.9% level: 1.95 · sqrt(2/n)
  CHECK(two_sample_ks(a.values, c.values) < 1.95 * std::sqrt(2.0 / 50000));

  ::setenv("BENFORD_THREADS", "1", 1);
  const auto one = sample(spec, 50000, 9).values;
  const auto p1 = product_sequence(RV::uniform(0, 1), 3, 20000, 4);
  ::setenv("BENFORD_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  CHECK(sample(spec, 50000, 9).values == one);
  CHECK(product_sequence(RV::uniform(0, 1), 3, 20000, 4) == p1);
  ::unsetenv("BENFORD_THREADS");
  // a sample is a prefix of any longer sample with the same seed
  const auto longer = sample(spec, 60000, 9).values;
  CHECK(std::equal(a.values.begin(), a.values.end(), longer.begin()));
}

TEST_CASE("two-sample KS") {
  CHECK(two_sample_ks({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(two_sample_ks({1, 2}, {3, 4}) == 1.0);
  CHECK_THAT(two_sample_ks({1, 2, 3, 4}, {3, 4, 5, 6}), WithinAbs(0.5, 1e-15));
  CHECK_THROWS_AS(two_sample_ks({}, {1}), DomainError);
}

TEST_CASE("power_sequence: closed form for uniform powers") {
  CHECK_THAT(uniform_power_distance(1), WithinAbs(uniform_benford_distance({0.0, 1.0}), 1e-12));
  for (int n : {1, 2, 5, 10, 20}) {
    INFO("n = " << n);
    CHECK_THAT(uniform_power_distance(n), WithinAbs(power_oracle_grid(n), 1e-7));
  }
}

TEST_CASE("power_sequence: worked examples") {
  const auto d = power_sequence(RV::uniform(0, 1), 20, 1000000, 42);
  REQUIRE(d.size() == 20);
  CHECK(d[0] > d[1]);
  CHECK(d[1] > d[4]);
  CHECK(d[4] > d[9]);
  CHECK_THAT(d[0], WithinAbs(0.2689, 0.003));
  for (int n : {2, 5, 10, 20}) CHECK_THAT(d[n - 1], WithinAbs(uniform_power_distance(n), 0.003));
  for (double x : power_sequence(RV::benford(), 10, 1000000, 42)) CHECK(x < 0.0025);
  CHECK_THROWS_AS(power_sequence(RV::atoms({{2, 1}}), 3, 10, 1), DomainError);
  CHECK_THROWS_AS(power_sequence(RV::uniform(0, 1), 101, 10, 1), DomainError);
}

TEST_CASE("product_sequence: worked examples") {
  const auto d = product_sequence(RV::uniform(0, 1), 5, 1000000, 42);
  REQUIRE(d.size() == 5);
  for (std::size_t k = 1; k < d.size(); ++k) CHECK(d[k] <= d[k - 1] + 0.003);
  CHECK(d[4] < 0.01);
  CHECK_THAT(d[0], WithinAbs(0.2689, 0.003));
  CHECK_THAT(d[1], WithinAbs(product2_oracle_grid(), 0.003));
  for (double x : product_sequence(RV::benford(), 4, 1000000, 7)) CHECK(x < 0.0025);
  CHECK_THROWS_AS(product_sequence(RV::atoms({{2, 1}}), 3, 10, 1), DomainError);
}

TEST_CASE("product_with_benford: worked examples") {
  CHECK(product_with_benford(RV::uniform(3, 4), 1000000, 42) < 0.0025);
  CHECK(product_with_benford(RV::constant(2.5), 1000000, 42) < 0.0025);
  CHECK(product_with_benford(RV::atoms({{2, 0.5}, {3, 0.5}}), 1000000, 42) < 0.0025);
  CHECK_THROWS_AS(product_with_benford(RV::atoms({{0, 0.5}, {3, 0.5}}), 10, 1), DomainError);
}

TEST_CASE("scale invariance") {
  CHECK(scale_invariance_check(RV::benford(), std::numbers::pi, 1000000, 42).distance < 0.004);
  const auto u2 = scale_invariance_check(RV::uniform(0, 1), 2.0, 1000000, 42);
  CHECK_THAT(empirical_significand_cdf(u2.right, 2.0), WithinAbs(5.0 / 9.0, 0.002));
  CHECK_THAT(empirical_significand_cdf(u2.left, 2.0), WithinAbs(1.0 / 9.0, 0.002));
  for (const auto& spec : {RV::uniform(0, 1), RV::exponential(1), RV::normal(7, 1)}) {
    CHECK(scale_invariance_check(spec, 10.0, 1000000, 42).distance < 0.004);
  }
  double worst = 0.0;
  for (double a : {2.0, 3.0, 7.0}) worst = std::max(worst, scale_invariance_check(RV::uniform(0, 1), a, 200000, 3).distance);
  CHECK(worst > 0.1);
  CHECK_THROWS_AS(scale_invariance_check(RV::benford(), -1.0, 10, 1), DomainError);
}

TEST_CASE("base invariance and mixtures") {
  CHECK(base_invariance_check(MixtureLaw(0.3), 2, 1000000, 42).distance < 0.004);
  CHECK(base_invariance_check(RV::uniform(0, 1), 2, 1000000, 42).distance > 0.05);
  CHECK(base_invariance_check(MixtureLaw(0.0), 3, 1000000, 42).distance < 0.004);
  CHECK(base_invariance_check(MixtureLaw(0.5, 3), 5, 200000, 1).distance < 0.01);
  CHECK_THROWS_AS(base_invariance_check(MixtureLaw(0.3), 1, 10, 1), DomainError);

  CHECK(mixture_distance_to_benford(0.0) == 0.0);
  CHECK(mixture_distance_to_benford(1.0) == 1.0);
  CHECK(mixture_distance_to_benford(0.3) == 0.3);
  CHECK_THROWS_AS(mixture_distance_to_benford(1.5), DomainError);
  CHECK_THAT(sampled_distance_to_benford(MixtureLaw(0.3), 1000000, 42), WithinAbs(0.3, 0.01));
}

TEST_CASE("Benford closure suite") {
  const auto x = RV::benford();
  CHECK(sampled_distance_to_benford(RV::scaled(x, 7.3), 1000000, 1) < 0.004);
  for (int k : {-1, 2, 3}) CHECK(sampled_distance_to_benford(RV::power(x, k), 1000000, 2) < 0.004);
  CHECK(sampled_distance_to_benford(RV::scaled(RV::power(x, -1), 0.02), 1000000, 3) < 0.004);
  CHECK(product_with_benford(RV::exponential(1), 1000000, 4) < 0.004);
  // the i.i.d. stream itself
  CHECK(sampled_distance_to_benford(x, 1000000, 5) < 0.0025);
}

TEST_CASE("randomized iteration: worked examples") {
  const FunctionSpec x2 = MultiplyBy{2}, x3 = MultiplyBy{3};
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    CHECK(star_discrepancy(randomized_iteration(x2, x3, 0.5, 1.0, 100000, seed)).star_discrepancy < 0.02);
  }
  const auto tens = randomized_iteration(MultiplyBy{10}, MultiplyBy{10}, 0.3, 2.5, 1000, 9);
  for (double v : tens) REQUIRE(v == tens[0]);
  CHECK_THAT(tens[0], WithinAbs(std::log10(2.5), 1e-15));

  CHECK_THROWS_AS(randomized_iteration(x2, x3, 1.5, 1.0, 10, 1), DomainError);
  CHECK_THROWS_AS(randomized_iteration(x2, x3, 0.5, -1.0, 10, 1), DomainError);
  CHECK_THROWS_AS(randomized_iteration(MultiplyBy{-2}, x3, 0.5, 1.0, 10, 1), DomainError);
  CHECK_THROWS_AS(randomized_iteration(x2, AffineMap{1, -5}, 0.0, 1.0, 10, 1), DomainError);
}

TEST_CASE("randomized iteration: deterministic paths against exact arithmetic") {
  // x ↦ 2x + 1 from 1 gives 2^{n+1} − 1
  const auto aff = randomized_iteration(AffineMap{2, 1}, AffineMap{2, 1}, 0.5, 1.0, 400, 1);
  for (int n : {1, 2, 10, 60, 61, 200, 400}) {
    const mpz_class v = (mpz_class(1) << (n + 1)) - 1;
    INFO("n = " << n);
    REQUIRE_THAT(aff[static_cast<std::size_t>(n - 1)],
                 WithinAbs(benford::detail::fractional_part(benford::detail::log10_abs(v, 256)), 1e-14));
  }
  // x ↦ x^3 from 2 gives 2^{3^n}
  const auto cubes = randomized_iteration(PowerMap{Rational(3)}, PowerMap{Rational(3)}, 0.5, 2.0, 500, 1);
  benford::detail::BigFloat l(1200);
  for (int n : {1, 5, 100, 500}) {
    mpz_class e;
    mpz_ui_pow_ui(e.get_mpz_t(), 3, static_cast<unsigned long>(n));
    benford::detail::BigFloat exact = benford::detail::log10_abs(mpz_class(2), 1200);
    mpfr_mul_z(exact.get(), exact.get(), e.get_mpz_t(), MPFR_RNDN);
    INFO("n = " << n);
    REQUIRE_THAT(cubes[static_cast<std::size_t>(n - 1)], WithinAbs(benford::detail::fractional_part(exact), 1e-14));
  }
  // a ×2 / ×3 path equals ⟨a·log 2 + b·log 3⟩ for its own counts
  const auto path = randomized_iteration(MultiplyBy{2}, MultiplyBy{3}, 0.5, 1.0, 5000, 11);
  const FixedLog l2 = FixedLog::log10_of(Rational(2)), l3 = FixedLog::log10_of(Rational(3));
  FixedLog acc;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const FixedLog a = acc + l2, b = acc + l3;
    const bool took2 = std::fabs(a.fraction() - path[i]) < 1e-12;
    REQUIRE((took2 || std::fabs(b.fraction() - path[i]) < 1e-12));
    acc = took2 ? a : b;
  }
}

TEST_CASE("randomized iteration: square root or cube from random starts") {
  // at n = 10^5 about 98% of paths pass; see the README for the shorter horizon
  int pass = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto m = randomized_iteration(PowerMap{Rational(1, 2)}, PowerMap{Rational(3)}, 0.6, RV::uniform(1, 10),
                                        100000, 1000 + seed);
    pass += star_discrepancy(m).star_discrepancy < 0.05;
  }
  CHECK(pass >= 90);
}

TEST_CASE("product paths of random 2s and 3s") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(star_discrepancy(product_path(RV::atoms({{2, 0.5}, {3, 0.5}}), 100000, seed)).star_discrepancy < 0.02);
  }
  CHECK_THROWS_AS(product_path(RV::atoms({{0, 0.5}, {3, 0.5}}), 10, 1), DomainError);
}

TEST_CASE("polynomial iterates from random starts") {
  const std::vector<Rational> sq1 = {Rational(1), Rational(0), Rational(1)};
  const std::vector<Rational> sq = {Rational(0), Rational(0), Rational(1)};
  const auto a = polynomial_iterate_random_start(sq1, RV::uniform(0, 1), 10000, 50, 42);
  CHECK(a.fraction_below >= 0.95);
  CHECK(a.discrepancies.size() == 50);
  CHECK(a.threshold == 0.05);
  CHECK(polynomial_iterate_random_start(sq, RV::uniform(2, 3), 10000, 50, 42).fraction_below >= 0.95);
  CHECK_THROWS_AS(polynomial_iterate_random_start(sq, RV::constant(10), 100, 5, 1), DomainError);
  CHECK(polynomial_orbit_discrepancy(sq, benford::detail::BigFloat(64, 10.0), 10000) == 1.0);
  CHECK_THROWS_AS(polynomial_iterate_random_start(std::vector<Rational>{Rational(1), Rational(2)}, RV::uniform(2, 3),
                                                  100, 5, 1),
                  DomainError);
  const std::vector<Rational> quarter = {Rational(0), Rational(0), Rational(1, 4)};
  CHECK_THROWS_AS(polynomial_iterate_random_start(quarter, RV::uniform(0, 1), 100, 5, 1), DomainError);
  CHECK_THROWS_AS(polynomial_iterate_random_start(sq, RV::uniform(2, 3), 100, 5, 1, 0.05, 2.5), DomainError);
  CHECK(polynomial_iterate_random_start(sq, RV::uniform(2, 3), 100, 5, 1, 0.05, 1.5).discrepancies.size() == 5);

  // random starts carry random bits below the double they extend, and the orbit depends on them
  Stream s1 = Stream(1).child(0), s2 = Stream(1).child(0);
  const auto x1 = benford::detail::random_real(RV::uniform(0, 1), s1, 2000);
  const double head = draw_value(RV::uniform(0, 1), s2);
  CHECK(mpfr_cmp_d(x1.get(), head) > 0);
  CHECK(mpfr_cmp_d(x1.get(), std::nextafter(head, 2.0)) < 0);
  const auto with_tail = polynomial_orbit_terms(sq1, x1, 80, 2000);
  const auto without = polynomial_orbit_terms(sq1, benford::detail::BigFloat(2000, head), 80, 2000);
  CHECK(term_fraction(with_tail[9]) == Catch::Approx(term_fraction(without[9])).epsilon(1e-9));
  CHECK(std::fabs(term_fraction(with_tail[79]) - term_fraction(without[79])) > 1e-6);
}

TEST_CASE("average measure") {
  const RandomMeasureSpec die({{1.0 / 3, RV::uniform(0, 1)}, {2.0 / 3, RV::exponential(1)}});
  CHECK_THAT(average_measure_density(die, 0.5), WithinAbs(1.0 / 3 + 2.0 / 3 * std::exp(-0.5), 1e-15));
  CHECK_THAT(average_measure_density(die, 2.0), WithinAbs(2.0 / 3 * std::exp(-2.0), 1e-15));
  CHECK_THAT(average_measure_cdf(die, 0.5), WithinAbs(0.5 / 3 + 2.0 / 3 * (1 - std::exp(-0.5)), 1e-15));
  CHECK(average_measure_cdf(die, -1.0) == 0.0);
  CHECK_THAT(average_measure_cdf(die, 50.0), WithinAbs(1.0, 1e-15));
  const RandomMeasureSpec one({{1.0, RV::normal(7, 1)}});
  for (double t : {5.0, 7.0, 8.5}) CHECK(average_measure_cdf(one, t) == cdf(RV::normal(7, 1), t));
  CHECK_THROWS_AS(RandomMeasureSpec({}), DomainError);
  CHECK_THROWS_AS(RandomMeasureSpec({{0.5, RV::benford()}}), DomainError);
}

TEST_CASE("combined samples") {
  std::vector<RandomMeasureSpec::Component> comps;
  const double scales[] = {1.0, 2.0, 3.7, 50.0, 0.013};
  const double weights[] = {0.1, 0.2, 0.3, 0.25, 0.15};
  for (int i = 0; i < 5; ++i) comps.push_back({weights[i], RV::scaled(RV::benford(), scales[i])});
  const RandomMeasureSpec unbiased(comps);
  const auto c = combined_sample(unbiased, 10, 10000, 42);
  CHECK(c.values.size() == 100000);
  CHECK(ks_of_values(c.values) < 0.005);

  const RandomMeasureSpec biased({{0.5, RV::uniform(2, 3)}, {0.5, RV::uniform(4, 5)}});
  const auto b = combined_sample(biased, 10, 10000, 42);
  CHECK(std::none_of(b.values.begin(), b.values.end(), [](double v) { return first_digit(v) == 1; }));

  const auto single = combined_sample(biased, 1000, 1, 7);
  const bool low = single.values[0] < 3.0;
  for (double v : single.values) REQUIRE((low ? (v >= 2 && v <= 3) : (v >= 4 && v <= 5)));
  CHECK(single.values == combined_sample(biased, 1000, 1, 7).values);

  CHECK_THROWS_AS(combined_sample(RandomMeasureSpec({{1.0, RV::atoms({{2, 1}})}}), 1, 1, 1), DomainError);
}

TEST_CASE("random walks") {
  const auto t = random_walk_paths(RV::uniform(0, 1), 1000, 100000, 42);
  CHECK(t.total == 100000);
  CHECK(std::fabs(t.frequency(1) - kLog2) > 0.25);
  CHECK(t.frequency(4) + t.frequency(5) > 0.99);

  const auto one = random_walk_paths(RV::normal(0, 1), 1, 20000, 3);
  const auto s = sample(RV::normal(0, 1), 20000, 3);
  std::array<std::int64_t, 10> direct{};
  for (double v : s.values) ++direct[static_cast<std::size_t>(first_digit(v))];
  CHECK(one.counts == direct);

  const auto det = random_walk_paths(RV::constant(1), 37, 100, 1);
  CHECK(det.counts[3] == 100);
  CHECK_THROWS_AS(random_walk_paths(RV::power(RV::uniform(0, 1), -1), 10, 10, 1), DomainError);
}

TEST_CASE("function specs parse") {
  CHECK(describe(parse_function("mul:2")) == "mul:2");
  CHECK(describe(parse_function("pow:1/2")) == "pow:1/2");
  CHECK(describe(parse_function("affine:2,1")) == "affine:2,1");
  CHECK_THROWS_AS(parse_function("pow:0"), DomainError);
  CHECK_THROWS_AS(parse_function("mul:-1"), DomainError);
  CHECK_THROWS_AS(parse_function("sin:1"), DomainError);
}

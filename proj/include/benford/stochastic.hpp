#pragma once

// Seeded Monte Carlo experiments on significands: exact Benford sampling,
// powers and products, scale and base invariance, mixtures, random measures,
// random function systems and random walks.
//
// Every experiment item (sample i, path i, trial i) draws from its own child
// stream of the seed, so results do not depend on the worker count.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "benford/detail/mp.hpp"
#include "benford/errors.hpp"
#include "benford/law.hpp"
#include "benford/mod1.hpp"
#include "benford/rational.hpp"
#include "benford/rng.hpp"
#include "benford/sequences.hpp"
#include "benford/significand.hpp"

namespace benford {

/// Upper bound on samples, paths or trials × per-item draws for one experiment.
inline constexpr std::int64_t kMaxSamples = 10000000;

class RandomVariableSpec {
 public:
  struct Uniform {
    double a, b;
  };
  struct Exponential {
    double rate;
  };
  struct Normal {
    double mean, sd;
  };
  /// 10^U with U uniform on (0, 1).
  struct BenfordExact {};
  struct Scaled {
    std::shared_ptr<const RandomVariableSpec> inner;
    double factor;
  };
  struct PowerOf {
    std::shared_ptr<const RandomVariableSpec> inner;
    std::int64_t k;
  };
  struct DiscreteAtoms {
    std::vector<std::pair<double, double>> atoms;  // (value, probability)
  };
  using Kind = std::variant<Uniform, Exponential, Normal, BenfordExact, Scaled, PowerOf, DiscreteAtoms>;

  static RandomVariableSpec uniform(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) throw DomainError("uniform law needs finite a < b");
    return RandomVariableSpec(Uniform{a, b});
  }
  static RandomVariableSpec exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("exponential rate must be positive");
    return RandomVariableSpec(Exponential{rate});
  }
  static RandomVariableSpec normal(double mean, double sd) {
    if (!std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd)) throw DomainError("normal law needs sd > 0");
    return RandomVariableSpec(Normal{mean, sd});
  }
  static RandomVariableSpec benford() { return RandomVariableSpec(BenfordExact{}); }
  static RandomVariableSpec scaled(const RandomVariableSpec& inner, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw DomainError("scale factor must be positive");
    return RandomVariableSpec(Scaled{std::make_shared<const RandomVariableSpec>(inner), factor});
  }
  static RandomVariableSpec power(const RandomVariableSpec& inner, std::int64_t k);
  static RandomVariableSpec atoms(std::vector<std::pair<double, double>> atoms);
  static RandomVariableSpec constant(double c) { return atoms({{c, 1.0}}); }

  [[nodiscard]] const Kind& kind() const { return kind_; }

 private:
  explicit RandomVariableSpec(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

struct LawTraits {
  bool continuous = true;
  bool atom_at_zero = false;
  bool positive = true;  // support inside (0, ∞)
  bool bounded = true;
  bool away_from_zero = true;  // support avoids a neighbourhood of 0
  bool all_moments = true;
};

inline LawTraits traits(const RandomVariableSpec& spec) {
  using S = RandomVariableSpec;
  return std::visit(
      [](const auto& k) -> LawTraits {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, S::Uniform>) {
          return {true, false, k.a >= 0.0, true, k.a > 0.0 || k.b < 0.0, true};
        } else if constexpr (std::is_same_v<T, S::Exponential>) {
          return {true, false, true, false, false, true};
        } else if constexpr (std::is_same_v<T, S::Normal>) {
          return {true, false, false, false, false, true};
        } else if constexpr (std::is_same_v<T, S::BenfordExact>) {
          return {};
        } else if constexpr (std::is_same_v<T, S::Scaled>) {
          return traits(*k.inner);
        } else if constexpr (std::is_same_v<T, S::PowerOf>) {
          const LawTraits in = traits(*k.inner);
          LawTraits t = in;
          t.positive = in.positive || k.k % 2 == 0;
          if (k.k < 0) {
            t.bounded = in.away_from_zero;
            t.away_from_zero = in.bounded;
            t.all_moments = in.away_from_zero && in.all_moments;
          }
          return t;
        } else {
          LawTraits t{false, false, true, true, true, true};
          for (auto [v, p] : k.atoms) {
            t.atom_at_zero = t.atom_at_zero || v == 0.0;
            t.positive = t.positive && v > 0.0;
          }
          t.away_from_zero = !t.atom_at_zero;
          return t;
        }
      },
      spec.kind());
}

inline RandomVariableSpec RandomVariableSpec::power(const RandomVariableSpec& inner, std::int64_t k) {
  if (k == 0) throw DomainError("power exponent must be nonzero");
  if (k < 0 && traits(inner).atom_at_zero) throw DomainError("negative power of a law with an atom at 0");
  return RandomVariableSpec(PowerOf{std::make_shared<const RandomVariableSpec>(inner), k});
}

inline RandomVariableSpec RandomVariableSpec::atoms(std::vector<std::pair<double, double>> atoms) {
  if (atoms.empty()) throw DomainError("discrete law needs at least one atom");
  double total = 0.0;
  for (auto [v, p] : atoms) {
    if (!std::isfinite(v) || !(p >= 0.0) || p > 1.0) throw DomainError("atoms need finite values and probabilities");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw DomainError("atom probabilities must sum to 1");
  return RandomVariableSpec(DiscreteAtoms{std::move(atoms)});
}

// ---------------------------------------------------------------------------
// text form

namespace detail {

inline std::string fmt_real(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
  return {buf, r.ptr};
}

inline double parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw DomainError("bad number '" + std::string(s) + "'");
  }
  return v;
}

inline std::int64_t parse_int64(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DomainError("bad integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

/// Canonical text form, e.g. "power(uniform(0,1),2)"; parse_random_variable reads it back.
inline std::string describe(const RandomVariableSpec& spec) {
  using S = RandomVariableSpec;
  using detail::fmt_real;
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, S::Uniform>) {
          return "uniform(" + fmt_real(k.a) + "," + fmt_real(k.b) + ")";
        } else if constexpr (std::is_same_v<T, S::Exponential>) {
          return "exponential(" + fmt_real(k.rate) + ")";
        } else if constexpr (std::is_same_v<T, S::Normal>) {
          return "normal(" + fmt_real(k.mean) + "," + fmt_real(k.sd) + ")";
        } else if constexpr (std::is_same_v<T, S::BenfordExact>) {
          return "benford";
        } else if constexpr (std::is_same_v<T, S::Scaled>) {
          return "scaled(" + describe(*k.inner) + "," + fmt_real(k.factor) + ")";
        } else if constexpr (std::is_same_v<T, S::PowerOf>) {
          return "power(" + describe(*k.inner) + "," + std::to_string(k.k) + ")";
        } else {
          std::string out = "atoms(";
          for (std::size_t i = 0; i < k.atoms.size(); ++i) {
            if (i) out += ",";
            out += fmt_real(k.atoms[i].first) + ":" + fmt_real(k.atoms[i].second);
          }
          return out + ")";
        }
      },
      spec.kind());
}

/// Reads uniform(a,b), exponential(rate) or exp(rate), normal(mean,sd), benford,
/// scaled(law,factor), power(law,k), atoms(v:p,...) and const(c).
inline RandomVariableSpec parse_random_variable(std::string_view text) {
  using S = RandomVariableSpec;
  text = detail::trim(text);
  const auto open = text.find('(');
  const std::string_view name = detail::trim(text.substr(0, open));
  if (open == std::string_view::npos) {
    if (name == "benford") return S::benford();
    throw DomainError("unknown law '" + std::string(text) + "'");
  }
  if (text.back() != ')') throw DomainError("unbalanced parentheses in '" + std::string(text) + "'");
  const auto args = detail::split_top(text.substr(open + 1, text.size() - open - 2));
  const auto need = [&](std::size_t n) {
    if (args.size() != n) throw DomainError("law '" + std::string(name) + "' takes " + std::to_string(n) + " arguments");
  };
  if (name == "uniform") {
    need(2);
    return S::uniform(detail::parse_real(args[0]), detail::parse_real(args[1]));
  }
  if (name == "exponential" || name == "exp") {
    need(1);
    return S::exponential(detail::parse_real(args[0]));
  }
  if (name == "normal") {
    need(2);
    return S::normal(detail::parse_real(args[0]), detail::parse_real(args[1]));
  }
  if (name == "scaled") {
    need(2);
    return S::scaled(parse_random_variable(args[0]), detail::parse_real(args[1]));
  }
  if (name == "power") {
    need(2);
    return S::power(parse_random_variable(args[0]), detail::parse_int64(args[1]));
  }
  if (name == "const") {
    need(1);
    return S::constant(detail::parse_real(args[0]));
  }
  if (name == "atoms") {
    std::vector<std::pair<double, double>> atoms;
    for (auto a : args) {
      const auto colon = a.find(':');
      if (colon == std::string_view::npos) throw DomainError("atoms are written value:probability");
      const std::string_view p = detail::trim(a.substr(colon + 1));
      double prob = 0.0;
      if (const auto slash = p.find('/'); slash != std::string_view::npos) {
        prob = detail::parse_real(p.substr(0, slash)) / detail::parse_real(p.substr(slash + 1));
      } else {
        prob = detail::parse_real(p);
      }
      atoms.emplace_back(detail::parse_real(a.substr(0, colon)), prob);
    }
    return S::atoms(std::move(atoms));
  }
  throw DomainError("unknown law '" + std::string(name) + "'");
}

/// FNV-1a over the generator id and the canonical text of the spec.
inline std::uint64_t spec_digest(std::string_view canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  feed(kGeneratorId);
  feed("|");
  feed(canonical);
  return h;
}
inline std::uint64_t spec_digest(const RandomVariableSpec& spec) { return spec_digest(describe(spec)); }

// ---------------------------------------------------------------------------
// distribution functions

namespace detail {

inline double cdf_impl(const RandomVariableSpec& spec, double t, bool left) {
  using S = RandomVariableSpec;
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, S::Uniform>) {
          return std::clamp((t - k.a) / (k.b - k.a), 0.0, 1.0);
        } else if constexpr (std::is_same_v<T, S::Exponential>) {
          return t <= 0.0 ? 0.0 : -std::expm1(-k.rate * t);
        } else if constexpr (std::is_same_v<T, S::Normal>) {
          return 0.5 * std::erfc(-(t - k.mean) / (k.sd * std::numbers::sqrt2));
        } else if constexpr (std::is_same_v<T, S::BenfordExact>) {
          return t < 1.0 ? 0.0 : t >= 10.0 ? 1.0 : std::log10(t);
        } else if constexpr (std::is_same_v<T, S::Scaled>) {
          return cdf_impl(*k.inner, t / k.factor, left);
        } else if constexpr (std::is_same_v<T, S::PowerOf>) {
          if (!traits(*k.inner).positive) throw DomainError("distribution of a power needs a positive base law");
          if (t <= 0.0) return 0.0;
          const double s = std::pow(t, 1.0 / static_cast<double>(k.k));
          if (k.k > 0) return cdf_impl(*k.inner, s, left);
          return 1.0 - cdf_impl(*k.inner, s, !left);
        } else {
          double c = 0.0;
          for (auto [v, p] : k.atoms) c += (left ? v < t : v <= t) ? p : 0.0;
          return std::min(c, 1.0);
        }
      },
      spec.kind());
}

}  // namespace detail

/// P(X ≤ t).
inline double cdf(const RandomVariableSpec& spec, double t) { return detail::cdf_impl(spec, t, false); }

/// Lebesgue density at x; discrete laws have none.
inline double density(const RandomVariableSpec& spec, double x) {
  using S = RandomVariableSpec;
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, S::Uniform>) {
          return x >= k.a && x <= k.b ? 1.0 / (k.b - k.a) : 0.0;
        } else if constexpr (std::is_same_v<T, S::Exponential>) {
          return x < 0.0 ? 0.0 : k.rate * std::exp(-k.rate * x);
        } else if constexpr (std::is_same_v<T, S::Normal>) {
          const double z = (x - k.mean) / k.sd;
          return std::exp(-0.5 * z * z) / (k.sd * std::sqrt(2.0 * std::numbers::pi));
        } else if constexpr (std::is_same_v<T, S::BenfordExact>) {
          return x >= 1.0 && x < 10.0 ? 1.0 / (x * std::numbers::ln10) : 0.0;
        } else if constexpr (std::is_same_v<T, S::Scaled>) {
          return density(*k.inner, x / k.factor) / k.factor;
        } else if constexpr (std::is_same_v<T, S::PowerOf>) {
          if (!traits(*k.inner).positive) throw DomainError("distribution of a power needs a positive base law");
          if (x <= 0.0) return 0.0;
          const double s = std::pow(x, 1.0 / static_cast<double>(k.k));
          return density(*k.inner, s) * s / (std::fabs(static_cast<double>(k.k)) * x);
        } else {
          throw DomainError("a discrete law has no density");
        }
      },
      spec.kind());
}

// ---------------------------------------------------------------------------
// drawing

/// A draw in the log domain: x = sign · 10^lg, with sign 0 for x = 0.
struct LogDraw {
  double lg = 0.0;
  int sign = 0;
};

namespace detail {

inline LogDraw log_of(double v) {
  if (v == 0.0) return {};
  return {std::log10(std::fabs(v)), v < 0 ? -1 : 1};
}

inline double pick_atom(const RandomVariableSpec::DiscreteAtoms& k, double u) {
  double c = 0.0;
  for (auto [v, p] : k.atoms) {
    c += p;
    if (u < c) return v;
  }
  for (auto it = k.atoms.rbegin(); it != k.atoms.rend(); ++it) {
    if (it->second > 0.0) return it->first;
  }
  return k.atoms.back().first;
}

inline double normal_draw(double mean, double sd, Stream& s) {
  const double u1 = s.next_uniform();
  const double u2 = s.next_uniform();
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace detail

/// One draw in the value domain. Consumes the same uniforms as draw_log.
inline double draw_value(const RandomVariableSpec& spec, Stream& s) {
  using S = RandomVariableSpec;
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, S::Uniform>) {
          return k.a + (k.b - k.a) * s.next_uniform();
        } else if constexpr (std::is_same_v<T, S::Exponential>) {
          return -std::log(s.next_uniform()) / k.rate;
        } else if constexpr (std::is_same_v<T, S::Normal>) {
          return detail::normal_draw(k.mean, k.sd, s);
        } else if constexpr (std::is_same_v<T, S::BenfordExact>) {
          return std::pow(10.0, s.next_uniform());
        } else if constexpr (std::is_same_v<T, S::Scaled>) {
          return draw_value(*k.inner, s) * k.factor;
        } else if constexpr (std::is_same_v<T, S::PowerOf>) {
          return std::pow(draw_value(*k.inner, s), static_cast<double>(k.k));
        } else {
          return detail::pick_atom(k, s.next_uniform());
        }
      },
      spec.kind());
}

/// One draw as (log10 |x|, sign); powers and scalings stay exact in range.
inline LogDraw draw_log(const RandomVariableSpec& spec, Stream& s) {
  using S = RandomVariableSpec;
  return std::visit(
      [&](const auto& k) -> LogDraw {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, S::BenfordExact>) {
          return {s.next_uniform(), 1};
        } else if constexpr (std::is_same_v<T, S::Scaled>) {
          LogDraw d = draw_log(*k.inner, s);
          if (d.sign != 0) d.lg += std::log10(k.factor);
          return d;
        } else if constexpr (std::is_same_v<T, S::PowerOf>) {
          LogDraw d = draw_log(*k.inner, s);
          if (d.sign == 0) return d;
          d.lg *= static_cast<double>(k.k);
          if (k.k % 2 == 0) d.sign = 1;
          return d;
        } else {
          return detail::log_of(draw_value(spec, s));
        }
      },
      spec.kind());
}

/// ⟨log10 |x|⟩ of a nonzero draw; S(x) = 10^result.
inline double log_significand_of(const LogDraw& d) { return frac(d.lg); }

// ---------------------------------------------------------------------------
// samples

struct SampleBatch {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t spec_digest = 0;
  std::string generator{kGeneratorId};
  std::string spec;
};

namespace detail {

inline void check_count(std::int64_t n, const char* what) {
  if (n < 1) throw DomainError(std::string(what) + " must be at least 1");
  if (n > kMaxSamples) throw ResourceError(std::string(what) + " exceeds the sample budget");
}

inline void check_work(double work) {
  if (work > 4.0 * static_cast<double>(kMaxSamples) * 100.0) throw ResourceError("experiment exceeds the draw budget");
}

// Log significands of n draws (zeros dropped), item i from root.child(i).
template <class Draw>
std::vector<double> log_significands(std::int64_t n, const Stream& root, Draw&& draw) {
  std::vector<double> out(static_cast<std::size_t>(n));
  std::vector<char> keep(static_cast<std::size_t>(n), 1);
  parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Stream s = root.child(i);
      const LogDraw d = draw(s);
      if (d.sign == 0) {
        keep[i] = 0;
      } else {
        out[i] = frac(d.lg);
      }
    }
  });
  std::size_t w = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (keep[i]) out[w++] = out[i];
  }
  out.resize(w);
  if (out.empty()) throw DomainError("every draw was zero; no significands to compare");
  return out;
}

}  // namespace detail

/// n i.i.d. draws; value i comes from stream(seed).child(i).
inline SampleBatch sample(const RandomVariableSpec& spec, std::int64_t n, std::uint64_t seed) {
  detail::check_count(n, "sample size");
  SampleBatch batch;
  batch.seed = seed;
  batch.spec = describe(spec);
  batch.spec_digest = spec_digest(batch.spec);
  batch.values.resize(static_cast<std::size_t>(n));
  const Stream root(seed);
  parallel_for(batch.values.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Stream s = root.child(i);
      batch.values[i] = draw_value(spec, s);
    }
  });
  return batch;
}

/// sup |F(s) − G(s)| between the empirical CDFs of two samples.
inline double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("two-sample distance needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    best = std::max(best, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

/// Kolmogorov distance of S(X) to Benford, equal to the star discrepancy of ⟨log X⟩.
inline double ks_log_significands(std::vector<double> logs) {
  return star_discrepancy_of(std::move(logs)).star_discrepancy;
}

/// Fraction of a log-significand sample with S ≤ t.
inline double empirical_significand_cdf(std::span<const double> logs, double t) {
  if (logs.empty()) throw DomainError("empty sample");
  const double s = std::log10(t);
  return static_cast<double>(std::count_if(logs.begin(), logs.end(), [&](double v) { return v <= s; })) /
         static_cast<double>(logs.size());
}

// ---------------------------------------------------------------------------
// powers and products

/// Kolmogorov distance of S(U^n), U uniform on (0,1), to Benford.
///
/// −log10 U^n is exponential with rate λ = ln10/n, so ⟨log10 U^n⟩ has CDF
/// F(s) = (e^{−λ(1−s)} − e^{−λ}) / (1 − e^{−λ}). The gap F(s) − s vanishes at both
/// ends and is convex, so its extremum is the one stationary point.
inline double uniform_power_distance(std::int64_t n) {
  if (n < 1) throw DomainError("power must be at least 1");
  const double lam = std::numbers::ln10 / static_cast<double>(n);
  const double denom = -std::expm1(-lam);
  const auto gap = [&](double s) { return (std::exp(-lam * (1.0 - s)) - std::exp(-lam)) / denom - s; };
  const double one_minus_s = -std::log(denom / lam) / lam;
  double best = std::max(std::fabs(gap(0.0)), std::fabs(gap(1.0)));
  const double s = 1.0 - one_minus_s;
  if (s > 0.0 && s < 1.0) best = std::max(best, std::fabs(gap(s)));
  return best;
}

namespace detail {

inline void require_continuous(const RandomVariableSpec& spec) {
  if (!traits(spec).continuous) throw DomainError("this experiment needs a continuous law");
}

inline void check_steps(std::int64_t n_max) {
  if (n_max < 1 || n_max > 100) throw DomainError("step count must be in 1..100");
}

}  // namespace detail

/// distances[n−1] = KS(S(X^n), Benford) for n = 1..n_max, all n sharing the same draws of X.
inline std::vector<double> power_sequence(const RandomVariableSpec& spec, std::int64_t n_max, std::int64_t samples,
                                          std::uint64_t seed) {
  detail::require_continuous(spec);
  detail::check_steps(n_max);
  detail::check_count(samples, "sample count");
  const Stream root(seed);
  std::vector<LogDraw> draws(static_cast<std::size_t>(samples));
  parallel_for(draws.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Stream s = root.child(i);
      draws[i] = draw_log(spec, s);
    }
  });
  std::vector<double> out;
  std::vector<double> logs;
  logs.reserve(draws.size());
  for (std::int64_t n = 1; n <= n_max; ++n) {
    logs.clear();
    for (const auto& d : draws) {
      if (d.sign != 0) logs.push_back(frac(static_cast<double>(n) * d.lg));
    }
    if (logs.empty()) throw DomainError("every draw was zero");
    out.push_back(ks_log_significands(logs));
  }
  return out;
}

/// distances[k−1] = KS(S(X_1⋯X_k), Benford) for k = 1..n_max; path i from child(i).
inline std::vector<double> product_sequence(const RandomVariableSpec& spec, std::int64_t n_max, std::int64_t samples,
                                            std::uint64_t seed) {
  detail::require_continuous(spec);
  detail::check_steps(n_max);
  detail::check_count(samples, "sample count");
  detail::check_work(static_cast<double>(n_max) * static_cast<double>(samples));
  const Stream root(seed);
  const auto m = static_cast<std::size_t>(samples);
  std::vector<Stream> streams;
  streams.reserve(m);
  for (std::size_t i = 0; i < m; ++i) streams.push_back(root.child(i));
  std::vector<double> sum(m, 0.0);
  std::vector<char> zero(m, 0);
  std::vector<double> out;
  for (std::int64_t k = 1; k <= n_max; ++k) {
    parallel_for(m, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const LogDraw d = draw_log(spec, streams[i]);
        if (d.sign == 0) zero[i] = 1;
        sum[i] += d.lg;
      }
    });
    std::vector<double> logs;
    logs.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (!zero[i]) logs.push_back(frac(sum[i]));
    }
    if (logs.empty()) throw DomainError("every product was zero");
    out.push_back(ks_log_significands(std::move(logs)));
  }
  return out;
}

/// KS(S(X·Y), Benford) with X exactly Benford and Y independent.
inline double product_with_benford(const RandomVariableSpec& spec_y, std::int64_t samples, std::uint64_t seed) {
  if (traits(spec_y).atom_at_zero) throw DomainError("the second factor must not have an atom at 0");
  detail::check_count(samples, "sample count");
  return ks_log_significands(detail::log_significands(samples, Stream(seed), [&](Stream& s) {
    const double x = s.next_uniform();
    LogDraw d = draw_log(spec_y, s);
    d.lg += x;
    return d;
  }));
}

/// A single path ⟨log(X_1⋯X_k)⟩, k = 1..n, accumulated on a fixed-point grid.
inline Mod1Sequence product_path(const RandomVariableSpec& spec, std::int64_t n, std::uint64_t seed) {
  detail::check_count(n, "path length");
  if (traits(spec).atom_at_zero) throw DomainError("factors must not have an atom at 0");
  Stream s(seed);
  FixedLog acc;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    acc += FixedLog::from_double(draw_log(spec, s).lg);
    out.push_back(acc.fraction());
  }
  return Mod1Sequence(std::move(out));
}

// ---------------------------------------------------------------------------
// scale and base invariance

/// Two independent samples of significands, as sorted ⟨log⟩ values.
struct TwoSampleResult {
  double distance = 0.0;
  std::vector<double> left;
  std::vector<double> right;
};

namespace detail {

template <class DrawL, class DrawR>
TwoSampleResult two_sample(std::int64_t samples, std::uint64_t seed, DrawL&& dl, DrawR&& dr) {
  check_count(samples, "sample count");
  const Stream root(seed);
  TwoSampleResult r;
  r.left = log_significands(samples, root.child(0), dl);
  r.right = log_significands(samples, root.child(1), dr);
  std::sort(r.left.begin(), r.left.end());
  std::sort(r.right.begin(), r.right.end());
  r.distance = two_sample_ks(r.left, r.right);
  return r;
}

}  // namespace detail

/// Two-sample distance between S(X) and S(aX), from independent streams.
inline TwoSampleResult scale_invariance_check(const RandomVariableSpec& spec, double a, std::int64_t samples,
                                              std::uint64_t seed) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("scale factor must be positive");
  const double la = std::log10(a);
  return detail::two_sample(
      samples, seed, [&](Stream& s) { return draw_log(spec, s); },
      [&](Stream& s) {
        LogDraw d = draw_log(spec, s);
        d.lg += la;
        return d;
      });
}

/// Z = X with probability 1 − q (X exactly Benford) and Z = 10^atom_exponent
/// (significand 1) with probability q.
struct MixtureLaw {
  double q = 0.0;
  std::int64_t atom_exponent = 0;

  explicit MixtureLaw(double q_, std::int64_t atom_exp = 0) : q(q_), atom_exponent(atom_exp) {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("mixture weight must be in [0, 1]");
  }
};

inline LogDraw draw_log(const MixtureLaw& m, Stream& s) {
  const double pick = s.next_uniform();
  const double u = s.next_uniform();
  if (pick < m.q) return {static_cast<double>(m.atom_exponent), 1};
  return {u, 1};
}

using LawSpec = std::variant<RandomVariableSpec, MixtureLaw>;

inline LogDraw draw_log(const LawSpec& law, Stream& s) {
  return std::visit([&](const auto& l) { return draw_log(l, s); }, law);
}

/// Two-sample distance between S(Z) and S(Z^n), from independent streams.
inline TwoSampleResult base_invariance_check(const LawSpec& law, std::int64_t n, std::int64_t samples,
                                             std::uint64_t seed) {
  if (n < 2) throw DomainError("base change needs n >= 2");
  const auto dn = static_cast<double>(n);
  return detail::two_sample(
      samples, seed, [&](Stream& s) { return draw_log(law, s); },
      [&](Stream& s) {
        LogDraw d = draw_log(law, s);
        d.lg *= dn;
        if (n % 2 == 0 && d.sign != 0) d.sign = 1;
        return d;
      });
}

/// sup_t |P(S(Z) ≤ t) − log t| = q: the atom puts mass q at t = 1.
inline double mixture_distance_to_benford(double q) { return MixtureLaw(q).q; }

/// KS(S(Z), Benford) from `samples` draws of any law.
inline double sampled_distance_to_benford(const LawSpec& law, std::int64_t samples, std::uint64_t seed) {
  detail::check_count(samples, "sample count");
  return ks_log_significands(detail::log_significands(samples, Stream(seed), [&](Stream& s) { return draw_log(law, s); }));
}

// ---------------------------------------------------------------------------
// random function systems

struct MultiplyBy {
  double c;
};
/// x ↦ x^k for x > 0.
struct PowerMap {
  Rational k;
};
/// x ↦ a·x + b.
struct AffineMap {
  double a, b;
};
using FunctionSpec = std::variant<MultiplyBy, PowerMap, AffineMap>;

inline void validate(const FunctionSpec& f) {
  std::visit(
      [](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, MultiplyBy>) {
          if (!(g.c > 0.0) || !std::isfinite(g.c)) throw DomainError("multiplier must be positive");
        } else if constexpr (std::is_same_v<T, PowerMap>) {
          if (g.k.sign() == 0) throw DomainError("power map needs k != 0");
        } else {
          if (!(g.a > 0.0) || !std::isfinite(g.a) || !std::isfinite(g.b)) throw DomainError("affine map needs a > 0");
        }
      },
      f);
}

inline std::string describe(const FunctionSpec& f) {
  return std::visit(
      [](const auto& g) -> std::string {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, MultiplyBy>) {
          return "mul:" + detail::fmt_real(g.c);
        } else if constexpr (std::is_same_v<T, PowerMap>) {
          return "pow:" + g.k.to_string();
        } else {
          return "affine:" + detail::fmt_real(g.a) + "," + detail::fmt_real(g.b);
        }
      },
      f);
}

/// mul:c, pow:k (k rational, e.g. 1/2) or affine:a,b.
inline FunctionSpec parse_function(std::string_view text) {
  text = detail::trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw DomainError("function spec needs the form kind:params");
  const auto kind = detail::trim(text.substr(0, colon));
  const auto rest = text.substr(colon + 1);
  FunctionSpec f = MultiplyBy{1.0};
  if (kind == "mul") {
    f = MultiplyBy{detail::parse_real(rest)};
  } else if (kind == "pow") {
    f = PowerMap{Rational::parse(detail::trim(rest))};
  } else if (kind == "affine") {
    const auto args = detail::split_top(rest);
    if (args.size() != 2) throw DomainError("affine map takes a,b");
    f = AffineMap{detail::parse_real(args[0]), detail::parse_real(args[1])};
  } else {
    throw DomainError("unknown function kind '" + std::string(kind) + "'");
  }
  validate(f);
  return f;
}

namespace detail {

// log2 of a bound on |log10 x| after one step, given log2 of the current bound.
inline double grow_bound(double b, const FunctionSpec& f) {
  const auto add = [](double b0, double c) { return c <= 0.0 ? b0 : std::max(b0, std::log2(c)) + std::log2(1.0 + std::exp2(-std::fabs(b0 - std::log2(c)))); };
  return std::visit(
      [&](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, MultiplyBy>) {
          return add(b, std::fabs(std::log10(g.c)));
        } else if constexpr (std::is_same_v<T, PowerMap>) {
          return b + std::log2(std::fabs(g.k.to_double()));
        } else {
          return add(b, std::fabs(std::log10(g.a)) + 1.0);
        }
      },
      f);
}

class MapStepper {
 public:
  MapStepper(const FunctionSpec& f, mpfr_prec_t prec) : f_(f), prec_(prec), c_(prec), t_(prec) {
    std::visit(
        [&](const auto& g) {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, MultiplyBy>) {
            mpfr_set_d(c_.get(), g.c, MPFR_RNDN);
            mpfr_log10(c_.get(), c_.get(), MPFR_RNDN);
          } else if constexpr (std::is_same_v<T, AffineMap>) {
            mpfr_set_d(c_.get(), g.a, MPFR_RNDN);
            mpfr_log10(c_.get(), c_.get(), MPFR_RNDN);
          }
        },
        f_);
  }

  // l ← log10 f(10^l)
  void apply(BigFloat& l) {
    std::visit(
        [&](const auto& g) {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, MultiplyBy>) {
            mpfr_add(l.get(), l.get(), c_.get(), MPFR_RNDN);
          } else if constexpr (std::is_same_v<T, PowerMap>) {
            mpfr_mul_si(l.get(), l.get(), static_cast<long>(g.k.num()), MPFR_RNDN);
            mpfr_div_si(l.get(), l.get(), static_cast<long>(g.k.den()), MPFR_RNDN);
          } else {
            affine(l, g);
          }
        },
        f_);
  }

 private:
  void affine(BigFloat& l, const AffineMap& g) {
    if (g.b == 0.0) {
      mpfr_add(l.get(), l.get(), c_.get(), MPFR_RNDN);
      return;
    }
    // log10(a·10^l + b) = l + log10 a + log10(1 + (b/a)·10^−l)
    const double r = std::log10(std::fabs(g.b / g.a)) - mpfr_get_d(l.get(), MPFR_RNDN);
    if (r < -0.30103 * static_cast<double>(prec_) - 20.0) {
      mpfr_add(l.get(), l.get(), c_.get(), MPFR_RNDN);
      return;
    }
    if (r > 1e6) {  // x negligible against b
      if (g.b < 0.0) throw DomainError("affine map left the positive axis");
      mpfr_set_d(l.get(), g.b, MPFR_RNDN);
      mpfr_log10(l.get(), l.get(), MPFR_RNDN);
      return;
    }
    mpfr_neg(t_.get(), l.get(), MPFR_RNDN);
    mpfr_exp10(t_.get(), t_.get(), MPFR_RNDN);
    mpfr_mul_d(t_.get(), t_.get(), g.b / g.a, MPFR_RNDN);
    if (mpfr_cmp_si(t_.get(), -1) <= 0) throw DomainError("affine map left the positive axis");
    mpfr_log1p(t_.get(), t_.get(), MPFR_RNDN);
    mpfr_div_d(t_.get(), t_.get(), std::numbers::ln10, MPFR_RNDN);
    mpfr_add(l.get(), l.get(), c_.get(), MPFR_RNDN);
    mpfr_add(l.get(), l.get(), t_.get(), MPFR_RNDN);
  }

  FunctionSpec f_;
  mpfr_prec_t prec_;
  BigFloat c_;
  BigFloat t_;
};

/// Cap on steps × working bits for random function systems.
inline constexpr double kIterationWorkBudget = 2e11;

// Random start: a double draw with uniformly random bits appended below its last place.
inline BigFloat random_real(const RandomVariableSpec& spec, Stream& s, mpfr_prec_t prec) {
  const double v = draw_value(spec, s);
  BigFloat x(prec, v);
  if (v == 0.0 || prec <= 64) return x;
  mpz_class z = 0;
  const auto words = static_cast<std::size_t>((prec + 63) / 64);
  for (std::size_t i = 0; i < words; ++i) {
    z <<= 64;
    const std::uint64_t w = s.next_u64();
    z += static_cast<unsigned long>(w);
  }
  BigFloat tail(prec);
  mpfr_set_z(tail.get(), z.get_mpz_t(), MPFR_RNDN);
  int e = 0;
  std::frexp(v, &e);
  mpfr_mul_2si(tail.get(), tail.get(), static_cast<long>(e - 53) - static_cast<long>(words * 64), MPFR_RNDN);
  mpfr_add(x.get(), x.get(), tail.get(), MPFR_RNDN);
  return x;
}

template <class StartLog>
Mod1Sequence run_iteration(const FunctionSpec& f1, const FunctionSpec& f2, double p1, double l0_bound, std::int64_t n,
                           Stream& s, StartLog&& start_log) {
  validate(f1);
  validate(f2);
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw DomainError("p1 must be a probability");
  check_length(n);
  std::vector<char> first(static_cast<std::size_t>(n));
  double b = std::log2(std::max(1.0, l0_bound));
  double bmax = b;
  for (auto& c : first) {
    c = s.next_uniform() < p1;
    b = grow_bound(b, c ? f1 : f2);
    bmax = std::max(bmax, b);
  }
  const auto prec = static_cast<mpfr_prec_t>(96 + std::ceil(bmax + std::log2(static_cast<double>(n))));
  if (static_cast<double>(prec) * static_cast<double>(n) > kIterationWorkBudget) {
    throw ResourceError("random iteration too long for its precision budget");
  }
  MapStepper m1(f1, prec), m2(f2, prec);
  BigFloat l = start_log(prec);
  std::vector<LogTerm> terms;
  terms.reserve(first.size());
  for (char c : first) {
    (c ? m1 : m2).apply(l);
    terms.push_back(term_from_big(l));
  }
  return to_mod1(terms);
}

}  // namespace detail

/// One path of the system x ↦ f1(x) w.p. p1, f2(x) otherwise, as ⟨log10 x_1⟩..⟨log10 x_n⟩.
/// x0 is taken as the exact double; work is in log10 x with enough bits for the path.
inline Mod1Sequence randomized_iteration(const FunctionSpec& f1, const FunctionSpec& f2, double p1, double x0,
                                         std::int64_t n, std::uint64_t seed) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw DomainError("start must be positive");
  Stream s(seed);
  return detail::run_iteration(f1, f2, p1, std::fabs(std::log10(x0)), n, s, [&](mpfr_prec_t prec) {
    detail::BigFloat l(prec, x0);
    mpfr_log10(l.get(), l.get(), MPFR_RNDN);
    return l;
  });
}

/// As above with x0 drawn from `start` (a continuous positive law) and extended with random low bits.
inline Mod1Sequence randomized_iteration(const FunctionSpec& f1, const FunctionSpec& f2, double p1,
                                         const RandomVariableSpec& start, std::int64_t n, std::uint64_t seed) {
  const LawTraits t = traits(start);
  if (!t.continuous || !t.positive) throw DomainError("random start needs a continuous positive law");
  Stream choices = Stream(seed).child(0);
  Stream start_stream = Stream(seed).child(1);
  Stream probe = start_stream;
  const double x0 = draw_value(start, probe);
  return detail::run_iteration(f1, f2, p1, std::fabs(std::log10(x0)), n, choices, [&](mpfr_prec_t prec) {
    detail::BigFloat l = detail::random_real(start, start_stream, prec);
    mpfr_log10(l.get(), l.get(), MPFR_RNDN);
    return l;
  });
}

// ---------------------------------------------------------------------------
// polynomial iterates from random starts

/// Monte Carlo rendering of a probability-one claim: a trial passes when its
/// discrepancy is below `threshold`; the claim is supported when at least
/// `required_fraction` of trials pass.
struct ProbabilityOneCriterion {
  double threshold = 0.05;
  double required_fraction = 0.95;
};

struct RandomStartResult {
  std::vector<double> discrepancies;
  double fraction_below = 0.0;
  double threshold = 0.0;
};

/// Star discrepancy of ⟨log10 x_k⟩, k = 1..n, for x_{k+1} = f(x_k) from an exact start.
inline double polynomial_orbit_discrepancy(std::span<const Rational> coeffs, const detail::BigFloat& x0,
                                           std::int64_t n) {
  detail::check_length(n);
  const auto prec = PolynomialOrbit::precision_for(n, detail::polynomial_degree(coeffs));
  return star_discrepancy(to_mod1(polynomial_orbit_terms(coeffs, x0, n, prec))).star_discrepancy;
}

/// Fraction of `trials` random starts whose first-n orbit discrepancy is below the threshold.
/// f(x) > x is checked at every sampled start, and starts must exceed `region_lower` when given.
inline RandomStartResult polynomial_iterate_random_start(std::span<const Rational> coeffs,
                                                         const RandomVariableSpec& start, std::int64_t n,
                                                         std::int64_t trials, std::uint64_t seed,
                                                         double threshold = ProbabilityOneCriterion{}.threshold,
                                                         std::optional<double> region_lower = std::nullopt) {
  const int degree = detail::polynomial_degree(coeffs);
  if (degree < 2) throw DomainError("random-start iterates need a nonlinear polynomial");
  if (!traits(start).continuous) throw DomainError("start distribution must be continuous (no atoms)");
  detail::check_length(n);
  detail::check_count(trials, "trial count");
  const auto prec = PolynomialOrbit::precision_for(n, degree);
  if (static_cast<double>(n) * static_cast<double>(prec) * static_cast<double>(trials) > 50 * kOrbitWorkBudget) {
    throw ResourceError("random-start experiment exceeds the precision budget");
  }
  std::vector<double> x0s(static_cast<std::size_t>(trials));
  const Stream root(seed);
  for (std::size_t i = 0; i < x0s.size(); ++i) {
    Stream s = root.child(i);
    const double x = draw_value(start, s);
    double fx = 0.0;
    for (int j = degree; j >= 0; --j) fx = fx * x + coeffs[static_cast<std::size_t>(j)].to_double();
    if (region_lower && !(x > *region_lower)) throw DomainError("sampled start outside the admissible region");
    if (!(fx > x)) throw DomainError("f(x) > x fails at a sampled start");
    x0s[i] = x;
  }
  RandomStartResult r;
  r.threshold = threshold;
  r.discrepancies.resize(x0s.size());
  std::vector<Rational> c(coeffs.begin(), coeffs.end());
  parallel_for(x0s.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Stream s = root.child(i);
      const detail::BigFloat x0 = detail::random_real(start, s, prec);
      r.discrepancies[i] = star_discrepancy(to_mod1(polynomial_orbit_terms(c, x0, n, prec))).star_discrepancy;
    }
  });
  const auto pass = std::count_if(r.discrepancies.begin(), r.discrepancies.end(), [&](double d) { return d < threshold; });
  r.fraction_below = static_cast<double>(pass) / static_cast<double>(trials);
  return r;
}

// ---------------------------------------------------------------------------
// random probability measures

class RandomMeasureSpec {
 public:
  struct Component {
    double weight;
    RandomVariableSpec law;
  };

  explicit RandomMeasureSpec(std::vector<Component> components) : components_(std::move(components)) {
    if (components_.empty()) throw DomainError("random measure needs at least one component");
    double total = 0.0;
    for (const auto& c : components_) {
      if (!(c.weight >= 0.0) || c.weight > 1.0) throw DomainError("component weights must be probabilities");
      total += c.weight;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw DomainError("component weights must sum to 1");
  }

  [[nodiscard]] const std::vector<Component>& components() const { return components_; }

 private:
  std::vector<Component> components_;
};

/// E(t) = Σ w_i P_i((−∞, t]), the CDF of the average measure.
inline double average_measure_cdf(const RandomMeasureSpec& m, double t) {
  double s = 0.0;
  for (const auto& c : m.components()) s += c.weight * cdf(c.law, t);
  return s;
}

inline double average_measure_density(const RandomMeasureSpec& m, double x) {
  double s = 0.0;
  for (const auto& c : m.components()) s += c.weight * density(c.law, x);
  return s;
}

/// k_measures laws drawn i.i.d. by weight, then per_measure i.i.d. values from each, concatenated.
/// Component laws must be continuous with no mass at 0.
inline SampleBatch combined_sample(const RandomMeasureSpec& m, std::int64_t per_measure, std::int64_t k_measures,
                                   std::uint64_t seed) {
  detail::check_count(per_measure, "values per measure");
  detail::check_count(k_measures, "measure count");
  detail::check_count(per_measure * k_measures, "combined sample size");
  std::string canon = "measure(";
  for (const auto& c : m.components()) {
    if (!traits(c.law).continuous) throw DomainError("combined samples need continuous component laws");
    if (canon.size() > 8) canon += ",";
    canon += detail::fmt_real(c.weight) + ":" + describe(c.law);
  }
  canon += ")";
  SampleBatch batch;
  batch.seed = seed;
  batch.spec = canon;
  batch.spec_digest = spec_digest(canon);
  batch.values.resize(static_cast<std::size_t>(per_measure * k_measures));
  const Stream root(seed);
  const auto& comps = m.components();
  parallel_for(static_cast<std::size_t>(k_measures), [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) {
      Stream s = root.child(j);
      const double u = s.next_uniform();
      std::size_t pick = comps.size() - 1;
      double c = 0.0;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        c += comps[i].weight;
        if (u < c) {
          pick = i;
          break;
        }
      }
      for (std::int64_t v = 0; v < per_measure; ++v) {
        batch.values[j * static_cast<std::size_t>(per_measure) + static_cast<std::size_t>(v)] =
            draw_value(comps[pick].law, s);
      }
    }
  });
  return batch;
}

// ---------------------------------------------------------------------------
// random walks

struct DigitTable {
  std::array<std::int64_t, 10> counts{};  // counts[0] holds zero sums
  std::int64_t total = 0;

  [[nodiscard]] double frequency(int d) const {
    return total == 0 ? 0.0 : static_cast<double>(counts[static_cast<std::size_t>(d)]) / static_cast<double>(total);
  }
};

/// First-digit table, across paths, of the sum of n_steps i.i.d. steps.
inline DigitTable random_walk_paths(const RandomVariableSpec& step, std::int64_t n_steps, std::int64_t paths,
                                    std::uint64_t seed) {
  if (!traits(step).all_moments) throw DomainError("random walk needs a finite-variance step law");
  detail::check_count(n_steps, "step count");
  detail::check_count(paths, "path count");
  detail::check_work(static_cast<double>(n_steps) * static_cast<double>(paths) / 10.0);
  std::vector<std::uint8_t> d(static_cast<std::size_t>(paths));
  const Stream root(seed);
  parallel_for(d.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Stream s = root.child(i);
      double sum = 0.0;
      for (std::int64_t k = 0; k < n_steps; ++k) sum += draw_value(step, s);
      d[i] = static_cast<std::uint8_t>(first_digit(sum));
    }
  });
  DigitTable t;
  for (auto v : d) ++t.counts[v];
  t.total = paths;
  return t;
}

}  // namespace benford

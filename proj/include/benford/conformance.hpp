#pragma once

// Empirical Benford analysis of finite datasets: first-digit tables, the
// Kolmogorov distance to the Benford CDF, chi-square and MAD.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include "json.hpp"

#include "benford/errors.hpp"
#include "benford/law.hpp"
#include "benford/significand.hpp"

namespace benford {

/// Nonzero data reduced to significands, sorted ascending, with the zero count kept aside.
struct EmpiricalSignificands {
  std::vector<double> significands;
  std::vector<double> log_significands;  // ⟨log10 |x|⟩, same order
  std::array<std::int64_t, 9> first_digit_counts{};
  std::vector<std::int64_t> pair_counts;  // 90 cells for D1D2 = 10..99, filled on request
  std::int64_t n_used = 0;
  std::int64_t n_zero = 0;
  std::int64_t n_negative_used = 0;
};

inline EmpiricalSignificands empirical_from(std::span<const double> values, bool digit_pairs = false) {
  EmpiricalSignificands e;
  e.significands.reserve(values.size());
  if (digit_pairs) e.pair_counts.assign(90, 0);
  for (double x : values) {
    if (!std::isfinite(x)) throw DomainError("data contain a non-finite value");
    if (x == 0.0) {
      ++e.n_zero;
      continue;
    }
    if (x < 0.0) ++e.n_negative_used;
    e.significands.push_back(significand(x).significand);
    ++e.first_digit_counts[static_cast<std::size_t>(first_digit(x) - 1)];
    if (digit_pairs) {
      const DigitVector d = digits(x, 2);
      ++e.pair_counts[static_cast<std::size_t>(d[0] * 10 + d[1] - 10)];
    }
  }
  if (e.significands.empty()) throw DomainError("no nonzero values to analyze");
  std::sort(e.significands.begin(), e.significands.end());
  e.log_significands.reserve(e.significands.size());
  for (double s : e.significands) {
    const double l = std::log10(s);
    e.log_significands.push_back(l < 1.0 ? l : std::nextafter(1.0, 0.0));
  }
  e.n_used = static_cast<std::int64_t>(e.significands.size());
  return e;
}

/// sup_t |F_N(t) − log t|, taken over both one-sided limits at every jump.
inline double ks_to_benford(const EmpiricalSignificands& e) {
  const auto& l = e.log_significands;
  const auto n = static_cast<double>(l.size());
  double best = 0.0;
  std::size_t i = 0;
  while (i < l.size()) {
    std::size_t j = i;
    while (j < l.size() && l[j] == l[i]) ++j;
    best = std::max({best, std::fabs(static_cast<double>(i) / n - l[i]), std::fabs(static_cast<double>(j) / n - l[i])});
    i = j;
  }
  return best;
}

inline std::array<double, 9> expected_first_digit_counts(std::int64_t n) {
  std::array<double, 9> out{};
  for (int d = 1; d <= 9; ++d) out[static_cast<std::size_t>(d - 1)] = static_cast<double>(n) * first_digit_pmf(d);
  return out;
}

inline constexpr std::int64_t kChiSquareMinN = 45;

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 8;
};

/// Pearson statistic on first digits, with the chi-square(8) survival function as p-value.
inline ChiSquareResult chi_square_first_digit(const EmpiricalSignificands& e) {
  if (e.n_used < kChiSquareMinN) {
    throw DomainError("chi-square needs at least 45 values; an exact multinomial test would be needed (not implemented)");
  }
  const auto expected = expected_first_digit_counts(e.n_used);
  ChiSquareResult r;
  for (std::size_t d = 0; d < 9; ++d) {
    const double diff = static_cast<double>(e.first_digit_counts[d]) - expected[d];
    r.statistic += diff * diff / expected[d];
  }
  r.p_value = r.statistic <= 0.0 ? 1.0 : boost::math::gamma_q(4.0, r.statistic / 2.0);
  return r;
}

/// (1/9) Σ_d |observed share − log(1 + 1/d)|.
inline double mad_first_digit(const EmpiricalSignificands& e) {
  double s = 0.0;
  for (int d = 1; d <= 9; ++d) {
    s += std::fabs(static_cast<double>(e.first_digit_counts[static_cast<std::size_t>(d - 1)]) /
                       static_cast<double>(e.n_used) -
                   first_digit_pmf(d));
  }
  return s / 9.0;
}

struct AnalyzeOptions {
  bool digit_pairs = false;
};

struct DigitPairCell {
  int d1 = 0, d2 = 0;
  std::int64_t observed = 0;
  double expected = 0.0;
};

struct ConformanceReport {
  std::int64_t n_used = 0;
  std::int64_t n_zero = 0;
  std::int64_t n_negative_used = 0;
  std::array<std::int64_t, 9> first_digit_counts{};
  std::array<double, 9> expected_counts{};
  double ks_distance = 0.0;
  std::optional<ChiSquareResult> chi_square;  // absent below kChiSquareMinN values
  double mad = 0.0;
  std::vector<DigitPairCell> digit_pair_table;
  std::string verdict_note;
};

namespace detail {

inline std::string fmt_g(double v, int digits = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string verdict_note(const ConformanceReport& r) {
  std::string note = "descriptive distances only: KS " + fmt_g(r.ks_distance, 4) + ", MAD " + fmt_g(r.mad, 4);
  if (r.chi_square) {
    note += ", chi-square p " + fmt_g(r.chi_square->p_value, 4);
  } else {
    note += "; chi-square not computed for fewer than 45 values";
  }
  note += ". The spread or smoothness of the data is not evidence of Benford behaviour.";
  return note;
}

}  // namespace detail

inline ConformanceReport analyze(std::span<const double> values, const AnalyzeOptions& opt = {}) {
  const EmpiricalSignificands e = empirical_from(values, opt.digit_pairs);
  ConformanceReport r;
  r.n_used = e.n_used;
  r.n_zero = e.n_zero;
  r.n_negative_used = e.n_negative_used;
  r.first_digit_counts = e.first_digit_counts;
  r.expected_counts = expected_first_digit_counts(e.n_used);
  r.ks_distance = ks_to_benford(e);
  if (e.n_used >= kChiSquareMinN) r.chi_square = chi_square_first_digit(e);
  r.mad = mad_first_digit(e);
  if (opt.digit_pairs) {
    for (int i = 0; i < 90; ++i) {
      const int d1 = 1 + i / 10, d2 = i % 10;
      r.digit_pair_table.push_back({d1, d2, e.pair_counts[static_cast<std::size_t>(i)],
                                    static_cast<double>(e.n_used) * digit_tuple_prob(DigitVector({d1, d2}))});
    }
  }
  r.verdict_note = detail::verdict_note(r);
  return r;
}

// ---------------------------------------------------------------------------
// rendering

/// v rounded to 12 significant digits; the JSON writer then prints the shortest form.
inline double round12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return std::strtod(buf, nullptr);
}

inline nlohmann::ordered_json to_json(const ConformanceReport& r) {
  nlohmann::ordered_json j;
  j["n_used"] = r.n_used;
  j["n_zero"] = r.n_zero;
  j["n_negative_used"] = r.n_negative_used;
  j["first_digit_counts"] = r.first_digit_counts;
  auto& exp = j["expected_counts"] = nlohmann::ordered_json::array();
  for (double v : r.expected_counts) exp.push_back(round12(v));
  j["ks_distance"] = round12(r.ks_distance);
  if (r.chi_square) {
    j["chi_square"] = round12(r.chi_square->statistic);
    j["chi_square_dof"] = r.chi_square->dof;
    j["chi_square_pvalue"] = round12(r.chi_square->p_value);
  } else {
    j["chi_square"] = nullptr;
    j["chi_square_dof"] = 8;
    j["chi_square_pvalue"] = nullptr;
  }
  j["mad"] = round12(r.mad);
  if (!r.digit_pair_table.empty()) {
    auto& t = j["digit_pair_table"] = nlohmann::ordered_json::array();
    for (const auto& c : r.digit_pair_table) {
      nlohmann::ordered_json cell;
      cell["digits"] = std::to_string(c.d1) + std::to_string(c.d2);
      cell["observed"] = c.observed;
      cell["expected"] = round12(c.expected);
      t.push_back(std::move(cell));
    }
  }
  j["verdict_note"] = r.verdict_note;
  return j;
}

inline std::string to_text(const ConformanceReport& r) {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof line, "values used %lld, zeros %lld, negatives folded %lld\n",
                static_cast<long long>(r.n_used), static_cast<long long>(r.n_zero),
                static_cast<long long>(r.n_negative_used));
  os << line << "\n";
  os << "digit  observed     expected  obs share  benford\n";
  for (int d = 1; d <= 9; ++d) {
    const auto i = static_cast<std::size_t>(d - 1);
    std::snprintf(line, sizeof line, "%5d  %8lld  %11.3f  %9.6f  %7.6f\n", d,
                  static_cast<long long>(r.first_digit_counts[i]), r.expected_counts[i],
                  static_cast<double>(r.first_digit_counts[i]) / static_cast<double>(r.n_used), first_digit_pmf(d));
    os << line;
  }
  os << "\n";
  std::snprintf(line, sizeof line, "ks distance      %.6g\n", r.ks_distance);
  os << line;
  if (r.chi_square) {
    std::snprintf(line, sizeof line, "chi-square (8)   %.6g  p = %.6g\n", r.chi_square->statistic, r.chi_square->p_value);
  } else {
    std::snprintf(line, sizeof line, "chi-square (8)   n/a\n");
  }
  os << line;
  std::snprintf(line, sizeof line, "mad              %.6g\n", r.mad);
  os << line;
  if (!r.digit_pair_table.empty()) {
    os << "\nd1d2  observed     expected\n";
    for (const auto& c : r.digit_pair_table) {
      std::snprintf(line, sizeof line, "  %d%d  %8lld  %11.3f\n", c.d1, c.d2, static_cast<long long>(c.observed), c.expected);
      os << line;
    }
  }
  os << "\n" << r.verdict_note << "\n";
  return os.str();
}

}  // namespace benford

#pragma once

// The `benford` command line: analyze, law, generate, classify, simulate, demo.
//
// Exit codes: 0 success, 1 usage or parse error, 2 data error, 3 budget exceeded.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "benford/conformance.hpp"
#include "benford/errors.hpp"
#include "benford/ingest.hpp"
#include "benford/law.hpp"
#include "benford/mod1.hpp"
#include "benford/sequences.hpp"
#include "benford/significand.hpp"
#include "benford/stochastic.hpp"

namespace benford::cli {

inline constexpr std::uint64_t kDefaultSeed = 42;

using ojson = nlohmann::ordered_json;

enum class Output { Text, Json, Csv };

namespace detail {

inline std::string num(double v, int digits = 12) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline Output output_of(const std::string& s) {
  if (s == "json") return Output::Json;
  if (s == "csv") return Output::Csv;
  return Output::Text;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = s.find(sep, start);
    out.emplace_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

inline std::vector<double> parse_reals(std::string_view s, std::size_t want, const char* what) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(benford::detail::parse_real(part));
  if (out.size() != want) throw DomainError(std::string(what) + " needs " + std::to_string(want) + " comma-separated numbers");
  return out;
}

/// "3,1,4" or "314".
inline DigitVector parse_tuple(std::string_view s) {
  std::vector<int> d;
  if (s.find(',') == std::string_view::npos) {
    for (char c : s) {
      if (c < '0' || c > '9') throw DomainError("digit tuple must be digits, e.g. 3,1,4");
      d.push_back(c - '0');
    }
  } else {
    for (const auto& part : split(s, ',')) {
      const auto v = benford::detail::parse_int64(part);
      d.push_back(static_cast<int>(v));
    }
  }
  return DigitVector(std::move(d));
}

inline RandomMeasureSpec parse_measure(std::string_view s) {
  std::vector<RandomMeasureSpec::Component> comps;
  for (const auto& part : split(s, ';')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) throw DomainError("measure components look like weight:law, separated by ';'");
    const std::string w = part.substr(0, colon);
    double weight = 0.0;
    if (const auto slash = w.find('/'); slash != std::string::npos) {
      weight = benford::detail::parse_real(w.substr(0, slash)) / benford::detail::parse_real(w.substr(slash + 1));
    } else {
      weight = benford::detail::parse_real(w);
    }
    comps.push_back({weight, parse_random_variable(part.substr(colon + 1))});
  }
  return RandomMeasureSpec(std::move(comps));
}

inline std::string table_row(const std::vector<std::string>& cells, const std::vector<std::size_t>& widths) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += "  ";
    line += std::string(widths[i] > cells[i].size() ? widths[i] - cells[i].size() : 0, ' ') + cells[i];
  }
  return line + "\n";
}

inline void print_table(std::ostream& out, const std::vector<std::string>& head,
                        const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w(head.size());
  for (std::size_t i = 0; i < head.size(); ++i) w[i] = head[i].size();
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], r[i].size());
  }
  out << table_row(head, w);
  for (const auto& r : rows) out << table_row(r, w);
}

// ---------------------------------------------------------------------------
// simulate output: one row per step, columns step, distance, samples, seed, then extras

struct Row {
  std::int64_t step = 0;
  double distance = 0.0;
  std::int64_t samples = 0;
  std::vector<double> extra;
};

struct Series {
  std::string experiment;
  std::uint64_t seed = kDefaultSeed;
  ojson parameters = ojson::object();
  std::vector<std::string> extra_columns;
  std::vector<Row> rows;
  ojson summary = ojson::object();
};

inline void emit(const Series& s, Output o, std::ostream& out) {
  if (o == Output::Json) {
    ojson j;
    j["experiment"] = s.experiment;
    j["seed"] = s.seed;
    j["generator"] = std::string(kGeneratorId);
    j["parameters"] = s.parameters;
    auto& rows = j["rows"] = ojson::array();
    for (const auto& r : s.rows) {
      ojson row;
      row["step"] = r.step;
      row["distance"] = round12(r.distance);
      row["samples"] = r.samples;
      row["seed"] = s.seed;
      for (std::size_t i = 0; i < s.extra_columns.size(); ++i) row[s.extra_columns[i]] = round12(r.extra[i]);
      rows.push_back(std::move(row));
    }
    if (!s.summary.empty()) j["summary"] = s.summary;
    out << j.dump(2) << "\n";
    return;
  }
  std::vector<std::string> head = {"step", "distance", "samples", "seed"};
  head.insert(head.end(), s.extra_columns.begin(), s.extra_columns.end());
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : s.rows) {
    std::vector<std::string> cells = {std::to_string(r.step), num(r.distance), std::to_string(r.samples),
                                      std::to_string(s.seed)};
    for (double v : r.extra) cells.push_back(num(v));
    rows.push_back(std::move(cells));
  }
  if (o == Output::Csv) {
    for (std::size_t i = 0; i < head.size(); ++i) out << (i ? "," : "") << head[i];
    out << "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << "\n";
    }
    return;
  }
  out << "experiment " << s.experiment << ", seed " << s.seed << " (" << kGeneratorId << ")\n";
  for (const auto& [k, v] : s.parameters.items()) {
    out << "  " << k << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }
  out << "\n";
  print_table(out, head, rows);
  if (!s.summary.empty()) {
    out << "\n";
    for (const auto& [k, v] : s.summary.items()) {
      out << k << ": " << (v.is_string() ? v.get<std::string>() : v.is_number_float() ? num(v.get<double>(), 6) : v.dump())
          << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// subcommand state

struct AnalyzeArgs {
  std::string input;
  std::string column;
  std::string format;
  bool no_header = false;
  bool lenient = false;
  bool pairs = false;
  std::string output = "text";
};

struct LawArgs {
  std::string tuple;
  int digit = 0;
  double cdf = 0.0;
  std::string normal;
  std::string uniform;
  std::string output = "text";
  CLI::Option* tuple_opt = nullptr;
  CLI::Option* digit_opt = nullptr;
  CLI::Option* cdf_opt = nullptr;
  CLI::Option* normal_opt = nullptr;
  CLI::Option* uniform_opt = nullptr;
};

struct GenerateArgs {
  std::string spec;
  std::int64_t n = 1000;
  std::string output = "text";
};

struct ClassifyArgs {
  std::string spec;
  std::string output = "text";
};

struct SimulateArgs {
  std::string experiment;
  std::string law, start, measure, poly = "[1,0,1]";
  std::string f1 = "mul:2", f2 = "mul:3";
  double p1 = 0.5, factor = 2.0, q = 0.3, x0 = 1.0, threshold = 0.05;
  std::int64_t n = 0, samples = 100000, trials = 50, per_measure = 10, measures = 10000, paths = 100000;
  std::vector<std::int64_t> steps;
  std::uint64_t seed = kDefaultSeed;
  std::string output = "csv";
  CLI::Option* n_opt = nullptr;
  CLI::Option* law_opt = nullptr;
  CLI::Option* q_opt = nullptr;
  CLI::Option* start_opt = nullptr;
  CLI::Option* x0_opt = nullptr;
};

struct DemoArgs {
  std::uint64_t seed = kDefaultSeed;
  std::string output = "text";
};

// ---------------------------------------------------------------------------
// analyze

inline int run_analyze(const AnalyzeArgs& a, std::ostream& out) {
  IngestOptions opt;
  std::string fmt = a.format;
  if (fmt.empty()) {
    const auto dot = a.input.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : a.input.substr(dot);
    fmt = ext == ".jsonl" || ext == ".ndjson" ? "jsonl" : "csv";
  }
  opt.format = fmt == "jsonl" ? InputFormat::Jsonl : InputFormat::Csv;
  opt.column = a.column;
  opt.header = !a.no_header;
  opt.lenient = a.lenient;
  IngestResult data;
  if (a.input == "-") {
    data = ingest(std::cin, opt);
  } else {
    std::ifstream f(a.input, std::ios::binary);
    if (!f) throw DataError("cannot open '" + a.input + "'");
    data = ingest(f, opt);
  }
  ConformanceReport r;
  try {
    r = analyze(data.values, AnalyzeOptions{a.pairs});
  } catch (const DomainError& e) {
    throw DataError(e.what());
  }
  if (output_of(a.output) == Output::Json) {
    ojson j;
    auto& in = j["input"];
    in["path"] = a.input;
    in["format"] = fmt;
    in["column"] = data.column;
    in["rows"] = data.rows;
    in["non_numeric"] = data.non_numeric;
    in["reduced_to_significand"] = data.reduced;
    in["lenient"] = a.lenient;
    j["report"] = to_json(r);
    out << j.dump(2) << "\n";
  } else {
    out << "input " << a.input << " (" << fmt << "), column " << data.column << ": rows " << data.rows
        << ", non-numeric " << data.non_numeric << (a.lenient ? " (lenient)" : "") << "\n";
    if (data.reduced > 0) out << data.reduced << " values beyond double range were reduced to their significands\n";
    out << to_text(r);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// law

inline int run_law(const LawArgs& a, std::ostream& out) {
  const bool json = output_of(a.output) == Output::Json;
  ojson j = ojson::object();
  bool any = false;
  char line[160];
  if (a.tuple_opt->count()) {
    any = true;
    const DigitVector d = parse_tuple(a.tuple);
    const double p = digit_tuple_prob(d);
    std::string digits;
    std::int64_t k = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      digits += (i ? "," : "") + std::to_string(d[i]);
      k = 10 * k + d[i];
    }
    if (json) {
      j["tuple"] = {{"digits", digits}, {"probability", round12(p)}};
    } else {
      std::snprintf(line, sizeof line, "P(D1..D%zu = %s) = %.6f  (log10(1 + 1/%lld) = %.12g)\n", d.size(),
                    digits.c_str(), p, static_cast<long long>(k), p);
      out << line;
    }
  }
  if (a.digit_opt->count()) {
    any = true;
    const double p = first_digit_pmf(a.digit);
    if (json) {
      j["digit"] = {{"d", a.digit}, {"probability", round12(p)}};
    } else {
      std::snprintf(line, sizeof line, "P(D1 = %d) = %.6f  (%.12g)\n", a.digit, p, p);
      out << line;
    }
  }
  if (a.cdf_opt->count()) {
    any = true;
    const double p = benford_cdf(a.cdf);
    if (json) {
      j["cdf"] = {{"t", a.cdf}, {"probability", round12(p)}};
    } else {
      std::snprintf(line, sizeof line, "P(S <= %g) = %.12g\n", a.cdf, p);
      out << line;
    }
  }
  if (a.normal_opt->count()) {
    any = true;
    const auto ms = parse_reals(a.normal, 2, "--normal");
    ojson probs = ojson::array();
    std::vector<std::vector<std::string>> rows;
    for (int d = 1; d <= 9; ++d) {
      const double p = normal_digit_prob(ms[0], ms[1], d);
      probs.push_back(round12(p));
      rows.push_back({std::to_string(d), num(p, 6), num(first_digit_pmf(d), 6)});
    }
    if (json) {
      j["normal"] = {{"mean", ms[0]}, {"sd", ms[1]}, {"first_digit", probs}};
    } else {
      out << "first digits of N(" << num(ms[0]) << ", " << num(ms[1]) << ")\n";
      print_table(out, {"digit", "P(D1=d)", "benford"}, rows);
    }
  }
  if (a.uniform_opt->count()) {
    any = true;
    const auto ab = parse_reals(a.uniform, 2, "--uniform");
    const double dist = uniform_benford_distance({ab[0], ab[1]});
    if (json) {
      j["uniform"] = {{"a", ab[0]}, {"b", ab[1]}, {"distance", round12(dist)}};
    } else {
      std::snprintf(line, sizeof line, "sup_t |P(S(X) <= t) - log10 t| for X ~ U(%g, %g) = %.6f\n", ab[0], ab[1], dist);
      out << line;
    }
  }
  if (!any) {
    ojson first = ojson::array(), second = ojson::array();
    std::vector<std::vector<std::string>> rows;
    for (int d = 0; d <= 9; ++d) {
      double p2 = 0.0;
      for (int d1 = 1; d1 <= 9; ++d1) p2 += digit_tuple_prob(DigitVector({d1, d}));
      second.push_back(round12(p2));
      if (d == 0) {
        rows.push_back({"0", "", "", num(p2, 6)});
        continue;
      }
      first.push_back(round12(first_digit_pmf(d)));
      rows.push_back({std::to_string(d), num(first_digit_pmf(d), 6), num(d == 9 ? 1.0 : benford_cdf(d + 1.0), 6), num(p2, 6)});
    }
    if (json) {
      j["first_digit"] = first;
      j["second_digit"] = second;
    } else {
      print_table(out, {"digit", "P(D1=d)", "P(D1<=d)", "P(D2=d)"}, rows);
    }
  }
  if (json) out << j.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// generate and classify

inline int run_generate(const GenerateArgs& a, std::ostream& out) {
  const SequenceSpec spec = parse_sequence_spec(a.spec);
  const auto terms = generate_terms(spec, a.n);
  const Output o = output_of(a.output);
  const double disc = star_discrepancy(to_mod1(terms)).star_discrepancy;
  if (o == Output::Json) {
    ojson j;
    j["spec"] = to_string(spec);
    j["n"] = a.n;
    auto& t = j["terms"] = ojson::array();
    for (std::size_t i = 0; i < terms.size(); ++i) {
      ojson row;
      row["n"] = i + 1;
      row["fraction"] = round12(term_fraction(terms[i]));
      row["significand"] = round12(term_significand(terms[i]));
      row["first_digit"] = term_first_digit(terms[i]);
      t.push_back(std::move(row));
    }
    j["star_discrepancy"] = round12(disc);
    out << j.dump(2) << "\n";
    return 0;
  }
  const char* sep = o == Output::Csv ? "," : "  ";
  if (o == Output::Text) out << "spec " << to_string(spec) << ", " << a.n << " terms\n";
  out << "n" << sep << "fraction" << sep << "significand" << sep << "first_digit\n";
  for (std::size_t i = 0; i < terms.size(); ++i) {
    out << i + 1 << sep << num(term_fraction(terms[i])) << sep << num(term_significand(terms[i])) << sep
        << term_first_digit(terms[i]) << "\n";
  }
  if (o == Output::Text) out << "star discrepancy " << num(disc, 6) << "\n";
  return 0;
}

inline int run_classify(const ClassifyArgs& a, std::ostream& out) {
  const SequenceSpec spec = parse_sequence_spec(a.spec);
  const BenfordClassification c = classify(spec);
  const bool open = c.verdict == Verdict::Unknown && c.rule == "open-problem";
  if (output_of(a.output) == Output::Json) {
    ojson j;
    j["spec"] = to_string(spec);
    j["verdict"] = to_string(c.verdict);
    j["rule"] = c.rule;
    j["note"] = c.note;
    j["open_problem"] = open;
    out << j.dump(2) << "\n";
    return 0;
  }
  out << to_string(c.verdict) << " (" << c.note << ")\n";
  if (!c.rule.empty()) out << "rule: " << c.rule << "\n";
  if (open) out << "open problem: no empirical verdict is given for this orbit\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> v = {"powers", "products", "product-with-benford", "scale-check",
                                             "base-check", "mixture", "randomized-iteration", "poly-random-start",
                                             "combined", "walk"};
  return v;
}

inline RandomVariableSpec law_or(const SimulateArgs& a, const char* fallback) {
  return parse_random_variable(a.law_opt->count() ? a.law : std::string(fallback));
}

inline std::int64_t n_or(const SimulateArgs& a, std::int64_t fallback) { return a.n_opt->count() ? a.n : fallback; }

inline RandomMeasureSpec default_measure() {
  std::vector<RandomMeasureSpec::Component> comps;
  const double scales[] = {1.0, 2.0, 3.7, 50.0, 0.013};
  const double weights[] = {0.1, 0.2, 0.3, 0.25, 0.15};
  for (int i = 0; i < 5; ++i) comps.push_back({weights[i], RandomVariableSpec::scaled(RandomVariableSpec::benford(), scales[i])});
  return RandomMeasureSpec(std::move(comps));
}

inline std::string describe_measure(const RandomMeasureSpec& m) {
  std::string s;
  for (const auto& c : m.components()) s += (s.empty() ? "" : ";") + benford::detail::fmt_real(c.weight) + ":" + describe(c.law);
  return s;
}

/// Prefix lengths 10, 20, 50, 100, ... up to n, always ending at n.
inline std::vector<std::int64_t> checkpoints(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t dec = 10; dec <= n; dec *= 10) {
    for (std::int64_t m : {1, 2, 5}) {
      if (m * dec < n) out.push_back(m * dec);
    }
  }
  out.push_back(n);
  return out;
}

inline Series simulate(const SimulateArgs& a) {
  Series s;
  s.experiment = a.experiment;
  s.seed = a.seed;
  auto& p = s.parameters;
  const std::string& e = a.experiment;
  if (e == "powers" || e == "products") {
    const auto law = law_or(a, "uniform(0,1)");
    const auto n = n_or(a, e == "powers" ? 20 : 10);
    p["law"] = describe(law);
    p["n"] = n;
    p["samples"] = a.samples;
    const auto d = e == "powers" ? power_sequence(law, n, a.samples, a.seed) : product_sequence(law, n, a.samples, a.seed);
    const bool oracle = e == "powers" && describe(law) == "uniform(0,1)";
    if (oracle) s.extra_columns = {"closed_form"};
    for (std::size_t k = 0; k < d.size(); ++k) {
      Row r{static_cast<std::int64_t>(k + 1), d[k], a.samples, {}};
      if (oracle) r.extra.push_back(uniform_power_distance(static_cast<std::int64_t>(k + 1)));
      s.rows.push_back(std::move(r));
    }
  } else if (e == "product-with-benford") {
    const auto law = law_or(a, "uniform(3,4)");
    p["law"] = describe(law);
    p["samples"] = a.samples;
    s.rows.push_back({1, product_with_benford(law, a.samples, a.seed), a.samples, {}});
  } else if (e == "scale-check") {
    const auto law = law_or(a, "benford");
    p["law"] = describe(law);
    p["factor"] = a.factor;
    p["samples"] = a.samples;
    s.rows.push_back({1, scale_invariance_check(law, a.factor, a.samples, a.seed).distance, a.samples, {}});
  } else if (e == "base-check") {
    const auto n = n_or(a, 2);
    LawSpec law = RandomVariableSpec::benford();
    if (a.q_opt->count()) {
      law = MixtureLaw(a.q);
      p["law"] = "mixture(q=" + num(a.q) + ")";
    } else {
      law = law_or(a, "benford");
      p["law"] = describe(std::get<RandomVariableSpec>(law));
    }
    p["n"] = n;
    p["samples"] = a.samples;
    s.rows.push_back({n, base_invariance_check(law, n, a.samples, a.seed).distance, a.samples, {}});
  } else if (e == "mixture") {
    const MixtureLaw m(a.q);
    p["q"] = a.q;
    p["samples"] = a.samples;
    s.extra_columns = {"closed_form", "base_check_n2"};
    s.rows.push_back({1, sampled_distance_to_benford(m, a.samples, a.seed), a.samples,
                      {mixture_distance_to_benford(a.q), base_invariance_check(m, 2, a.samples, a.seed).distance}});
  } else if (e == "randomized-iteration") {
    const auto f1 = parse_function(a.f1), f2 = parse_function(a.f2);
    const auto n = n_or(a, 100000);
    p["f1"] = describe(f1);
    p["f2"] = describe(f2);
    p["p1"] = a.p1;
    p["n"] = n;
    Mod1Sequence path;
    if (a.start_opt->count()) {
      const auto start = parse_random_variable(a.start);
      p["start"] = describe(start);
      path = randomized_iteration(f1, f2, a.p1, start, n, a.seed);
    } else {
      p["x0"] = a.x0;
      path = randomized_iteration(f1, f2, a.p1, a.x0, n, a.seed);
    }
    for (const auto k : checkpoints(n)) {
      std::vector<double> prefix(path.begin(), path.begin() + k);
      s.rows.push_back({k, star_discrepancy_of(std::move(prefix)).star_discrepancy, k, {}});
    }
  } else if (e == "poly-random-start") {
    const auto coeffs = benford::detail::parse_rational_list(a.poly);
    const auto start = parse_random_variable(a.start_opt->count() ? a.start : std::string("uniform(0,1)"));
    const auto n = n_or(a, 10000);
    p["f"] = benford::detail::list_to_string(coeffs);
    p["start"] = describe(start);
    p["n"] = n;
    p["trials"] = a.trials;
    p["threshold"] = a.threshold;
    const auto r = polynomial_iterate_random_start(coeffs, start, n, a.trials, a.seed, a.threshold);
    s.extra_columns = {"below_threshold"};
    for (std::size_t i = 0; i < r.discrepancies.size(); ++i) {
      s.rows.push_back({static_cast<std::int64_t>(i + 1), r.discrepancies[i], n,
                        {r.discrepancies[i] < a.threshold ? 1.0 : 0.0}});
    }
    s.summary["fraction_below_threshold"] = round12(r.fraction_below);
  } else if (e == "combined") {
    const RandomMeasureSpec m = a.measure.empty() ? default_measure() : parse_measure(a.measure);
    p["measure"] = describe_measure(m);
    p["per_measure"] = a.per_measure;
    p["measures"] = a.measures;
    const auto batch = combined_sample(m, a.per_measure, a.measures, a.seed);
    const auto e2 = empirical_from(batch.values);
    s.extra_columns = {"digit1_share"};
    s.rows.push_back({1, ks_to_benford(e2), e2.n_used,
                      {static_cast<double>(e2.first_digit_counts[0]) / static_cast<double>(e2.n_used)}});
  } else if (e == "walk") {
    const auto law = law_or(a, "uniform(0,1)");
    const std::vector<std::int64_t> steps = a.steps.empty() ? std::vector<std::int64_t>{10, 100, 1000} : a.steps;
    p["law"] = describe(law);
    p["paths"] = a.paths;
    for (int d = 1; d <= 9; ++d) s.extra_columns.push_back("freq_" + std::to_string(d));
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto t = random_walk_paths(law, steps[i], a.paths, Stream(a.seed).child(i).key());
      Row r{steps[i], 0.0, a.paths, {}};
      for (int d = 1; d <= 9; ++d) {
        r.extra.push_back(t.frequency(d));
        r.distance = std::max(r.distance, std::fabs(t.frequency(d) - first_digit_pmf(d)));
      }
      s.rows.push_back(std::move(r));
    }
  } else {
    throw DomainError("unknown experiment '" + e + "'");
  }
  return s;
}

// ---------------------------------------------------------------------------
// demo: four common misconceptions, each with a computed counterexample

struct DemoSection {
  std::string title;
  std::string claim;
  std::vector<std::pair<std::string, std::string>> facts;
  std::string refutation;
};

inline std::vector<DemoSection> demo_sections(std::uint64_t seed) {
  std::vector<DemoSection> out;
  {
    DemoSection d{"spread", "to be close to Benford, data must span several orders of magnitude", {}, ""};
    const auto batch = sample(RandomVariableSpec::benford(), 100000, seed);
    const auto e = empirical_from(batch.values);
    d.facts.push_back({"law", "X = 10^U, U uniform on (0,1)"});
    d.facts.push_back({"support", "[1, 10), a single order of magnitude"});
    d.facts.push_back({"sample min", num(e.significands.front(), 6)});
    d.facts.push_back({"sample max", num(e.significands.back(), 6)});
    d.facts.push_back({"KS to Benford, 10^5 draws", num(ks_to_benford(e), 4)});
    d.refutation = "X is exactly Benford yet never leaves one decade";
    out.push_back(std::move(d));
  }
  {
    DemoSection d{"growth", "exponentially growing sequences and sums are Benford", {}, ""};
    const auto half = parse_sequence_spec("power:10^(1/2)");
    const auto support = first_digit_support(half, 10000);
    std::string digits;
    for (int v : support) digits += (digits.empty() ? "" : ",") + std::to_string(v);
    d.facts.push_back({"10^(n/2): verdict", std::string(to_string(classify(half).verdict)) + " (" + classify(half).note + ")"});
    d.facts.push_back({"10^(n/2): first digits seen in 10^4 terms", "{" + digits + "}"});
    const double d2 = star_discrepancy(generate(parse_sequence_spec("power:2"), 10000)).star_discrepancy;
    d.facts.push_back({"2^n: star discrepancy, 10^4 terms", num(d2, 4)});
    const auto walk = random_walk_paths(RandomVariableSpec::uniform(0, 1), 1000, 10000, seed);
    d.facts.push_back({"sum of 1000 uniform(0,1) steps: share of D1 = 1", num(walk.frequency(1), 4)});
    d.facts.push_back({"benford share of D1 = 1", num(first_digit_pmf(1), 6)});
    d.refutation = "a rational power of 10 as multiplier is never Benford, and sums concentrate near n/2";
    out.push_back(std::move(d));
  }
  {
    DemoSection d{"regularity", "a smooth law with large spread is close to Benford", {}, ""};
    d.facts.push_back({"N(7,1): P(D1 = 1)", num(normal_digit_prob(7, 1, 1), 6)});
    d.facts.push_back({"N(700,100): P(D1 = 1)", num(normal_digit_prob(700, 100, 1), 6)});
    d.facts.push_back({"U(0,1): distance to Benford", num(uniform_benford_distance({0, 1}), 6)});
    double nonneg = 1.0, mixed = 1.0;
    for (int i = 0; i < 200; ++i) {
      for (int j = 0; j < 200; ++j) {
        const double a = 10.0 * i / 200.0;
        nonneg = std::min(nonneg, uniform_benford_distance({a, a + std::pow(10.0, 3.0 * j / 200.0 - 1.0)}));
        mixed = std::min(mixed, uniform_benford_distance({-std::pow(10.0, 2.0 * i / 200.0 - 1.0),
                                                          std::pow(10.0, 2.0 * j / 200.0 - 1.0)}));
      }
    }
    d.facts.push_back({"min distance over nonnegative uniform laws (200x200 grid)", num(nonneg, 4)});
    d.facts.push_back({"min distance over sign-mixed uniform laws (200x200 grid)", num(mixed, 4)});
    d.refutation = "no uniform law gets within 0.134 (0.0758 with mixed signs), and the normal law misses log 2 badly";
    out.push_back(std::move(d));
  }
  {
    DemoSection d{"explanation", "simple intuitive arguments settle whether a sequence is Benford", {}, ""};
    const auto spec = parse_sequence_spec("poly-iter:f=[1,0,1],x0=1");
    mpz_class x = 1;
    std::string terms;
    for (int k = 0; k < 5; ++k) {
      x = x * x + 1;
      terms += x.get_str() + ", ";
    }
    const auto c = classify(spec);
    d.facts.push_back({"x -> x^2 + 1 from 1", terms + "..."});
    d.facts.push_back({"verdict", std::string(to_string(c.verdict)) + " (" + c.note + ")"});
    d.refutation = "whether this orbit is Benford is an open problem; no empirical verdict is given";
    out.push_back(std::move(d));
  }
  return out;
}

inline int run_demo(const DemoArgs& a, std::ostream& out) {
  const auto sections = demo_sections(a.seed);
  if (output_of(a.output) == Output::Json) {
    ojson j;
    j["seed"] = a.seed;
    auto& arr = j["errors"] = ojson::array();
    for (const auto& s : sections) {
      ojson o;
      o["title"] = s.title;
      o["claim"] = s.claim;
      auto& f = o["facts"] = ojson::object();
      for (const auto& [k, v] : s.facts) f[k] = v;
      o["refutation"] = s.refutation;
      arr.push_back(std::move(o));
    }
    out << j.dump(2) << "\n";
    return 0;
  }
  out << "seed " << a.seed << "\n";
  int i = 1;
  for (const auto& s : sections) {
    out << "\nError " << i++ << " (" << s.title << "): \"" << s.claim << "\"\n";
    for (const auto& [k, v] : s.facts) out << "  " << k << ": " << v << "\n";
    out << "  refutation: " << s.refutation << "\n";
  }
  return 0;
}

}  // namespace detail

/// Parses argv, runs the subcommand, writes results to `out` and diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"Benford's law toolkit: digit laws, sequences, simulation and dataset conformance", "benford"};
  app.require_subcommand(1);
  const auto outputs = [](std::initializer_list<std::string> v) { return CLI::IsMember(std::vector<std::string>(v)); };

  AnalyzeArgs an;
  auto* c_an = app.add_subcommand("analyze", "first-digit conformance report for a numeric column");
  c_an->add_option("input", an.input, "CSV or JSON-lines file, '-' for stdin")->required();
  c_an->add_option("--column,-c", an.column, "CSV header name or 1-based index; JSON-lines key");
  c_an->add_option("--format", an.format, "input format (default from the file extension)")->check(outputs({"csv", "jsonl"}));
  c_an->add_flag("--no-header", an.no_header, "CSV input has no header row");
  c_an->add_flag("--lenient", an.lenient, "skip non-numeric cells instead of failing above 10%");
  c_an->add_flag("--pairs", an.pairs, "include the first-two-digit table");
  c_an->add_option("--output,-o", an.output, "text or json")->check(outputs({"text", "json"}));

  LawArgs lw;
  auto* c_lw = app.add_subcommand("law", "Benford digit probabilities");
  lw.tuple_opt = c_lw->add_option("--tuple", lw.tuple, "leading digits, e.g. 3,1,4");
  lw.digit_opt = c_lw->add_option("--digit", lw.digit, "first digit 1..9");
  lw.cdf_opt = c_lw->add_option("--cdf", lw.cdf, "P(S <= t) for t in [1, 10)");
  lw.normal_opt = c_lw->add_option("--normal", lw.normal, "first-digit law of N(mean,sd), e.g. 7,1");
  lw.uniform_opt = c_lw->add_option("--uniform", lw.uniform, "distance to Benford of U(a,b), e.g. 0,1");
  c_lw->add_option("--output,-o", lw.output, "text or json")->check(outputs({"text", "json"}));

  GenerateArgs gn;
  auto* c_gn = app.add_subcommand("generate", "fractional parts of log10 and significands of a sequence");
  c_gn->add_option("--spec", gn.spec, "sequence, e.g. power:2, fib, poly-iter:f=[1,0,1],x0=1")->required();
  c_gn->add_option("--n", gn.n, "number of terms")->capture_default_str();
  c_gn->add_option("--output,-o", gn.output, "text, csv or json")->check(outputs({"text", "csv", "json"}));

  ClassifyArgs cl;
  auto* c_cl = app.add_subcommand("classify", "decide whether a sequence is Benford");
  c_cl->add_option("--spec", cl.spec, "sequence, e.g. power:10^(1/2)")->required();
  c_cl->add_option("--output,-o", cl.output, "text or json")->check(outputs({"text", "json"}));

  SimulateArgs sm;
  auto* c_sm = app.add_subcommand("simulate", "Monte Carlo experiment emitting a distance series");
  c_sm->add_option("experiment", sm.experiment, "experiment name")->required()->check(CLI::IsMember(experiment_names()));
  sm.law_opt = c_sm->add_option("--law", sm.law, "random variable, e.g. uniform(0,1), normal(7,1), benford");
  sm.n_opt = c_sm->add_option("--n", sm.n, "steps, powers or path length");
  c_sm->add_option("--samples", sm.samples, "Monte Carlo sample count")->capture_default_str();
  c_sm->add_option("--seed", sm.seed, "64-bit seed")->capture_default_str();
  c_sm->add_option("--factor", sm.factor, "scale-check factor")->capture_default_str();
  sm.q_opt = c_sm->add_option("--q", sm.q, "mixture atom weight")->capture_default_str();
  c_sm->add_option("--f1", sm.f1, "first map: mul:c, pow:k or affine:a,b")->capture_default_str();
  c_sm->add_option("--f2", sm.f2, "second map")->capture_default_str();
  c_sm->add_option("--p1", sm.p1, "probability of the first map")->capture_default_str();
  sm.x0_opt = c_sm->add_option("--x0", sm.x0, "fixed positive start")->capture_default_str();
  sm.start_opt = c_sm->add_option("--start", sm.start, "random start law");
  c_sm->add_option("--poly", sm.poly, "polynomial coefficients, low to high")->capture_default_str();
  c_sm->add_option("--trials", sm.trials, "random starts")->capture_default_str();
  c_sm->add_option("--threshold", sm.threshold, "per-trial discrepancy threshold")->capture_default_str();
  c_sm->add_option("--measure", sm.measure, "random measure, e.g. 0.5:uniform(2,3);0.5:uniform(4,5)");
  c_sm->add_option("--per-measure", sm.per_measure, "values per drawn measure")->capture_default_str();
  c_sm->add_option("--measures", sm.measures, "number of drawn measures")->capture_default_str();
  c_sm->add_option("--paths", sm.paths, "random-walk paths")->capture_default_str();
  c_sm->add_option("--steps", sm.steps, "random-walk step counts")->delimiter(',');
  c_sm->add_option("--output,-o", sm.output, "csv, json or text")->check(outputs({"text", "csv", "json"}));

  DemoArgs dm;
  auto* c_dm = app.add_subcommand("demo", "computed counterexamples to four common misconceptions");
  c_dm->add_option("--seed", dm.seed, "64-bit seed")->capture_default_str();
  c_dm->add_option("--output,-o", dm.output, "text or json")->check(outputs({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c_an->parsed()) return run_analyze(an, out);
    if (c_lw->parsed()) return run_law(lw, out);
    if (c_gn->parsed()) return run_generate(gn, out);
    if (c_cl->parsed()) return run_classify(cl, out);
    if (c_sm->parsed()) {
      emit(simulate(sm), output_of(sm.output), out);
      return 0;
    }
    if (c_dm->parsed()) return run_demo(dm, out);
  } catch (const ResourceError& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv = {"benford"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace benford::cli

#pragma once

// Problem files and report documents (JSON).
//
// A problem file:
//
//   {
//     "prime": 5, "precision": 128, "truncation": 64, "max_iterations": 200,
//     "polynomials": [["0", "5", "1"], ["0", "5", "1"]],
//     "fixed_points": ["0", "0"],                       (optional)
//     "start": ["25", "125"],
//     "variety": [[{"exponents": [1, 0], "coefficient": "1"},
//                  {"exponents": [0, 0], "coefficient": "-3/7"}]]
//   }
//
// Rationals are strings "a" or "a/b" (JSON integers are accepted too).
// Polynomial coefficients are listed in ascending degree.

#include <padyn/dml.hpp>
#include <padyn/dynamics.hpp>
#include <padyn/linearization.hpp>
#include <padyn/padic.hpp>
#include <padyn/polynomial.hpp>
#include <padyn/series.hpp>

#include <gmpxx.h>
#include <json.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace padyn::io {

using nlohmann::json;

inline constexpr int kReportSchemaVersion = 1;
inline constexpr long kReportedDigits = 8;

/// Malformed input file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Term {
  std::vector<unsigned> exponents;
  mpq_class coefficient;
};

struct ProblemFile {
  long prime = 0;
  long precision = 128;
  long truncation = 64;
  long max_iterations = 200;
  std::vector<std::vector<mpq_class>> polynomials;
  std::optional<std::vector<mpq_class>> fixed_points;
  std::vector<mpq_class> start;
  std::vector<std::vector<Term>> variety;
};

namespace detail {

inline std::string at(const std::string& path) { return "field '" + path + "': "; }

inline mpq_class parse_rational(const json& j, const std::string& path) {
  std::string text;
  if (j.is_number_integer()) {
    text = j.dump();
  } else if (j.is_string()) {
    text = j.get<std::string>();
  } else {
    throw InputError(at(path) + "expected a rational string \"a/b\"");
  }
  const auto slash = text.find('/');
  auto is_int = [](const std::string& s) {
    std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i == s.size()) return false;
    return std::all_of(s.begin() + static_cast<long>(i), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  const std::string num = text.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  if (!is_int(num) || !is_int(den) || den[0] == '-' || den[0] == '+') {
    throw InputError(at(path) + "'" + text + "' is not a rational of the form a or a/b");
  }
  mpz_class n(num[0] == '+' ? num.substr(1) : num, 10), d(den, 10);
  if (d == 0) throw InputError(at(path) + "zero denominator in '" + text + "'");
  mpq_class q(n, d);
  q.canonicalize();
  return q;
}

inline long parse_long(const json& obj, const char* key, long fallback, long min, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  const json& j = obj.at(key);
  const std::string where = path.empty() ? key : path + "." + key;
  if (!j.is_number_integer()) throw InputError(at(where) + "expected an integer");
  const long v = j.get<long>();
  if (v < min) throw InputError(at(where) + "must be >= " + std::to_string(min));
  return v;
}

inline std::vector<mpq_class> parse_rational_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(at(path) + "expected a list");
  std::vector<mpq_class> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_rational(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// line:column of a byte offset, for parser diagnostics
inline std::string locate(const std::string& text, std::size_t byte) {
  long line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline ProblemFile parse_problem(const std::string& text, const std::string& source = "<input>") {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": syntax error at " + detail::locate(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                     e.what());
  }
  try {
    if (!doc.is_object()) throw InputError("the document must be a JSON object");
    static const std::set<std::string> known{"prime",       "precision", "truncation", "max_iterations", "polynomials",
                                             "fixed_points", "start",    "variety",    "name",           "description"};
    for (const auto& [k, v] : doc.items()) {
      if (!known.count(k)) throw InputError(detail::at(k) + "unknown field");
    }
    for (const char* req : {"prime", "polynomials", "start", "variety"}) {
      if (!doc.contains(req)) throw InputError(detail::at(req) + "required field is missing");
    }
    ProblemFile pf;
    pf.prime = detail::parse_long(doc, "prime", 0, 2, "");
    if (!is_prime(pf.prime)) throw InputError(detail::at("prime") + std::to_string(pf.prime) + " is not prime");
    pf.precision = detail::parse_long(doc, "precision", pf.precision, 1, "");
    pf.truncation = detail::parse_long(doc, "truncation", pf.truncation, 1, "");
    pf.max_iterations = detail::parse_long(doc, "max_iterations", pf.max_iterations, 0, "");

    const json& polys = doc.at("polynomials");
    if (!polys.is_array() || polys.empty()) throw InputError(detail::at("polynomials") + "expected a non-empty list");
    for (std::size_t i = 0; i < polys.size(); ++i) {
      const std::string path = "polynomials[" + std::to_string(i) + "]";
      pf.polynomials.push_back(detail::parse_rational_list(polys[i], path));
      if (pf.polynomials.back().empty()) throw InputError(detail::at(path) + "a polynomial needs at least one coefficient");
    }
    const std::size_t g = pf.polynomials.size();
    auto check_len = [g](std::size_t n, const std::string& path) {
      if (n != g) {
        throw InputError(detail::at(path) + "has " + std::to_string(n) + " entries but there are " + std::to_string(g) +
                         " polynomials");
      }
    };
    pf.start = detail::parse_rational_list(doc.at("start"), "start");
    check_len(pf.start.size(), "start");
    if (doc.contains("fixed_points")) {
      pf.fixed_points = detail::parse_rational_list(doc.at("fixed_points"), "fixed_points");
      check_len(pf.fixed_points->size(), "fixed_points");
    }
    const json& var = doc.at("variety");
    if (!var.is_array()) throw InputError(detail::at("variety") + "expected a list of generators");
    for (std::size_t j = 0; j < var.size(); ++j) {
      const std::string gpath = "variety[" + std::to_string(j) + "]";
      if (!var[j].is_array()) throw InputError(detail::at(gpath) + "expected a list of terms");
      std::vector<Term> terms;
      for (std::size_t t = 0; t < var[j].size(); ++t) {
        const std::string tpath = gpath + "[" + std::to_string(t) + "]";
        const json& term = var[j][t];
        if (!term.is_object() || !term.contains("exponents") || !term.contains("coefficient")) {
          throw InputError(detail::at(tpath) + "expected {\"exponents\": [...], \"coefficient\": \"a/b\"}");
        }
        for (const auto& [k, v] : term.items()) {
          if (k != "exponents" && k != "coefficient") throw InputError(detail::at(tpath + "." + k) + "unknown field");
        }
        const json& ex = term.at("exponents");
        if (!ex.is_array()) throw InputError(detail::at(tpath + ".exponents") + "expected a list of integers");
        check_len(ex.size(), tpath + ".exponents");
        Term out;
        for (std::size_t i = 0; i < ex.size(); ++i) {
          const std::string epath = tpath + ".exponents[" + std::to_string(i) + "]";
          if (!ex[i].is_number_integer() || ex[i].get<long>() < 0) {
            throw InputError(detail::at(epath) + "expected a non-negative integer");
          }
          out.exponents.push_back(ex[i].get<unsigned>());
        }
        out.coefficient = detail::parse_rational(term.at("coefficient"), tpath + ".coefficient");
        terms.push_back(std::move(out));
      }
      pf.variety.push_back(std::move(terms));
    }
    return pf;
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  } catch (const json::exception& e) {
    throw InputError(source + ": " + e.what());
  }
}

inline PadicNumber to_padic(const PadicContext& ctx, const mpq_class& q) {
  return PadicNumber::from_rational(ctx, q.get_num(), q.get_den());
}

inline Polynomial to_polynomial(const PadicContext& ctx, const std::vector<mpq_class>& coeffs) {
  std::vector<PadicNumber> c;
  for (const auto& q : coeffs) c.push_back(to_padic(ctx, q));
  return Polynomial(ctx, std::move(c));
}

/// The system described by a file; absent fixed points are discovered.
inline SystemSpec to_system(const ProblemFile& pf) {
  const PadicContext ctx(pf.prime, pf.precision);
  SystemSpec spec{ctx, {}, {}, {}, {}, pf.truncation, pf.max_iterations};
  const std::size_t g = pf.polynomials.size();
  for (std::size_t i = 0; i < g; ++i) {
    spec.maps.push_back(to_polynomial(ctx, pf.polynomials[i]));
    spec.start.push_back(to_padic(ctx, pf.start[i]));
  }
  for (std::size_t i = 0; i < g; ++i) {
    spec.fixed_points.push_back(pf.fixed_points ? to_padic(ctx, (*pf.fixed_points)[i])
                                                : discover_fixed_point(spec.maps[i], spec.start[i]));
  }
  for (const auto& gen : pf.variety) {
    MultivariatePoly f(ctx, g);
    for (const auto& t : gen) f.add_term(t.exponents, to_padic(ctx, t.coefficient));
    spec.variety.push_back(std::move(f));
  }
  return spec;
}

// ---- output -----------------------------------------------------------------

inline std::string rational_string(const mpq_class& q) {
  return q.get_den() == 1 ? q.get_num().get_str() : q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// {valuation, digits (least significant first), precision}; zeros carry only
/// their absolute precision.
inline json padic_json(const PadicNumber& x) {
  json j;
  if (x.is_zero()) {
    j["zero"] = true;
    if (x.is_exact_zero()) {
      j["exact"] = true;
    } else {
      j["absolute_precision"] = x.absolute_precision();
    }
    return j;
  }
  j["valuation"] = x.valuation();
  j["precision"] = x.relative_precision();
  j["digits"] = x.unit_digits(std::min(x.relative_precision(), kReportedDigits));
  return j;
}

inline json newton_json(const std::vector<NewtonSegment>& segs) {
  json out = json::array();
  for (const auto& s : segs) {
    out.push_back({{"slope", rational_string(s.slope)}, {"length", s.length}, {"start", s.start}});
  }
  return out;
}

inline json tail_json(const TailBound& t) {
  if (t.vanishing) return {{"vanishing", true}};
  return {{"vanishing", false}, {"slope", rational_string(t.slope)}, {"intercept", rational_string(t.intercept)}};
}

inline json report_json(const ProblemFile& pf, const SystemSpec& spec, const AnalysisReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["parameters"] = {{"prime", pf.prime},
                     {"precision", pf.precision},
                     {"truncation", pf.truncation},
                     {"max_iterations", pf.max_iterations},
                     {"dimension", spec.dimension()},
                     {"generators", spec.variety.size()}};
  json fps = json::array();
  for (const auto& a : spec.fixed_points) fps.push_back(padic_json(a));
  j["fixed_points"] = fps;
  j["multiplier"] = r.multiplier ? padic_json(*r.multiplier) : json(nullptr);
  j["isometry_radii"] = r.isometry_radii;
  j["n0"] = r.n0;
  j["degenerate"] = r.degenerate;
  j["reindexing"] = r.reindexing;
  json lams = json::array();
  for (const auto& l : r.lambdas) lams.push_back(padic_json(l));
  j["lambdas"] = lams;
  j["orbit_ball_valuation"] = r.orbit_ball_valuation;
  j["direct_hits"] = r.direct_hits;
  json gens = json::array();
  for (const auto& v : r.generators) {
    json g{{"verdict", to_string(v.kind)}, {"newton_polygon", newton_json(v.newton)}};
    if (v.kind == GeneratorVerdictKind::finite) {
      g["zero_count"] = v.zero_count;
      g["certified"] = v.certified;
    }
    if (!v.reason.empty()) g["reason"] = v.reason;
    gens.push_back(g);
  }
  j["generators"] = gens;
  json overall{{"verdict", to_string(r.overall)}};
  if (r.overall == OverallVerdict::finite) {
    overall["indices"] = r.direct_hits;
    overall["bound"] = *r.bound;
    overall["zero_count_bound"] = *r.zero_count_bound;
    overall["complete"] = r.complete;
  }
  j["overall"] = overall;
  j["note"] = r.note;
  return j;
}

inline int exit_code(OverallVerdict v) {
  switch (v) {
    case OverallVerdict::finite: return 0;
    case OverallVerdict::invariant_candidate: return 1;
    case OverallVerdict::inconclusive: return 2;
  }
  return 2;
}

inline json linearization_json(const Linearization& lin, std::size_t index) {
  json coeffs = json::array();
  for (long n = 1; n <= lin.exp_series.order(); ++n) {
    coeffs.push_back({{"n", n}, {"value", padic_json(lin.exp_series[n])}});
  }
  const bool ok = residual_is_zero(verify_functional_equation(lin));
  return {{"map_index", index},
          {"fixed_point", padic_json(lin.fixed_point)},
          {"multiplier", padic_json(lin.multiplier)},
          {"truncation", lin.exp_series.order()},
          {"exp_coefficients", coeffs},
          {"exp_tail", tail_json(lin.exp_series.tail())},
          {"log_tail", tail_json(lin.log_series.tail())},
          {"functional_equation_residual", ok ? "zero_to_precision" : "nonzero"},
          {"convergence_radius_valuation", lin.convergence_radius_valuation},
          {"isometry_radius_valuation", lin.isometry_radius_valuation}};
}

inline json fixed_points_json(const Polynomial& p, std::size_t index) {
  const FixedPointSearch found = find_fixed_points(p);
  json pts = json::array();
  for (const auto& fp : found.points) {
    json e{{"point", padic_json(fp.point)},
           {"multiplier", padic_json(fp.multiplier)},
           {"classification", to_string(fp.classification)}};
    if (fp.attracting_radius_valuation) e["attracting_radius_valuation"] = *fp.attracting_radius_valuation;
    pts.push_back(e);
  }
  return {{"map_index", index}, {"fixed_points", pts}, {"unresolved_residues", found.unresolved_residues}};
}

/// P^n(x) for n <= steps, with v(P_i^n(x_i) - alpha_i).
inline json orbit_json(const std::vector<Polynomial>& maps, const std::vector<PadicNumber>& start,
                       const std::vector<std::optional<PadicNumber>>& fixed_points, long steps) {
  json rows = json::array();
  std::vector<PadicNumber> pt = start;
  for (long n = 0; n <= steps; ++n) {
    json coords = json::array(), dist = json::array();
    for (std::size_t i = 0; i < pt.size(); ++i) {
      coords.push_back(padic_json(pt[i]));
      if (!fixed_points[i]) {
        dist.push_back(nullptr);
        continue;
      }
      const PadicNumber d = pt[i] - *fixed_points[i];
      dist.push_back(d.is_zero() ? json("zero") : json(d.valuation()));
    }
    rows.push_back({{"n", n}, {"point", coords}, {"distance_valuations", dist}});
    if (n < steps) {
      for (std::size_t i = 0; i < pt.size(); ++i) pt[i] = maps[i](pt[i]);
    }
  }
  json fps = json::array();
  for (const auto& a : fixed_points) fps.push_back(a ? padic_json(*a) : json(nullptr));
  return {{"fixed_points", fps}, {"orbit", rows}};
}

}  // namespace padyn::io

#pragma once

// Orbit of a split polynomial map (P_1, ..., P_g) against a variety V.
//
// When the P_i share an attracting multiplier a_1, the logs of the orbit
// coordinates are proportional: log_i(P_i^n(x_i)) = lambda_i log_1(P_1^n(x_1)).
// Substituting the exp/log parametrization into each generator f of V gives a
// one-variable analytic function F with F(P_1^n(x_1) - alpha_1) = f(P^n(x)),
// so the hits n >= n0 are zeros of F inside a ball, and a nonzero F has
// finitely many there.

#include <padyn/dynamics.hpp>
#include <padyn/linearization.hpp>
#include <padyn/padic.hpp>
#include <padyn/polynomial.hpp>
#include <padyn/series.hpp>

#include <algorithm>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace padyn {

/// A hypothesis of the analysis does not hold for the given system.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SystemSpec {
  PadicContext ctx;
  std::vector<Polynomial> maps;
  std::vector<PadicNumber> fixed_points;
  std::vector<PadicNumber> start;
  std::vector<MultivariatePoly> variety;
  long truncation = 64;
  long max_direct_iterations = 200;

  std::size_t dimension() const { return maps.size(); }
};

struct ValidatedSystem {
  SystemSpec spec;
  std::vector<Linearization> lins;
  PadicNumber multiplier;
  long n0 = 0;
  /// P_i^{n0}(x_i)
  std::vector<PadicNumber> advanced;
  /// Every coordinate sits on its fixed point from n0 on.
  bool degenerate = false;
};

struct Lambdas {
  /// New coordinate j is input coordinate perm[j].
  std::vector<std::size_t> perm;
  /// lambda_j in the new order; lambdas[0] = 1.
  std::vector<PadicNumber> lambdas;
};

enum class GeneratorVerdictKind { finite, identically_zero_to_precision, inconclusive };
enum class OverallVerdict { finite, invariant_candidate, inconclusive };

inline const char* to_string(GeneratorVerdictKind k) {
  switch (k) {
    case GeneratorVerdictKind::finite: return "Finite";
    case GeneratorVerdictKind::identically_zero_to_precision: return "IdenticallyZeroToPrecision";
    case GeneratorVerdictKind::inconclusive: return "Inconclusive";
  }
  return "?";
}

inline const char* to_string(OverallVerdict k) {
  switch (k) {
    case OverallVerdict::finite: return "Finite";
    case OverallVerdict::invariant_candidate: return "InvariantCandidate";
    case OverallVerdict::inconclusive: return "Inconclusive";
  }
  return "?";
}

struct GeneratorVerdict {
  GeneratorVerdictKind kind = GeneratorVerdictKind::inconclusive;
  long zero_count = 0;
  bool certified = false;
  std::string reason;
  std::vector<NewtonSegment> newton;
};

struct AnalysisReport {
  long n0 = 0;
  bool degenerate = false;
  std::optional<PadicNumber> multiplier;
  std::vector<long> isometry_radii;
  std::vector<std::size_t> reindexing;
  std::vector<PadicNumber> lambdas;
  /// Radius (as a valuation) of the ball in w = u - alpha_1 holding the orbit from n0 on.
  long orbit_ball_valuation = 0;
  std::vector<long> direct_hits;
  std::vector<GeneratorVerdict> generators;
  OverallVerdict overall = OverallVerdict::inconclusive;
  /// Zeros of F in the orbit ball, bounding the hits with n >= n0 (Finite only).
  std::optional<long> zero_count_bound;
  /// zero_count_bound plus the hits below n0.
  std::optional<long> bound;
  /// The hits found up to N_max already reach the bound.
  bool complete = false;
  std::string note;
};

namespace detail {

inline bool in_ball(const PadicNumber& z, const Ball& b) {
  try {
    return b.contains(z);
  } catch (const PrecisionError&) {
    return false;
  }
}

/// Zero and certified: absolute precision at least half the working precision.
inline bool certified_zero(const PadicNumber& x, long n, const char* what) {
  if (!x.is_zero()) return false;
  const long floor = (x.context().working_precision() + 1) / 2;
  if (x.absolute_precision() < floor) {
    throw PrecisionError(std::string(what) + ": value at n = " + std::to_string(n) +
                         " is zero only to absolute precision " + std::to_string(x.absolute_precision()) +
                         " (< " + std::to_string(floor) + ")");
  }
  return true;
}

inline std::vector<PadicNumber> orbit_point(const SystemSpec& spec, long n) {
  std::vector<PadicNumber> pt;
  for (std::size_t i = 0; i < spec.dimension(); ++i) pt.push_back(iterate(spec.maps[i], spec.start[i], n));
  return pt;
}

}  // namespace detail

/// Attracting fixed point of P nearest to x (the one x is most likely to be attracted to).
inline PadicNumber discover_fixed_point(const Polynomial& p, const PadicNumber& x) {
  std::optional<PadicNumber> best;
  long best_distance = 0;
  for (const auto& fp : find_fixed_points(p).points) {
    if (fp.classification != FixedPointKind::attracting) continue;
    const PadicNumber d = x - fp.point;
    const long dv = d.is_zero() ? d.absolute_precision() : d.valuation();
    if (!best || dv > best_distance) {
      best = fp.point;
      best_distance = dv;
    }
  }
  if (!best) throw ValidationError("hypothesis violated: P has no attracting fixed point in Z_p to linearize at");
  return *best;
}

inline ValidatedSystem validate(const SystemSpec& spec) {
  const std::size_t g = spec.dimension();
  if (g < 2) throw ValidationError("the system needs at least two coordinates (g >= 2)");
  if (spec.fixed_points.size() != g || spec.start.size() != g) {
    throw ValidationError("maps, fixed_points and start must all have g = " + std::to_string(g) + " entries");
  }
  for (const auto& f : spec.variety) {
    if (f.variables() != g) throw ValidationError("a variety generator has the wrong number of variables");
  }
  if (spec.max_direct_iterations < 0) throw ValidationError("max_direct_iterations must be >= 0");

  ValidatedSystem out{spec, {}, PadicNumber::zero(spec.ctx), 0, {}, false};
  std::vector<PadicNumber> multipliers;
  for (std::size_t i = 0; i < g; ++i) {
    const auto& p = spec.maps[i];
    const auto& alpha = spec.fixed_points[i];
    const std::string who = "coordinate " + std::to_string(i);
    const PadicNumber residual = p(alpha) - alpha;
    if (!residual.is_zero() && residual.valuation() < spec.ctx.working_precision() - kFixedPointSlack) {
      throw ValidationError("hypothesis violated (" + who + "): alpha is not a fixed point of P, v(P(alpha) - alpha) = " +
                            std::to_string(residual.valuation()));
    }
    const PadicNumber a1 = p.derivative()(alpha);
    const FixedPointKind kind = classify_multiplier(a1);
    if (kind != FixedPointKind::attracting) {
      throw ValidationError("hypothesis violated (" + who + "): the fixed point must be attracting but not superattracting, it is " +
                            to_string(kind));
    }
    if (i > 0 && !(a1 - multipliers[0]).is_zero()) {
      throw ValidationError("common-multiplier hypothesis violated: P_0'(alpha_0) = " + multipliers[0].to_string() +
                            " but P_" + std::to_string(i) + "'(alpha_" + std::to_string(i) + ") = " + a1.to_string());
    }
    try {
      check_headroom(spec.ctx, spec.truncation, a1.valuation());
    } catch (const DomainError& e) {
      throw ValidationError(who + ": " + e.what());
    }
    multipliers.push_back(a1);
  }
  for (std::size_t i = 0; i < g; ++i) {
    try {
      out.lins.push_back(linearize(spec.maps[i], spec.fixed_points[i], spec.truncation));
    } catch (const std::exception& e) {
      throw ValidationError("coordinate " + std::to_string(i) + ": linearization failed: " + e.what());
    }
  }
  out.multiplier = out.lins[0].multiplier;

  // n0: the first index where every coordinate is inside its isometry ball
  std::vector<PadicNumber> pt = spec.start;
  for (long n = 0;; ++n) {
    bool inside = true;
    for (std::size_t i = 0; i < g && inside; ++i) inside = detail::in_ball(pt[i], isometry_ball(out.lins[i]));
    if (inside) {
      out.n0 = n;
      break;
    }
    if (n == spec.max_direct_iterations) {
      throw ValidationError("hypothesis violated: the start point does not enter the isometry balls within " +
                            std::to_string(spec.max_direct_iterations) + " iterations");
    }
    for (std::size_t i = 0; i < g; ++i) pt[i] = spec.maps[i](pt[i]);
  }
  out.advanced = pt;
  out.degenerate = true;
  for (std::size_t i = 0; i < g; ++i) {
    if (!(pt[i] - spec.fixed_points[i]).is_zero()) out.degenerate = false;
  }
  return out;
}

/// Indices n <= n_max with every generator certified zero at P^n(x), by direct iteration.
inline std::vector<long> direct_orbit_scan(const SystemSpec& spec, long n_max) {
  std::vector<long> hits;
  std::vector<PadicNumber> pt = spec.start;
  for (long n = 0; n <= n_max; ++n) {
    bool hit = true;
    for (const auto& f : spec.variety) {
      if (!detail::certified_zero(f(pt), n, "direct_orbit_scan")) {
        hit = false;
        break;
      }
    }
    if (hit) hits.push_back(n);
    if (n < n_max) {
      for (std::size_t i = 0; i < pt.size(); ++i) pt[i] = spec.maps[i](pt[i]);
    }
  }
  return hits;
}

/// Logs at orbit index n (>= n0), coordinate with the largest log first.
inline Lambdas lambdas_at(const ValidatedSystem& vs, long n) {
  if (n < vs.n0) throw DomainError("lambdas_at: index below n0");
  const std::size_t g = vs.spec.dimension();
  std::vector<PadicNumber> logs;
  for (std::size_t i = 0; i < g; ++i) {
    const PadicNumber z = iterate(vs.spec.maps[i], vs.advanced[i], n - vs.n0);
    logs.push_back(log_of(vs.lins[i], z));
  }
  std::optional<std::size_t> lead;
  for (std::size_t i = 0; i < g; ++i) {
    if (logs[i].is_zero()) continue;
    if (!lead || logs[i].valuation() < logs[*lead].valuation()) lead = i;
  }
  if (!lead) throw DomainError("lambdas_at: every log vanishes (degenerate orbit)");
  Lambdas out;
  out.perm.push_back(*lead);
  for (std::size_t i = 0; i < g; ++i) {
    if (i != *lead) out.perm.push_back(i);
  }
  for (std::size_t j = 0; j < g; ++j) {
    const PadicNumber& l = logs[out.perm[j]];
    out.lambdas.push_back(j == 0 ? PadicNumber::one(vs.spec.ctx)
                                 : (l.is_zero() ? PadicNumber::zero(vs.spec.ctx) : l / logs[*lead]));
  }
  return out;
}

inline Lambdas compute_lambdas(const ValidatedSystem& vs) { return lambdas_at(vs, vs.n0); }

/// w_n = P_1^n(x_1) - alpha_1 in the reindexed first coordinate.
inline PadicNumber orbit_parameter(const ValidatedSystem& vs, const Lambdas& lam, long n) {
  const std::size_t k = lam.perm[0];
  const PadicNumber z = n >= vs.n0 ? iterate(vs.spec.maps[k], vs.advanced[k], n - vs.n0)
                                   : iterate(vs.spec.maps[k], vs.spec.start[k], n);
  return z - vs.spec.fixed_points[k];
}

/// Ball in w holding every orbit parameter from n0 on.
inline Ball orbit_ball(const ValidatedSystem& vs, const Lambdas& lam) {
  const PadicNumber w = orbit_parameter(vs, lam, vs.n0);
  return Ball{PadicNumber::zero(vs.spec.ctx), w.valuation()};
}

/// F(w) = f(alpha_1 + w, alpha_2 + exp_2(lambda_2 log_1(w)), ...) in the reindexed coordinates.
inline TruncatedSeries build_F(const ValidatedSystem& vs, const Lambdas& lam, const MultivariatePoly& f) {
  const PadicContext& ctx = vs.spec.ctx;
  const long order = vs.spec.truncation;
  const std::size_t lead = lam.perm[0];
  const TruncatedSeries& log1 = vs.lins[lead].log_series;
  std::vector<TruncatedSeries> subs;
  for (std::size_t j = 0; j < lam.perm.size(); ++j) {
    const std::size_t i = lam.perm[j];
    const TruncatedSeries alpha = TruncatedSeries::constant(vs.spec.fixed_points[i], order);
    if (j == 0) {
      subs.push_back(alpha + TruncatedSeries::variable(ctx, order));
    } else if (lam.lambdas[j].is_zero()) {
      subs.push_back(alpha);
    } else {
      subs.push_back(alpha + compose(vs.lins[i].exp_series, lam.lambdas[j] * log1));
    }
  }
  return f.permuted(lam.perm).substitute(subs);
}

inline GeneratorVerdict judge(const TruncatedSeries& F, const Ball& ball) {
  GeneratorVerdict v;
  if (F.is_zero_to_precision()) {
    v.kind = GeneratorVerdictKind::identically_zero_to_precision;
    v.reason = "every coefficient through degree " + std::to_string(F.order()) + " vanishes to working precision";
    return v;
  }
  v.newton = newton_polygon(F);
  const ZeroCount zc = count_zeros_in_ball(F, ball);
  if (zc.certified) {
    v.kind = GeneratorVerdictKind::finite;
    v.zero_count = zc.count;
    v.certified = true;
  } else {
    v.kind = GeneratorVerdictKind::inconclusive;
    v.zero_count = zc.count;
    v.reason = zc.diagnostic;
  }
  return v;
}

inline AnalysisReport analyze(const SystemSpec& spec) {
  const ValidatedSystem vs = validate(spec);
  AnalysisReport r;
  r.n0 = vs.n0;
  r.degenerate = vs.degenerate;
  r.multiplier = vs.multiplier;
  for (const auto& lin : vs.lins) r.isometry_radii.push_back(lin.isometry_radius_valuation);
  std::string scan_failure;
  try {
    r.direct_hits = direct_orbit_scan(spec, spec.max_direct_iterations);
  } catch (const PrecisionError& e) {
    scan_failure = e.what();
  }
  const long below = static_cast<long>(
      std::count_if(r.direct_hits.begin(), r.direct_hits.end(), [&](long n) { return n < vs.n0; }));
  const long from_n0 = static_cast<long>(r.direct_hits.size()) - below;

  if (!scan_failure.empty()) {
    r.overall = OverallVerdict::inconclusive;
    r.note = scan_failure;
    return r;
  }

  if (vs.degenerate) {
    // the orbit is the fixed point from n0 on: one membership test
    for (std::size_t i = 0; i < spec.dimension(); ++i) r.reindexing.push_back(i);
    const bool on_v = spec.max_direct_iterations >= vs.n0 &&
                      std::find(r.direct_hits.begin(), r.direct_hits.end(), vs.n0) != r.direct_hits.end();
    if (on_v) {
      r.overall = OverallVerdict::invariant_candidate;
      r.note = "the orbit reaches the fixed point, which lies on V and is invariant";
    } else {
      r.overall = OverallVerdict::finite;
      r.zero_count_bound = 0;
      r.bound = below;
      r.complete = true;
      r.note = "the orbit reaches the fixed point, which is not on V";
    }
    return r;
  }

  const Lambdas lam = compute_lambdas(vs);
  r.reindexing = lam.perm;
  r.lambdas = lam.lambdas;
  const Ball ball = orbit_ball(vs, lam);
  r.orbit_ball_valuation = ball.radius_valuation;

  std::vector<std::future<GeneratorVerdict>> jobs;
  for (const auto& f : spec.variety) {
    jobs.push_back(std::async(std::launch::async, [&vs, &lam, &ball, &f] {
      try {
        return judge(build_F(vs, lam, f), ball);
      } catch (const std::exception& e) {
        GeneratorVerdict v;
        v.reason = e.what();
        return v;
      }
    }));
  }
  for (auto& j : jobs) r.generators.push_back(j.get());

  std::optional<long> best;
  bool all_zero = true;
  for (const auto& v : r.generators) {
    if (v.kind == GeneratorVerdictKind::finite && v.certified) best = best ? std::min(*best, v.zero_count) : v.zero_count;
    if (v.kind != GeneratorVerdictKind::identically_zero_to_precision) all_zero = false;
  }
  if (best) {
    r.overall = OverallVerdict::finite;
    r.zero_count_bound = best;
    r.bound = *best + below;
    r.complete = *best <= from_n0;
    r.note = "the bound counts zeros of F in the whole orbit ball, which need not all be orbit points";
  } else if (all_zero) {
    r.overall = OverallVerdict::invariant_candidate;
    if (r.generators.empty()) r.note = "V has no generators, so it is the whole space";
    else r.note = "F vanishes to working precision through degree " + std::to_string(spec.truncation) +
             "; this suggests, but does not prove, a positive-dimensional invariant subvariety";
  } else {
    r.overall = OverallVerdict::inconclusive;
    std::string why;
    for (std::size_t j = 0; j < r.generators.size(); ++j) {
      if (r.generators[j].kind == GeneratorVerdictKind::inconclusive) {
        why += (why.empty() ? "" : "; ") + std::string("generator ") + std::to_string(j) + ": " + r.generators[j].reason;
      }
    }
    r.note = why;
  }
  return r;
}

}  // namespace padyn

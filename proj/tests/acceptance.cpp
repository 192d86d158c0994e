// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <padyn/io.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracle.hpp"

using namespace padyn;
namespace fs = std::filesystem;

namespace {

// pinned limits
constexpr double kNormIdentitySeconds = 5.0;
constexpr double kFunctionalEquationSeconds = 30.0;
constexpr long kPrecision = 128;
constexpr long kTruncation = 48;
constexpr long kHenselSlack = 8;
constexpr long kOracleScan = 100;
constexpr long kEscalatedScan = 1000;
// F_j(w) passes through the log and exp series and keeps fewer digits than a
// direct orbit value, so its zero floor is N/4 rather than N/2.
constexpr long kSeriesZeroFloor = kPrecision / 4;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

PadicNumber Z(const PadicContext& ctx, const mpz_class& n) { return PadicNumber::from_integer(ctx, n); }

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<fs::path> corpus_files() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(PADYN_CORPUS)) {
    if (e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

io::ProblemFile load(const fs::path& path) { return io::parse_problem(slurp(path), path.string()); }

// 1 -----------------------------------------------------------------------

Outcome norm_identity() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  long total = 0, ok = 0;
  for (long p : {3L, 5L, 7L}) {
    const PadicContext ctx(p, 64);
    for (int i = 0; i < 300; ++i) {
      const long k = 2 + static_cast<long>(rng() % 5);
      const auto beta = Z(ctx, 1 + oracle::random_with_valuation(rng, p, k, 12));
      // every third n is a multiple of a prime power so v_p(n) is exercised
      long n = 1 + static_cast<long>(rng() % 100000);
      if (i % 3 == 0) {
        long pk = p;
        while (pk * p <= 100000 && rng() % 2) pk *= p;
        n = pk * (1 + static_cast<long>(rng() % (100000 / pk)));
      }
      ++total;
      try {
        if (norm_identity_check(beta, n)) ++ok;
      } catch (const std::exception&) {
      }
    }
  }
  const double s = seconds_since(t0);
  return {ok == total && s < kNormIdentitySeconds,
          std::to_string(ok) + "/" + std::to_string(total) + " true, " + fmt_seconds(s)};
}

// 2, 3, 4 share the same random linearizations --------------------------------

struct LinRun {
  PadicContext ctx;
  Polynomial g;
  Linearization lin;
  double seconds;
};

std::vector<LinRun>& linearization_runs() {
  static std::vector<LinRun> runs = [] {
    std::vector<LinRun> out;
    std::mt19937_64 rng(2);
    for (long p : {3L, 5L, 7L}) {
      const PadicContext ctx(p, kPrecision);
      for (int i = 0; i < 20; ++i) {
        const long degree = 2 + static_cast<long>(rng() % 4);
        std::vector<PadicNumber> c{PadicNumber::zero(ctx), Z(ctx, oracle::random_with_valuation(rng, p, 1, 6))};
        for (long d = 2; d <= degree; ++d) {
          mpz_class a = oracle::random_integer(rng, oracle::ipow(p, 4)) - oracle::ipow(p, 4) / 2;
          if (d == degree && a == 0) a = 1;
          c.push_back(Z(ctx, a));
        }
        const Polynomial g(ctx, c);
        const auto t0 = Clock::now();
        auto lin = linearize(g, PadicNumber::zero(ctx), kTruncation);
        out.push_back({ctx, g, std::move(lin), seconds_since(t0)});
      }
    }
    return out;
  }();
  return runs;
}

Outcome functional_equation() {
  const auto t0 = Clock::now();
  auto& runs = linearization_runs();
  long ok = 0;
  for (const auto& r : runs) {
    if (residual_is_zero(verify_functional_equation(r.lin))) ++ok;
  }
  double s = seconds_since(t0);
  for (const auto& r : runs) s += r.seconds;
  const long total = static_cast<long>(runs.size());
  return {ok == total && s < kFunctionalEquationSeconds,
          std::to_string(ok) + "/" + std::to_string(total) + " residuals zero to precision, " + fmt_seconds(s)};
}

Outcome coefficient_bound() {
  long checked = 0, bad = 0;
  for (const auto& r : linearization_runs()) {
    const long slope = r.g.coefficient(1).valuation() + 1;
    for (long n = 1; n <= r.lin.exp_series.order(); ++n) {
      const auto& c = r.lin.exp_series[n];
      if (c.is_zero()) continue;
      ++checked;
      if (c.valuation() < -n * slope) ++bad;
    }
  }
  return {bad == 0 && checked > 0,
          std::to_string(checked) + " coefficients, " + std::to_string(bad) + " below -n(v(a1)+1)"};
}

Outcome inverse_and_isometry() {
  auto& runs = linearization_runs();
  long inverse_ok = 0, samples = 0, preserved = 0;
  std::mt19937_64 rng(4);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    const auto id = compose(r.lin.log_series, r.lin.exp_series);
    bool ok = id[1].equals_to_precision(PadicNumber::one(r.ctx));
    for (long n = 0; n <= id.order(); ++n) {
      if (n != 1 && !id[n].is_zero()) ok = false;
    }
    if (ok) ++inverse_ok;
    // spread 500 samples over the runs
    const long want = static_cast<long>(500 * (i + 1) / runs.size() - 500 * i / runs.size());
    const long m0 = r.lin.isometry_radius_valuation;
    for (long s = 0; s < want; ++s) {
      const long k = m0 + static_cast<long>(rng() % 6);
      const auto z = Z(r.ctx, oracle::random_with_valuation(rng, r.ctx.prime(), k, 20));
      ++samples;
      try {
        const auto l = log_of(r.lin, z);
        const auto e = exp_of(r.lin, z) - r.lin.fixed_point;
        if (!l.is_zero() && !e.is_zero() && l.valuation() == k && e.valuation() == k) ++preserved;
      } catch (const std::exception&) {
      }
    }
  }
  const long total = static_cast<long>(runs.size());
  return {inverse_ok == total && preserved == samples && samples == 500,
          std::to_string(inverse_ok) + "/" + std::to_string(total) + " log(exp) = X, " + std::to_string(preserved) +
              "/" + std::to_string(samples) + " samples keep their valuation"};
}

// 5 -----------------------------------------------------------------------

Outcome conjugation_identity() {
  std::mt19937_64 rng(5);
  long pairs = 0, ok = 0, min_precision = kPrecision;
  for (int i = 0; i < 50; ++i) {
    const long p = std::array<long, 3>{3, 5, 7}[static_cast<std::size_t>(i % 3)];
    const PadicContext ctx(p, kPrecision);
    const auto alpha = Z(ctx, oracle::random_integer(rng, oracle::ipow(p, 3)));
    std::vector<PadicNumber> c{PadicNumber::zero(ctx), Z(ctx, oracle::random_with_valuation(rng, p, 1, 6))};
    const long degree = 2 + static_cast<long>(rng() % 3);
    for (long d = 2; d <= degree; ++d) c.push_back(Z(ctx, 1 + oracle::random_integer(rng, oracle::ipow(p, 3))));
    // P(X) = alpha + G(X - alpha)
    Polynomial shifted = Polynomial(ctx, c).taylor_shift(-alpha);
    std::vector<PadicNumber> pc = shifted.coefficients();
    pc[0] += alpha;
    const Polynomial P(ctx, pc);
    const auto lin = linearize(P, alpha, kTruncation);
    const long m0 = lin.isometry_radius_valuation;
    const auto z = alpha + Z(ctx, oracle::random_with_valuation(rng, p, m0 + static_cast<long>(rng() % 3), 20));
    ++pairs;
    try {
      const auto base = log_of(lin, z);
      bool all = true;
      PadicNumber zn = z;
      for (unsigned long n = 1; n <= 20; ++n) {
        zn = P(zn);
        const auto lhs = log_of(lin, zn);
        const auto rhs = lin.multiplier.pow(n) * base;
        const auto diff = lhs - rhs;
        // the comparison must retain digits beyond the value itself
        if (!diff.is_zero() || diff.absolute_precision() <= rhs.valuation()) all = false;
        min_precision = std::min(min_precision, diff.absolute_precision() - rhs.valuation());
      }
      if (all) ++ok;
    } catch (const std::exception&) {
    }
  }
  return {ok == pairs, std::to_string(ok) + "/" + std::to_string(pairs) +
                           " pairs agree for n <= 20, fewest certified relative digits " +
                           std::to_string(min_precision)};
}

// 6, 7 --------------------------------------------------------------------

Outcome oracle_equivalence() {
  long instances = 0, checked = 0, disagreements = 0, skipped = 0;
  std::string first;
  for (const auto& path : corpus_files()) {
    ++instances;
    auto pf = load(path);
    pf.max_iterations = kOracleScan;
    const auto spec = io::to_system(pf);
    try {
      const auto vs = validate(spec);
      const auto hits = direct_orbit_scan(spec, kOracleScan);
      const std::set<long> hit_set(hits.begin(), hits.end());
      if (vs.degenerate) {
        ++skipped;
        continue;
      }
      const auto lam = compute_lambdas(vs);
      const auto ball = orbit_ball(vs, lam);
      std::vector<TruncatedSeries> fs;
      for (const auto& f : spec.variety) fs.push_back(build_F(vs, lam, f));
      for (long n = vs.n0; n <= kOracleScan; ++n) {
        const auto w = orbit_parameter(vs, lam, n);
        bool all_zero = true;
        for (const auto& F : fs) {
          const auto v = evaluate(F, w, ball);
          if (v.is_zero() && v.absolute_precision() < kSeriesZeroFloor) {
            throw PrecisionError("F at n = " + std::to_string(n) + " is zero only to absolute precision " +
                                 std::to_string(v.absolute_precision()));
          }
          if (!v.is_zero()) {
            all_zero = false;
            break;
          }
        }
        ++checked;
        if (all_zero != (hit_set.count(n) > 0)) {
          ++disagreements;
          if (first.empty()) first = path.filename().string() + " n=" + std::to_string(n);
        }
      }
    } catch (const std::exception& e) {
      ++disagreements;
      if (first.empty()) first = path.filename().string() + ": " + e.what();
    }
  }
  std::string detail = std::to_string(instances) + " instances, " + std::to_string(checked) + " orbit indices, " +
                       std::to_string(disagreements) + " disagreements";
  if (skipped) detail += ", " + std::to_string(skipped) + " degenerate";
  if (!first.empty()) detail += " (first: " + first + ")";
  return {disagreements == 0 && instances == 50 && skipped == 0, detail};
}

Outcome bound_soundness() {
  long finite = 0, violations = 0;
  std::string first;
  for (const auto& path : corpus_files()) {
    const auto spec = io::to_system(load(path));
    try {
      const auto r = analyze(spec);
      if (r.overall != OverallVerdict::finite || !r.zero_count_bound) continue;
      ++finite;
      const auto hits = direct_orbit_scan(spec, kEscalatedScan);
      const long late = std::count_if(hits.begin(), hits.end(), [&](long n) { return n >= r.n0; });
      if (late > *r.zero_count_bound) {
        ++violations;
        if (first.empty()) first = path.filename().string();
      }
    } catch (const std::exception& e) {
      ++violations;
      if (first.empty()) first = path.filename().string() + ": " + e.what();
    }
  }
  std::string detail = std::to_string(finite) + " certified Finite instances scanned to N_max = " +
                       std::to_string(kEscalatedScan) + ", " + std::to_string(violations) + " exceed their bound";
  if (!first.empty()) detail += " (first: " + first + ")";
  return {violations == 0 && finite > 0, detail};
}

// 8 -----------------------------------------------------------------------

Outcome newton_counting() {
  std::mt19937_64 rng(8);
  long polys = 0, ok = 0;
  for (int i = 0; i < 200; ++i) {
    const long p = std::array<long, 3>{3, 5, 7}[static_cast<std::size_t>(i % 3)];
    const PadicContext ctx(p, kPrecision);
    const long degree = 1 + static_cast<long>(rng() % 12);
    Polynomial f(ctx, {PadicNumber::one(ctx)});
    std::vector<long> vals;
    for (long d = 0; d < degree; ++d) {
      const long k = static_cast<long>(rng() % 7);
      vals.push_back(k);
      const auto r = Z(ctx, oracle::random_with_valuation(rng, p, k, 4));
      f = f * Polynomial(ctx, {-r, PadicNumber::one(ctx)});
    }
    const auto s = f.to_series(f.degree());
    bool all = true;
    for (long m = 0; m <= 5; ++m) {
      const long expect = std::count_if(vals.begin(), vals.end(), [&](long k) { return k >= m; });
      const auto zc = count_zeros_in_ball(s, Ball{PadicNumber::zero(ctx), m});
      if (!zc.certified || zc.count != expect) all = false;
    }
    ++polys;
    if (all) ++ok;
  }
  return {ok == polys, std::to_string(ok) + "/" + std::to_string(polys) + " polynomials match for m = 0..5"};
}

// 9 -----------------------------------------------------------------------

bool classification_matches(const FixedPointInfo& fp) {
  const auto& m = fp.multiplier;
  if (m.is_zero()) return fp.classification == FixedPointKind::superattracting;
  if (m.valuation() > 0) return fp.classification == FixedPointKind::attracting;
  if (m.valuation() == 0) return fp.classification == FixedPointKind::indifferent;
  return fp.classification == FixedPointKind::repelling;
}

Outcome hensel_fixed_points() {
  std::mt19937_64 rng(9);
  long cubics = 0, points = 0, bad = 0, unresolved = 0;
  for (int i = 0; i < 100; ++i) {
    const long p = std::array<long, 3>{3, 5, 7}[static_cast<std::size_t>(i % 3)];
    const PadicContext ctx(p, kPrecision);
    std::vector<PadicNumber> c;
    for (int d = 0; d < 3; ++d) c.push_back(Z(ctx, oracle::random_integer(rng, oracle::ipow(p, 5))));
    c.push_back(Z(ctx, oracle::random_with_valuation(rng, p, 0, 5)));
    const Polynomial P(ctx, c);
    const auto found = find_fixed_points(P);
    ++cubics;
    unresolved += static_cast<long>(found.unresolved_residues.size());
    for (const auto& fp : found.points) {
      ++points;
      const auto r = P(fp.point) - fp.point;
      const long v = r.is_zero() ? r.absolute_precision() : r.valuation();
      if (v < kPrecision - kHenselSlack || !classification_matches(fp)) ++bad;
    }
  }
  // pX + X^2 has fixed points 0 (multiplier p) and 1 - p (multiplier 2 - p)
  bool basic = true;
  for (long p : {3L, 5L, 7L}) {
    const PadicContext ctx(p, kPrecision);
    const Polynomial P(ctx, {PadicNumber::zero(ctx), Z(ctx, p), PadicNumber::one(ctx)});
    const auto found = find_fixed_points(P);
    bool zero = false, other = false;
    for (const auto& fp : found.points) {
      if (fp.point.is_zero() && fp.classification == FixedPointKind::attracting) zero = true;
      if ((fp.point - Z(ctx, 1 - p)).is_zero() && fp.point.relative_precision() == kPrecision &&
          fp.classification == FixedPointKind::indifferent) {
        other = true;
      }
    }
    if (!zero || !other || found.points.size() != 2) basic = false;
  }
  return {bad == 0 && basic, std::to_string(cubics) + " cubics, " + std::to_string(points) + " fixed points, " +
                                 std::to_string(bad) + " failures, " + std::to_string(unresolved) +
                                 " unresolved classes; pX + X^2 " + (basic ? "recovered" : "NOT recovered")};
}

// 10 ----------------------------------------------------------------------

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "padyn_acceptance";
  fs::create_directories(dir);
  long files = 0, identical = 0;
  for (const auto& path : corpus_files()) {
    ++files;
    std::string reports[2];
    int codes[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path out = dir / (path.stem().string() + "." + std::to_string(k) + ".json");
      fs::remove(out);
      const std::string cmd =
          std::string(PADYN_BIN) + " check '" + path.string() + "' --report '" + out.string() + "' 2>/dev/null";
      codes[k] = std::system(cmd.c_str());
      reports[k] = slurp(out);
    }
    if (codes[0] == codes[1] && !reports[0].empty() && reports[0] == reports[1]) ++identical;
  }
  return {identical == files && files > 0,
          std::to_string(identical) + "/" + std::to_string(files) + " reports byte-identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"norm identity v(b^n - 1) = v(b - 1) + v_p(n)", norm_identity},
      {"functional equation residuals", functional_equation},
      {"exp coefficient bound", coefficient_bound},
      {"log(exp(X)) = X and isometry", inverse_and_isometry},
      {"log(P^n z) = a1^n log(z)", conjugation_identity},
      {"F_j zeros match the direct orbit scan", oracle_equivalence},
      {"zero-count bound survives N_max = 1000", bound_soundness},
      {"Newton polygon zero counts", newton_counting},
      {"Hensel fixed points", hensel_fixed_points},
      {"CLI report determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}

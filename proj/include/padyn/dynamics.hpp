#pragma once

// Univariate polynomial dynamics over Q_p: iteration, Hensel search for
// integral fixed points, multipliers and their classification.

#include <padyn/padic.hpp>
#include <padyn/polynomial.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace padyn {

/// Fixed points whose residual v(P(alpha) - alpha) reaches N - kFixedPointSlack count as fixed.
inline constexpr long kFixedPointSlack = 8;

enum class FixedPointKind { attracting, superattracting, indifferent, repelling };

inline const char* to_string(FixedPointKind k) {
  switch (k) {
    case FixedPointKind::attracting: return "attracting";
    case FixedPointKind::superattracting: return "superattracting";
    case FixedPointKind::indifferent: return "indifferent";
    case FixedPointKind::repelling: return "repelling";
  }
  return "?";
}

struct FixedPointInfo {
  PadicNumber point;
  PadicNumber multiplier;
  FixedPointKind classification;
  std::optional<long> attracting_radius_valuation;
};

struct FixedPointSearch {
  std::vector<FixedPointInfo> points;
  /// Residues a mod p whose class may hold roots the search could not separate.
  std::vector<std::int64_t> unresolved_residues;
};

inline FixedPointKind classify_multiplier(const PadicNumber& m) {
  if (m.is_zero()) return FixedPointKind::superattracting;
  const long v = m.valuation();
  if (v >= 1) return FixedPointKind::attracting;
  return v == 0 ? FixedPointKind::indifferent : FixedPointKind::repelling;
}

/// P^n(z).
inline PadicNumber iterate(const Polynomial& p, PadicNumber z, long n) {
  if (n < 0) throw DomainError("iterate: negative iteration count");
  for (long i = 0; i < n; ++i) z = p(z);
  return z;
}

/// G(X) = P(X + alpha) - alpha with G(0) set to exact zero.
inline Polynomial conjugate_to_origin(const Polynomial& p, const PadicNumber& alpha) {
  const PadicNumber residual = p(alpha) - alpha;
  const long n = p.context().working_precision();
  if (!residual.is_zero() && residual.valuation() < n - kFixedPointSlack) {
    throw DomainError("conjugate_to_origin: point is not fixed to working precision (v(P(a) - a) = " +
                      std::to_string(residual.valuation()) + ")");
  }
  std::vector<PadicNumber> c = p.taylor_shift(alpha).coefficients();
  if (!c.empty()) c[0] = PadicNumber::zero(p.context());
  return Polynomial(p.context(), std::move(c));
}

/// Smallest m >= 1 with v(b_i) + (i - 1) m > v(b_1) for every higher coefficient b_i of
/// the conjugate: on v(z - alpha) >= m one step multiplies the distance by |P'(alpha)|.
inline long attracting_radius(const Polynomial& p, const FixedPointInfo& fp) {
  if (fp.classification != FixedPointKind::attracting) {
    throw DomainError("attracting_radius: fixed point is not attracting");
  }
  const Polynomial g = p.taylor_shift(fp.point);
  const long v1 = fp.multiplier.valuation();
  long m = 1;
  for (long i = 2; i <= g.degree(); ++i) {
    const PadicNumber b = g.coefficient(i);
    if (b.is_exact_zero()) continue;
    const mpq_class threshold(v1 - b.valuation_lower_bound(), i - 1);
    m = std::max(m, floor_to_long(threshold) + 1);
  }
  return m;
}

namespace detail {

/// Nesting depth of residue-class refinement before a class is reported unresolved.
inline constexpr long kMaxRefinementDepth = 32;

/// Divides out the content; nullopt when every coefficient is zero to precision.
inline std::optional<Polynomial> primitive_part(const Polynomial& q) {
  const PadicContext& ctx = q.context();
  std::optional<long> low;
  for (const auto& c : q.coefficients()) {
    if (c.is_zero()) continue;
    low = low ? std::min(*low, c.valuation()) : c.valuation();
  }
  if (!low) return std::nullopt;
  const PadicNumber scale = PadicNumber::from_parts(ctx, -*low, 1, ctx.working_precision());
  std::vector<PadicNumber> out;
  for (const auto& c : q.coefficients()) out.push_back(scale * c);
  return Polynomial(ctx, std::move(out));
}

// Residue of an integral coefficient; nullopt when precision does not determine it.
inline std::optional<std::uint64_t> residue_mod_p(const PadicNumber& c) {
  if (c.is_zero()) {
    if (c.absolute_precision() >= 1) return 0;
    return std::nullopt;
  }
  if (c.valuation() > 0) return 0;
  if (c.valuation() < 0) throw DomainError("residue of a non-integral value");
  return mpz_class(c.unit() % c.context().prime_z()).get_ui();
}

inline std::uint64_t eval_mod(const std::vector<std::uint64_t>& cs, std::uint64_t a, std::uint64_t m) {
  std::uint64_t acc = 0;
  for (auto it = cs.rbegin(); it != cs.rend(); ++it) acc = (mulmod(acc, a, m) + *it) % m;
  return acc;
}

struct RootSearch {
  long lifts;
  std::vector<PadicNumber> roots;
  bool unresolved = false;

  // Roots of q (primitive) in Z_p; X = offset + p^depth Y maps them back.
  void scan(const Polynomial& q, const PadicNumber& offset, long depth) {
    const auto red = reduction(q);
    if (!red) {
      unresolved = true;
      return;
    }
    const auto prime = static_cast<std::uint64_t>(q.context().prime());
    for (std::uint64_t a = 0; a < prime; ++a) {
      if (eval_mod(*red, a, prime) == 0) lift_class(q, *red, a, offset, depth);
    }
  }

  // Roots of q congruent to a mod p.
  void lift_class(const Polynomial& q, const std::vector<std::uint64_t>& red, std::uint64_t a,
                  const PadicNumber& offset, long depth) {
    const PadicContext& ctx = q.context();
    const auto prime = static_cast<std::uint64_t>(ctx.prime());
    const PadicNumber step = PadicNumber::from_parts(ctx, depth, 1, ctx.working_precision());
    const PadicNumber start = PadicNumber::from_integer(ctx, mpz_class(static_cast<unsigned long>(a)));
    std::vector<std::uint64_t> dred;
    for (std::size_t i = 1; i < red.size(); ++i) dred.push_back(mulmod(red[i], i % prime, prime));
    if (eval_mod(dred, a, prime) != 0) {
      const Polynomial dq = q.derivative();
      PadicNumber y = start;
      for (long it = 0; it < lifts; ++it) {
        const PadicNumber delta = q(y) / dq(y);
        if (delta.is_zero()) break;
        y -= delta;
      }
      roots.push_back(offset + step * y);
      return;
    }
    if (depth >= kMaxRefinementDepth) {
      unresolved = true;
      return;
    }
    // q(a + p Y) with the content removed
    const PadicNumber p_num = PadicNumber::from_integer(ctx, ctx.prime_z());
    std::vector<PadicNumber> sc;
    PadicNumber pk = PadicNumber::one(ctx);
    const Polynomial shifted = q.taylor_shift(start);
    for (const auto& c : shifted.coefficients()) {
      sc.push_back(c * pk);
      pk *= p_num;
    }
    const auto next = primitive_part(Polynomial(ctx, std::move(sc)));
    if (!next) {
      unresolved = true;
      return;
    }
    scan(*next, offset + step * start, depth + 1);
  }

  static std::optional<std::vector<std::uint64_t>> reduction(const Polynomial& q) {
    std::vector<std::uint64_t> red;
    for (const auto& c : q.coefficients()) {
      const auto r = residue_mod_p(c);
      if (!r) return std::nullopt;
      red.push_back(*r);
    }
    return red;
  }
};

}  // namespace detail

/// Simple roots of P(X) - X in Z_p: residue scan mod p, refined inside classes
/// where the derivative also vanishes, then Newton lifting.
inline FixedPointSearch find_fixed_points(const Polynomial& p) {
  const PadicContext& ctx = p.context();
  const Polynomial q = p - Polynomial(ctx, {PadicNumber::zero(ctx), PadicNumber::one(ctx)});
  const auto qn = detail::primitive_part(q);
  if (!qn) throw DomainError("find_fixed_points: P(X) = X to working precision, every point is fixed");
  const auto red = detail::RootSearch::reduction(*qn);
  if (!red) throw PrecisionError("find_fixed_points: reduction of P(X) - X mod p is not determined");

  long lifts = 8;
  for (long k = 1; k < ctx.working_precision(); k *= 2) ++lifts;

  FixedPointSearch out;
  const Polynomial dp = p.derivative();
  const auto prime = static_cast<std::uint64_t>(ctx.prime());
  for (std::uint64_t a = 0; a < prime; ++a) {
    if (detail::eval_mod(*red, a, prime) != 0) continue;
    detail::RootSearch search{lifts, {}, false};
    search.lift_class(*qn, *red, a, PadicNumber::zero(ctx), 0);
    if (search.unresolved) out.unresolved_residues.push_back(static_cast<std::int64_t>(a));
    for (auto& alpha : search.roots) {
      const PadicNumber multiplier = dp(alpha);
      FixedPointInfo info{alpha, multiplier, classify_multiplier(multiplier), std::nullopt};
      if (info.classification == FixedPointKind::attracting) info.attracting_radius_valuation = attracting_radius(p, info);
      out.points.push_back(std::move(info));
    }
  }
  return out;
}

}  // namespace padyn

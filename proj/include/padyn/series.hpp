#pragma once

// Truncated power series over Q_p with a certified bound on the unseen tail.

#include <padyn/padic.hpp>

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace padyn {

/// The truncation order is too low (or the point too large) for the tail to be dominated.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline long floor_to_long(const mpq_class& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f.get_si();
}

inline long ceil_to_long(const mpq_class& q) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return c.get_si();
}

/// Lower bound on v(c_n) beyond some index: either every such coefficient is
/// exactly zero, or v(c_n) >= slope * n + intercept.
struct TailBound {
  bool vanishing = true;
  mpq_class slope = 0;
  mpq_class intercept = 0;

  static TailBound zero_tail() { return {}; }
  static TailBound affine(mpq_class slope, mpq_class intercept) {
    return {false, std::move(slope), std::move(intercept)};
  }

  mpq_class at(long n) const { return slope * n + intercept; }
};

class TruncatedSeries {
 public:
  /// coefficients[i] is the coefficient of X^i; the truncation order is size() - 1.
  TruncatedSeries(std::vector<PadicNumber> coefficients, TailBound tail)
      : coeffs_(std::move(coefficients)), tail_(std::move(tail)) {
    if (coeffs_.empty()) throw DomainError("truncated series needs at least one coefficient");
  }

  static TruncatedSeries zero(const PadicContext& ctx, long order) {
    return TruncatedSeries(std::vector<PadicNumber>(static_cast<std::size_t>(order) + 1, PadicNumber::zero(ctx)),
                           TailBound::zero_tail());
  }

  static TruncatedSeries constant(const PadicNumber& c, long order) {
    auto s = zero(c.context(), order);
    s.coeffs_[0] = c;
    return s;
  }

  /// The series X.
  static TruncatedSeries variable(const PadicContext& ctx, long order) {
    auto s = zero(ctx, order);
    if (order >= 1) {
      s.coeffs_[1] = PadicNumber::one(ctx);
    } else {
      s.tail_ = TailBound::affine(0, 0);
    }
    return s;
  }

  /// Polynomial coefficients (degree-ascending); coefficients past the order go into an affine tail.
  static TruncatedSeries from_polynomial(const std::vector<PadicNumber>& coefficients, const PadicContext& ctx,
                                         long order) {
    auto s = zero(ctx, order);
    std::optional<mpq_class> floor;
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
      if (static_cast<long>(i) <= order) {
        s.coeffs_[i] = coefficients[i];
      } else if (!coefficients[i].is_exact_zero()) {
        mpq_class v(coefficients[i].valuation_lower_bound());
        floor = floor ? std::min(*floor, v) : v;
      }
    }
    if (floor) s.tail_ = TailBound::affine(0, *floor);
    return s;
  }

  long order() const { return static_cast<long>(coeffs_.size()) - 1; }
  const PadicNumber& operator[](long n) const { return coeffs_[static_cast<std::size_t>(n)]; }
  const std::vector<PadicNumber>& coefficients() const { return coeffs_; }
  const TailBound& tail() const { return tail_; }
  PadicContext context() const { return coeffs_.front().context(); }

  /// True when the polynomial part is exactly zero and the tail vanishes.
  bool is_exact_zero() const {
    if (!tail_.vanishing) return false;
    for (const auto& c : coeffs_) {
      if (!c.is_exact_zero()) return false;
    }
    return true;
  }

  /// Every computed coefficient indistinguishable from zero.
  bool is_zero_to_precision() const {
    for (const auto& c : coeffs_) {
      if (!c.is_zero()) return false;
    }
    return true;
  }

  /// Highest index whose coefficient is not exactly zero, or -1.
  long known_degree() const {
    for (long n = order(); n >= 0; --n) {
      if (!(*this)[n].is_exact_zero()) return n;
    }
    return -1;
  }

  /// Degree when the series is a genuine polynomial (vanishing tail).
  std::optional<long> polynomial_degree() const {
    if (!tail_.vanishing) return std::nullopt;
    return known_degree();
  }

  /// Bound valid for every n > m, merging computed coefficients m+1..order with the tail.
  /// When the tail vanishes the slope is slope_hint (default 0).
  TailBound tail_from(long m, const std::optional<mpq_class>& slope_hint = std::nullopt) const {
    std::optional<mpq_class> intercept;
    mpq_class slope = tail_.vanishing ? slope_hint.value_or(mpq_class(0)) : tail_.slope;
    if (!tail_.vanishing) intercept = tail_.intercept;
    for (long n = std::max(m + 1, 0L); n <= order(); ++n) {
      const auto& c = (*this)[n];
      if (c.is_exact_zero()) continue;
      mpq_class cand = mpq_class(c.valuation_lower_bound()) - slope * n;
      intercept = intercept ? std::min(*intercept, cand) : cand;
    }
    if (!intercept) return TailBound::zero_tail();
    return TailBound::affine(slope, *intercept);
  }

  TruncatedSeries truncated(long new_order) const {
    if (new_order >= order()) return *this;
    std::vector<PadicNumber> c(coeffs_.begin(), coeffs_.begin() + new_order + 1);
    return TruncatedSeries(std::move(c), tail_from(new_order));
  }

  std::string to_string() const {
    std::string out;
    for (long n = 0; n <= order(); ++n) {
      if ((*this)[n].is_exact_zero()) continue;
      if (!out.empty()) out += " + ";
      out += "(" + (*this)[n].to_string() + ")*X^" + std::to_string(n);
    }
    return out.empty() ? std::string("0") : out;
  }

 private:
  std::vector<PadicNumber> coeffs_;
  TailBound tail_;
};

namespace detail {

inline TailBound min_tail(const TailBound& a, const TailBound& b) {
  if (a.vanishing) return b;
  if (b.vanishing) return a;
  return TailBound::affine(std::min(a.slope, b.slope), std::min(a.intercept, b.intercept));
}

}  // namespace detail

inline TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
  const long order = std::min(a.order(), b.order());
  std::vector<PadicNumber> c;
  c.reserve(static_cast<std::size_t>(order) + 1);
  for (long n = 0; n <= order; ++n) c.push_back(a[n] + b[n]);
  TailBound ta = a.tail_from(order);
  std::optional<mpq_class> hint;
  if (!ta.vanishing) hint = ta.slope;
  TailBound tb = b.tail_from(order, hint);
  if (ta.vanishing && !tb.vanishing) ta = a.tail_from(order, tb.slope);
  return TruncatedSeries(std::move(c), detail::min_tail(ta, tb));
}

inline TruncatedSeries operator-(const TruncatedSeries& a) {
  std::vector<PadicNumber> c;
  c.reserve(a.coefficients().size());
  for (const auto& x : a.coefficients()) c.push_back(-x);
  return TruncatedSeries(std::move(c), a.tail());
}

inline TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) { return a + (-b); }

/// Coefficientwise scaling by a scalar.
inline TruncatedSeries operator*(const PadicNumber& s, const TruncatedSeries& a) {
  std::vector<PadicNumber> c;
  c.reserve(a.coefficients().size());
  for (const auto& x : a.coefficients()) c.push_back(s * x);
  TailBound t = a.tail();
  if (s.is_exact_zero()) {
    t = TailBound::zero_tail();
  } else if (!t.vanishing) {
    t.intercept += s.valuation_lower_bound();
  }
  return TruncatedSeries(std::move(c), std::move(t));
}

namespace detail {

// Cauchy product coefficients 0..limit (limit <= both orders).
inline std::vector<PadicNumber> cauchy(const TruncatedSeries& a, const TruncatedSeries& b, long limit) {
  const PadicContext ctx = a.context();
  std::vector<PadicNumber> c;
  c.reserve(static_cast<std::size_t>(limit) + 1);
  for (long n = 0; n <= limit; ++n) {
    PadicNumber acc = PadicNumber::zero(ctx);
    for (long k = 0; k <= n; ++k) {
      if (a[k].is_exact_zero() || b[n - k].is_exact_zero()) continue;
      acc += a[k] * b[n - k];
    }
    c.push_back(std::move(acc));
  }
  return c;
}

// Tail of a product of two series, valid beyond `order`.
inline TailBound product_tail(const TruncatedSeries& a, const TruncatedSeries& b, long order) {
  const auto da = a.polynomial_degree();
  const auto db = b.polynomial_degree();
  if (da && db && (*da < 0 || *db < 0 || *da + *db <= order)) return TailBound::zero_tail();
  TailBound ga = a.tail_from(-1);
  std::optional<mpq_class> hint;
  if (!ga.vanishing) hint = ga.slope;
  TailBound gb = b.tail_from(-1, hint);
  if (ga.vanishing && !gb.vanishing) ga = a.tail_from(-1, gb.slope);
  if (ga.vanishing || gb.vanishing) return TailBound::zero_tail();
  return TailBound::affine(std::min(ga.slope, gb.slope), ga.intercept + gb.intercept);
}

}  // namespace detail

inline TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
  const long order = std::min(a.order(), b.order());
  return TruncatedSeries(detail::cauchy(a, b, order), detail::product_tail(a, b, order));
}

/// outer(inner(X)) truncated at min order.  An infinite outer series needs an
/// inner series whose constant term is exactly zero.
inline TruncatedSeries compose(const TruncatedSeries& outer, const TruncatedSeries& inner) {
  const PadicContext ctx = inner.context();
  const long order = std::min(outer.order(), inner.order());
  const auto outer_degree = outer.polynomial_degree();
  const bool inner_vanishes_at_zero = inner[0].is_exact_zero();
  if (!outer_degree && !inner_vanishes_at_zero) {
    throw DomainError("compose: inner series must have zero constant term when the outer series is infinite");
  }
  const long top = outer_degree ? std::min(*outer_degree, inner_vanishes_at_zero ? order : *outer_degree)
                                : order;
  if (top < 0) return TruncatedSeries::zero(ctx, order);

  // inner = c X: rescale coefficients
  if (inner_vanishes_at_zero && inner.polynomial_degree() == 1 && !inner[1].is_zero()) {
    const PadicNumber& c = inner[1];
    std::vector<PadicNumber> out(static_cast<std::size_t>(order) + 1, PadicNumber::zero(ctx));
    PadicNumber cn = PadicNumber::one(ctx);
    for (long n = 0; n <= order; ++n) {
      if (n <= top && !outer[n].is_exact_zero()) out[static_cast<std::size_t>(n)] = outer[n] * cn;
      cn *= c;
    }
    const TailBound go = outer.tail_from(order);
    if (go.vanishing) return TruncatedSeries(std::move(out), TailBound::zero_tail());
    return TruncatedSeries(std::move(out), TailBound::affine(go.slope + c.valuation(), go.intercept));
  }

  // Horner from the top.  With a zero constant term in the inner series the
  // partial result at step i is multiplied by inner i more times, so only
  // degrees <= order - i of it can reach the output.
  std::vector<PadicNumber> acc(static_cast<std::size_t>(order) + 1, PadicNumber::zero(ctx));
  acc[0] = outer[top];
  for (long i = top - 1; i >= 0; --i) {
    const long keep = inner_vanishes_at_zero ? order - i : order;
    std::vector<PadicNumber> next(static_cast<std::size_t>(order) + 1, PadicNumber::zero(ctx));
    for (long n = 0; n <= keep; ++n) {
      PadicNumber sum = n == 0 ? outer[i] : PadicNumber::zero(ctx);
      for (long k = inner_vanishes_at_zero ? 1 : 0; k <= n; ++k) {
        const auto& x = acc[static_cast<std::size_t>(n - k)];
        if (x.is_exact_zero() || inner[k].is_exact_zero()) continue;
        sum += x * inner[k];
      }
      next[static_cast<std::size_t>(n)] = std::move(sum);
    }
    acc = std::move(next);
  }

  TailBound tail;
  if (outer_degree) {
    const auto inner_degree = inner.polynomial_degree();
    if (inner_degree && (*inner_degree <= 0 || *outer_degree * *inner_degree <= order)) {
      tail = TailBound::zero_tail();
    } else {
      const TailBound gi = inner.tail_from(inner_vanishes_at_zero ? 0 : -1);
      std::optional<mpq_class> m;
      for (long i = 1; i <= *outer_degree; ++i) {
        if (outer[i].is_exact_zero()) continue;
        mpq_class cand = mpq_class(outer[i].valuation_lower_bound()) + gi.intercept * i;
        m = m ? std::min(*m, cand) : cand;
      }
      tail = m ? TailBound::affine(gi.slope, *m) : TailBound::zero_tail();
    }
  } else {
    const TailBound gi = inner.tail_from(0);
    if (gi.vanishing) return TruncatedSeries(std::move(acc), TailBound::zero_tail());
    const TailBound go = outer.tail_from(0);
    if (go.vanishing) {
      tail = TailBound::zero_tail();
    } else {
      const mpq_class d = go.slope + gi.intercept;
      tail = d >= 0 ? TailBound::affine(gi.slope, go.intercept + d) : TailBound::affine(gi.slope + d, go.intercept);
    }
  }
  return TruncatedSeries(std::move(acc), std::move(tail));
}

/// Compositional inverse of f (f(0) = 0, f'(0) a unit), by coefficient recursion.
///
/// Tail: with t = sup_{n>=2} -v(c_n)/(n-1), the rescaled series
/// pi^(-t) f(pi^t X) (v(pi) = t) is integral with unit linear term, so its
/// inverse is integral and the inverse of f satisfies v(d_n) >= -t(n-1).
inline TruncatedSeries reversion(const TruncatedSeries& f) {
  const PadicContext ctx = f.context();
  const long order = f.order();
  if (order < 1) throw DomainError("reversion needs truncation order >= 1");
  if (!f[0].is_exact_zero()) throw DomainError("reversion: constant term must be exactly zero");
  if (f[1].is_zero() || f[1].valuation() != 0) throw DomainError("reversion: linear coefficient is not a unit");

  std::optional<mpq_class> t;
  auto raise = [&](const mpq_class& q) { t = t ? std::max(*t, q) : q; };
  for (long n = 2; n <= order; ++n) {
    if (f[n].is_exact_zero()) continue;
    raise(mpq_class(-f[n].valuation_lower_bound(), n - 1));
  }
  if (!f.tail().vanishing) {
    const mpq_class& s = f.tail().slope;
    const mpq_class& b = f.tail().intercept;
    const mpq_class sb = s + b;
    raise(sb < 0 ? mpq_class(-s - sb / order) : mpq_class(-s));
  }

  // powers[i][n] = [g^i]_n for i >= 2; [g^i]_n only involves g_1..g_{n-i+1}.
  std::vector<PadicNumber> g(static_cast<std::size_t>(order) + 1, PadicNumber::zero(ctx));
  std::vector<std::vector<PadicNumber>> powers(static_cast<std::size_t>(order) + 1);
  const PadicNumber inv_lead = PadicNumber::one(ctx) / f[1];
  g[1] = inv_lead;
  for (long i = 2; i <= order; ++i) {
    powers[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(order) + 1, PadicNumber::zero(ctx));
  }
  for (long n = 2; n <= order; ++n) {
    PadicNumber rhs = PadicNumber::zero(ctx);
    for (long i = 2; i <= n; ++i) {
      auto& row = powers[static_cast<std::size_t>(i)];
      const std::vector<PadicNumber>& prev = i == 2 ? g : powers[static_cast<std::size_t>(i - 1)];
      PadicNumber acc = PadicNumber::zero(ctx);
      for (long k = 1; k <= n - i + 1; ++k) {
        const auto& a = g[static_cast<std::size_t>(k)];
        const auto& b = prev[static_cast<std::size_t>(n - k)];
        if (a.is_exact_zero() || b.is_exact_zero()) continue;
        acc += a * b;
      }
      row[static_cast<std::size_t>(n)] = acc;
      if (!f[i].is_exact_zero()) rhs += f[i] * acc;
    }
    g[static_cast<std::size_t>(n)] = -(rhs * inv_lead);
  }
  if (!t) return TruncatedSeries(std::move(g), TailBound::zero_tail());
  return TruncatedSeries(std::move(g), TailBound::affine(-*t, *t));
}

/// The series X scaled by c.
inline TruncatedSeries scaled_variable(const PadicNumber& c, long order) {
  return c * TruncatedSeries::variable(c.context(), order);
}

/// Sum of c_n (z - center)^n with the unseen tail folded into the precision:
/// the result is capped at absolute precision E = min_{n>T} (tail(n) + n v(z - center)).
inline PadicNumber evaluate(const TruncatedSeries& f, const PadicNumber& z, const Ball& domain) {
  if (!domain.contains(z)) throw DomainError("evaluate: point outside the certified domain");
  const PadicNumber x = z - domain.center;
  const long order = f.order();
  PadicNumber acc = f[order];
  for (long n = order - 1; n >= 0; --n) acc = acc * x + f[n];
  if (f.tail().vanishing || x.is_exact_zero()) return acc;
  const mpq_class growth = f.tail().slope + x.valuation_lower_bound();
  if (growth <= 0) {
    throw TruncationError("evaluate: tail not dominated at this point (raise the truncation order)");
  }
  const mpq_class e = growth * (order + 1) + f.tail().intercept;
  return acc.with_absolute_cap(ceil_to_long(e));
}

struct NewtonSegment {
  mpq_class slope;
  long length;
  long start;  // abscissa of the left vertex
};

/// Lower convex hull of {(n, v(c_n)) : c_n certified nonzero, n <= T}.
inline std::vector<NewtonSegment> newton_polygon(const TruncatedSeries& f) {
  std::vector<std::pair<long, long>> pts;
  for (long n = 0; n <= f.order(); ++n) {
    if (!f[n].is_zero()) pts.emplace_back(n, f[n].valuation());
  }
  if (pts.empty()) throw PrecisionError("newton_polygon: every coefficient is indistinguishable from zero");
  std::vector<std::pair<long, long>> hull;
  for (const auto& pt : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      // drop b when it lies on or above segment a -> pt
      const mpz_class lhs = mpz_class(b.second - a.second) * (pt.first - a.first);
      const mpz_class rhs = mpz_class(pt.second - a.second) * (b.first - a.first);
      if (lhs >= rhs) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(pt);
  }
  std::vector<NewtonSegment> out;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    const long dx = hull[i].first - hull[i - 1].first;
    out.push_back({mpq_class(hull[i].second - hull[i - 1].second, dx), dx, hull[i - 1].first});
    out.back().slope.canonicalize();
  }
  return out;
}

struct ZeroCount {
  long count = 0;
  bool certified = false;
  std::string diagnostic;
};

/// Zeros (with multiplicity) of f in {X : v(X) >= m}, m = domain.radius_valuation.
///
/// This is the largest index attaining min_n (v(c_n) + n m), i.e. the
/// abscissa where the Newton polygon stops having slopes <= -m.  The count is
/// certified only if neither undecided coefficients nor the tail can move it.
inline ZeroCount count_zeros_in_ball(const TruncatedSeries& f, const Ball& domain) {
  const long m = domain.radius_valuation;
  ZeroCount out;
  std::optional<long> best;
  long best_index = -1;
  for (long n = 0; n <= f.order(); ++n) {
    if (f[n].is_zero()) continue;
    const long w = f[n].valuation() + n * m;
    if (!best || w <= *best) {
      best = w;
      best_index = n;
    }
  }
  if (!best) {
    out.diagnostic = "no coefficient up to degree " + std::to_string(f.order()) + " is certified nonzero";
    return out;
  }
  out.count = best_index;
  for (long n = 0; n <= f.order(); ++n) {
    if (!f[n].is_zero() || f[n].is_exact_zero()) continue;
    const long w = f[n].valuation_lower_bound() + n * m;
    if ((n < best_index && w < *best) || (n > best_index && w <= *best)) {
      out.diagnostic = "coefficient of degree " + std::to_string(n) +
                       " is indistinguishable from zero at a precision that could change the count";
      return out;
    }
  }
  if (!f.tail().vanishing) {
    const mpq_class growth = f.tail().slope + m;
    const bool dominated = growth > 0 ? growth * (f.order() + 1) + f.tail().intercept > *best
                                      : (growth == 0 && f.tail().intercept > *best);
    if (!dominated) {
      out.diagnostic = "tail bound beyond degree " + std::to_string(f.order()) +
                       " does not dominate on this ball (raise the truncation order)";
      return out;
    }
  }
  out.certified = true;
  return out;
}

}  // namespace padyn

#pragma once

// Koenigs linearization at an attracting fixed point.
//
// For G(X) = a_1 X + a_2 X^2 + ... + a_r X^r with v(a_1) >= 1 the series
// exp(X) = X + c_2 X^2 + ... solving G(exp(X)) = exp(a_1 X) has
//
//   (a_1^n - a_1) c_n = sum_{i=2}^{r} a_i [exp^i]_n,
//
// and log is its compositional inverse.  v(a_1^n - a_1) = v(a_1) for all n >= 2.

#include <padyn/dynamics.hpp>
#include <padyn/padic.hpp>
#include <padyn/polynomial.hpp>
#include <padyn/series.hpp>

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace padyn {

/// Digits of absolute precision kept in reserve beyond T * v(a_1).
inline constexpr long kHeadroomMargin = 8;

struct Linearization {
  Polynomial base_poly;
  PadicNumber fixed_point;
  PadicNumber multiplier;
  Polynomial conjugate_poly;
  TruncatedSeries exp_series;
  TruncatedSeries log_series;
  long convergence_radius_valuation;
  long isometry_radius_valuation;
};

/// kappa with v(c_n) >= -n kappa: the a priori bound |c_n| <= (C M |p|)^(-n),
/// C = |a_1| and M = min(1, 1 / max_{i>=2} |a_i|).
inline long a_priori_coefficient_slope(const Polynomial& g) {
  long mu = 0;
  for (long i = 2; i <= g.degree(); ++i) {
    const PadicNumber b = g.coefficient(i);
    if (b.is_exact_zero()) continue;
    mu = std::max(mu, -b.valuation_lower_bound());
  }
  return g.coefficient(1).valuation() + mu + 1;
}

inline void check_headroom(const PadicContext& ctx, long order, long multiplier_valuation) {
  const long need = order * multiplier_valuation + kHeadroomMargin;
  if (ctx.working_precision() <= need) {
    throw DomainError("insufficient precision headroom: need N > T*v(a1) + " + std::to_string(kHeadroomMargin) +
                      " = " + std::to_string(need) + ", have N = " + std::to_string(ctx.working_precision()));
  }
}

/// Coefficients c_1..c_T of exp_G.
///
/// The tail bound is v(c_n) >= -sigma (n - 1), proved by induction from the
/// recursion: it holds for the computed n <= T by choice of sigma, and for
/// n > T because v(a_i) + sigma (i - 1) >= v(a_1) for every i >= 2.
/// It implies the a priori bound v(c_n) >= -n kappa.
inline TruncatedSeries koenigs_coefficients(const Polynomial& g, long order) {
  const PadicContext& ctx = g.context();
  if (order < 1) throw DomainError("koenigs_coefficients: truncation order must be >= 1");
  if (!g.coefficient(0).is_zero()) throw DomainError("koenigs_coefficients: G(0) != 0");
  const PadicNumber a1 = g.coefficient(1);
  if (a1.is_zero()) throw DomainError("koenigs_coefficients: superattracting (multiplier indistinguishable from zero)");
  if (a1.valuation() < 1) throw DomainError("koenigs_coefficients: multiplier is not attracting (v(a1) < 1)");
  check_headroom(ctx, order, a1.valuation());

  const long r = g.degree();
  std::vector<PadicNumber> c(static_cast<std::size_t>(order) + 1, PadicNumber::zero(ctx));
  c[1] = PadicNumber::one(ctx);
  // power[i][n] = [exp^i]_n for 2 <= i <= r
  std::vector<std::vector<PadicNumber>> power(static_cast<std::size_t>(std::max(r, 1L)) + 1);
  for (long i = 2; i <= r; ++i) {
    power[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(order) + 1, PadicNumber::zero(ctx));
  }
  PadicNumber a1_pow = a1;  // a_1^(n-1)
  for (long n = 2; n <= order; ++n) {
    PadicNumber rhs = PadicNumber::zero(ctx);
    for (long i = 2; i <= std::min(r, n); ++i) {
      const std::vector<PadicNumber>& prev = i == 2 ? c : power[static_cast<std::size_t>(i - 1)];
      PadicNumber acc = PadicNumber::zero(ctx);
      for (long k = 1; k <= n - i + 1; ++k) {
        const auto& x = c[static_cast<std::size_t>(k)];
        const auto& y = prev[static_cast<std::size_t>(n - k)];
        if (x.is_exact_zero() || y.is_exact_zero()) continue;
        acc += x * y;
      }
      power[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)] = acc;
      const PadicNumber ai = g.coefficient(i);
      if (!ai.is_exact_zero() && !acc.is_exact_zero()) rhs += ai * acc;
    }
    // a_1^n - a_1 = a_1 (a_1^(n-1) - 1) with the second factor a unit
    const PadicNumber unit_factor = a1_pow - PadicNumber::one(ctx);
    c[static_cast<std::size_t>(n)] = rhs.is_exact_zero() ? rhs : rhs / a1 / unit_factor;
    a1_pow *= a1;
  }

  std::optional<mpq_class> sigma;
  auto raise = [&](const mpq_class& q) { sigma = sigma ? std::max(*sigma, q) : q; };
  for (long i = 2; i <= r; ++i) {
    const PadicNumber b = g.coefficient(i);
    if (!b.is_exact_zero()) raise(mpq_class(a1.valuation() - b.valuation_lower_bound(), i - 1));
  }
  if (!sigma) return TruncatedSeries(std::move(c), TailBound::zero_tail());
  for (long n = 2; n <= order; ++n) {
    const auto& x = c[static_cast<std::size_t>(n)];
    if (!x.is_exact_zero()) raise(mpq_class(-x.valuation_lower_bound(), n - 1));
  }
  sigma->canonicalize();
  return TruncatedSeries(std::move(c), TailBound::affine(-*sigma, *sigma));
}

namespace detail {

// Smallest integer m >= 1 with m > every threshold.
inline long above_all(const std::vector<mpq_class>& thresholds) {
  long m = 1;
  for (const auto& t : thresholds) m = std::max(m, floor_to_long(t) + 1);
  return m;
}

inline std::vector<mpq_class> isometry_thresholds(const TruncatedSeries& s) {
  std::vector<mpq_class> out;
  // v(c_n) + n m > m  <=>  m > -v(c_n) / (n - 1)
  for (long n = 2; n <= s.order(); ++n) {
    if (!s[n].is_exact_zero()) out.emplace_back(-s[n].valuation_lower_bound(), n - 1);
  }
  if (!s.tail().vanishing) {
    // (slope + m) n + intercept - m > 0 for all n > T
    const mpq_class& a = s.tail().slope;
    const mpq_class& b = s.tail().intercept;
    out.push_back(-a);
    // at n = T + 1: m > -(a (T + 1) + b) / T
    out.push_back(-(a * (s.order() + 1) + b) / s.order());
  }
  return out;
}

inline std::vector<mpq_class> contraction_thresholds(const Polynomial& g) {
  std::vector<mpq_class> out;
  const long v1 = g.coefficient(1).valuation();
  for (long i = 2; i <= g.degree(); ++i) {
    const PadicNumber b = g.coefficient(i);
    if (!b.is_exact_zero()) out.emplace_back(v1 - b.valuation_lower_bound(), i - 1);
  }
  return out;
}

}  // namespace detail

/// Smallest m0 such that exp is an isometry on v(w) >= m0 (checked on computed
/// coefficients and through the tail bound) and G contracts that ball by |a_1|.
inline long isometry_radius(const Linearization& lin) {
  auto t = detail::isometry_thresholds(lin.exp_series);
  const auto c = detail::contraction_thresholds(lin.conjugate_poly);
  t.insert(t.end(), c.begin(), c.end());
  return detail::above_all(t);
}

/// Builds exp/log of P at the fixed point alpha.
inline Linearization linearize(const Polynomial& p, const PadicNumber& alpha, long order) {
  Polynomial g = conjugate_to_origin(p, alpha);
  const PadicNumber a1 = g.coefficient(1);
  TruncatedSeries exp_series = koenigs_coefficients(g, order);
  TruncatedSeries log_series = reversion(exp_series);
  long rho = 1;
  if (!exp_series.tail().vanishing) rho = floor_to_long(-exp_series.tail().slope) + 1;
  Linearization lin{p, alpha, a1, std::move(g), std::move(exp_series), std::move(log_series), rho, 0};
  lin.isometry_radius_valuation = isometry_radius(lin);
  return lin;
}

/// compose(G, exp) - compose(exp, a_1 X), truncated at T.
inline TruncatedSeries verify_functional_equation(const Linearization& lin) {
  const long order = lin.exp_series.order();
  const TruncatedSeries g = lin.conjugate_poly.to_series(order);
  const TruncatedSeries lhs = compose(g, lin.exp_series);
  const TruncatedSeries rhs = compose(lin.exp_series, scaled_variable(lin.multiplier, order));
  return lhs - rhs;
}

/// All coefficients of the residual certified zero.
inline bool residual_is_zero(const TruncatedSeries& residual) { return residual.is_zero_to_precision(); }

inline Ball isometry_ball(const Linearization& lin) { return Ball{lin.fixed_point, lin.isometry_radius_valuation}; }

/// log_P(z) = log_G(z - alpha) for v(z - alpha) >= m0.
inline PadicNumber log_of(const Linearization& lin, const PadicNumber& z) {
  const Ball ball = isometry_ball(lin);
  if (!ball.contains(z)) throw DomainError("log_of: argument outside the isometry ball");
  return evaluate(lin.log_series, z, ball);
}

/// exp_P(w) = alpha + exp_G(w) for v(w) >= m0.
inline PadicNumber exp_of(const Linearization& lin, const PadicNumber& w) {
  const Ball ball{PadicNumber::zero(w.context()), lin.isometry_radius_valuation};
  if (!ball.contains(w)) throw DomainError("exp_of: argument outside the isometry ball");
  return lin.fixed_point + evaluate(lin.exp_series, w, ball);
}

}  // namespace padyn

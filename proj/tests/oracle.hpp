#pragma once

// Exact rational reference arithmetic for tests.  Nothing here touches the
// p-adic precision machinery: series are QQ[[X]] truncations and valuations
// come from integer factorization.

#include <padyn/padic.hpp>

#include <gmpxx.h>

#include <random>
#include <vector>

namespace padyn::oracle {

using QSeries = std::vector<mpq_class>;

inline long valuation(const mpq_class& q, long p) {
  const mpz_class pz(p);
  return integer_valuation(q.get_num(), pz) - integer_valuation(q.get_den(), pz);
}

inline PadicNumber to_padic(const PadicContext& ctx, const mpq_class& q) {
  return PadicNumber::from_rational(ctx, q.get_num(), q.get_den());
}

inline QSeries mul(const QSeries& a, const QSeries& b, std::size_t order) {
  QSeries c(order + 1, 0);
  for (std::size_t i = 0; i < a.size() && i <= order; ++i) {
    for (std::size_t j = 0; j < b.size() && i + j <= order; ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

/// outer(inner), inner(0) = 0 or outer a polynomial; naive sum of powers.
inline QSeries compose(const QSeries& outer, const QSeries& inner, std::size_t order) {
  QSeries acc(order + 1, 0);
  QSeries pw(order + 1, 0);
  pw[0] = 1;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    for (std::size_t n = 0; n <= order; ++n) acc[n] += outer[i] * pw[n];
    pw = mul(pw, inner, order);
  }
  return acc;
}

/// Koenigs coefficients by brute force: find c_n making G(E) - E(a1 X) vanish at X^n.
inline QSeries koenigs(const QSeries& g, std::size_t order) {
  QSeries e(order + 1, 0);
  e[1] = 1;
  const mpq_class a1 = g[1];
  for (std::size_t n = 2; n <= order; ++n) {
    // with c_n = 0 the X^n coefficient of G(E) - E(a1 X) is d; it is linear in c_n with slope a1 - a1^n
    const QSeries lhs = compose(g, e, n);
    mpq_class a1n = 1;
    for (std::size_t k = 0; k < n; ++k) a1n *= a1;
    e[n] = lhs[n] / (a1n - a1);
  }
  return e;
}

/// Compositional inverse by fixed-point iteration g <- g + (X - f(g)) / f1.
inline QSeries reversion(const QSeries& f, std::size_t order) {
  QSeries g(order + 1, 0);
  g[1] = 1 / f[1];
  for (std::size_t round = 0; round <= order; ++round) {
    const QSeries fg = compose(f, g, order);
    for (std::size_t n = 1; n <= order; ++n) {
      const mpq_class target = n == 1 ? mpq_class(1) : mpq_class(0);
      g[n] += (target - fg[n]) / f[1];
    }
  }
  return g;
}

inline mpz_class random_integer(std::mt19937_64& rng, const mpz_class& bound) {
  gmp_randclass r(gmp_randinit_mt);
  r.seed(static_cast<unsigned long>(rng()));
  return r.get_z_range(bound);
}

inline mpz_class ipow(long p, long k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
  return r;
}

/// Random integer p^k * u with u a unit below p^digits.
inline mpz_class random_with_valuation(std::mt19937_64& rng, long p, long k, long digits = 20) {
  mpz_class u;
  do {
    u = random_integer(rng, ipow(p, digits));
  } while (u % p == 0);
  return ipow(p, k) * u;
}

}  // namespace padyn::oracle

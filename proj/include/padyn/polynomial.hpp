#pragma once

#include <padyn/padic.hpp>
#include <padyn/series.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace padyn {

/// Univariate polynomial over Q_p, degree-ascending coefficients.
class Polynomial {
 public:
  Polynomial(PadicContext ctx, std::vector<PadicNumber> coefficients)
      : ctx_(std::move(ctx)), coeffs_(std::move(coefficients)) {
    while (!coeffs_.empty() && coeffs_.back().is_exact_zero()) coeffs_.pop_back();
  }

  static Polynomial monomial(const PadicNumber& c, std::size_t degree) {
    std::vector<PadicNumber> v(degree + 1, PadicNumber::zero(c.context()));
    v[degree] = c;
    return Polynomial(c.context(), std::move(v));
  }

  const PadicContext& context() const { return ctx_; }
  /// -1 for the zero polynomial.
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
  const std::vector<PadicNumber>& coefficients() const { return coeffs_; }

  PadicNumber coefficient(long i) const {
    if (i < 0 || i > degree()) return PadicNumber::zero(ctx_);
    return coeffs_[static_cast<std::size_t>(i)];
  }

  PadicNumber operator()(const PadicNumber& z) const {
    if (coeffs_.empty()) return PadicNumber::zero(ctx_);
    PadicNumber acc = coeffs_.back();
    for (long i = degree() - 1; i >= 0; --i) acc = acc * z + coeffs_[static_cast<std::size_t>(i)];
    return acc;
  }

  Polynomial derivative() const {
    std::vector<PadicNumber> d;
    for (long i = 1; i <= degree(); ++i) {
      d.push_back(PadicNumber::from_integer(ctx_, i) * coeffs_[static_cast<std::size_t>(i)]);
    }
    return Polynomial(ctx_, std::move(d));
  }

  /// P(X + c).
  Polynomial taylor_shift(const PadicNumber& c) const {
    std::vector<PadicNumber> out(coeffs_.size(), PadicNumber::zero(ctx_));
    // Horner over polynomials: out = out * (X + c) + a_i
    for (long i = degree(); i >= 0; --i) {
      for (long j = degree() - i; j >= 1; --j) {
        out[static_cast<std::size_t>(j)] = out[static_cast<std::size_t>(j)] * c + out[static_cast<std::size_t>(j - 1)];
      }
      out[0] = out[0] * c + coeffs_[static_cast<std::size_t>(i)];
    }
    return Polynomial(ctx_, std::move(out));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<PadicNumber> c;
    const long d = std::max(a.degree(), b.degree());
    for (long i = 0; i <= d; ++i) c.push_back(a.coefficient(i) + b.coefficient(i));
    return Polynomial(a.ctx_, std::move(c));
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<PadicNumber> c;
    const long d = std::max(a.degree(), b.degree());
    for (long i = 0; i <= d; ++i) c.push_back(a.coefficient(i) - b.coefficient(i));
    return Polynomial(a.ctx_, std::move(c));
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.degree() < 0 || b.degree() < 0) return Polynomial(a.ctx_, {});
    std::vector<PadicNumber> c(static_cast<std::size_t>(a.degree() + b.degree() + 1), PadicNumber::zero(a.ctx_));
    for (long i = 0; i <= a.degree(); ++i) {
      for (long j = 0; j <= b.degree(); ++j) {
        c[static_cast<std::size_t>(i + j)] += a.coeffs_[static_cast<std::size_t>(i)] * b.coeffs_[static_cast<std::size_t>(j)];
      }
    }
    return Polynomial(a.ctx_, std::move(c));
  }

  /// P(Q(X)).
  Polynomial compose(const Polynomial& inner) const {
    Polynomial acc(ctx_, {});
    for (long i = degree(); i >= 0; --i) {
      acc = acc * inner + Polynomial(ctx_, {coeffs_[static_cast<std::size_t>(i)]});
    }
    return acc;
  }

  TruncatedSeries to_series(long order) const { return TruncatedSeries::from_polynomial(coeffs_, ctx_, order); }

  std::string to_string() const {
    std::string out;
    for (long i = 0; i <= degree(); ++i) {
      if (coeffs_[static_cast<std::size_t>(i)].is_exact_zero()) continue;
      if (!out.empty()) out += " + ";
      out += "(" + coeffs_[static_cast<std::size_t>(i)].to_string() + ")*X^" + std::to_string(i);
    }
    return out.empty() ? std::string("0") : out;
  }

 private:
  PadicContext ctx_;
  std::vector<PadicNumber> coeffs_;
};

/// g-variate polynomial; terms keyed by exponent vector, exact zeros never stored.
class MultivariatePoly {
 public:
  using Exponents = std::vector<unsigned>;

  MultivariatePoly(PadicContext ctx, std::size_t variables) : ctx_(std::move(ctx)), variables_(variables) {}

  const PadicContext& context() const { return ctx_; }
  std::size_t variables() const { return variables_; }
  const std::map<Exponents, PadicNumber>& terms() const { return terms_; }

  /// Adds coefficient * X^exponents, merging with an existing term.
  void add_term(const Exponents& exponents, const PadicNumber& coefficient) {
    if (exponents.size() != variables_) throw DomainError("exponent vector length differs from variable count");
    auto it = terms_.find(exponents);
    if (it == terms_.end()) {
      if (!coefficient.is_exact_zero()) terms_.emplace(exponents, coefficient);
      return;
    }
    it->second += coefficient;
    if (it->second.is_exact_zero()) terms_.erase(it);
  }

  PadicNumber operator()(const std::vector<PadicNumber>& point) const {
    if (point.size() != variables_) throw DomainError("point dimension differs from variable count");
    PadicNumber acc = PadicNumber::zero(ctx_);
    for (const auto& [e, c] : terms_) {
      PadicNumber term = c;
      for (std::size_t i = 0; i < variables_; ++i) {
        if (e[i] != 0) term *= point[i].pow(e[i]);
      }
      acc += term;
    }
    return acc;
  }

  /// Substitutes one series per variable.
  TruncatedSeries substitute(const std::vector<TruncatedSeries>& series) const {
    if (series.size() != variables_) throw DomainError("series count differs from variable count");
    long order = series.empty() ? 0 : series.front().order();
    for (const auto& s : series) order = std::min(order, s.order());
    // powers[i][k] = series[i]^k, built on demand
    std::vector<std::vector<TruncatedSeries>> powers(variables_);
    auto power = [&](std::size_t i, unsigned k) -> const TruncatedSeries& {
      auto& row = powers[i];
      if (row.empty()) row.push_back(TruncatedSeries::constant(PadicNumber::one(ctx_), order));
      while (row.size() <= k) row.push_back(row.back() * series[i]);
      return row[k];
    };
    TruncatedSeries acc = TruncatedSeries::zero(ctx_, order);
    for (const auto& [e, c] : terms_) {
      TruncatedSeries term = TruncatedSeries::constant(c, order);
      for (std::size_t i = 0; i < variables_; ++i) {
        if (e[i] != 0) term = term * power(i, e[i]);
      }
      acc = acc + term;
    }
    return acc;
  }

  /// Variable j of the result is variable perm[j] of this polynomial.
  MultivariatePoly permuted(const std::vector<std::size_t>& perm) const {
    MultivariatePoly out(ctx_, variables_);
    for (const auto& [e, c] : terms_) {
      Exponents f(variables_);
      for (std::size_t j = 0; j < variables_; ++j) f[j] = e[perm[j]];
      out.add_term(f, c);
    }
    return out;
  }

 private:
  PadicContext ctx_;
  std::size_t variables_;
  std::map<Exponents, PadicNumber> terms_;
};

}  // namespace padyn

#pragma once

// Capped-relative-precision arithmetic in Q_p.
//
// A nonzero element is p^v * u + O(p^(v+k)) with u a unit modulo p^k and
// k <= N, the working precision of its context.  A zero is "zero to absolute
// precision m", i.e. O(p^m); the exact zero has m = kInfinitePrecision.
// Every decision that precision cannot settle throws PrecisionError.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace padyn {

inline constexpr long kInfinitePrecision = std::numeric_limits<long>::max() / 4;

class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace detail

/// Deterministic Miller-Rabin; the base set is exact for all 64-bit inputs.
inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t small : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % small == 0) return n == small;
  }
  const auto m = static_cast<std::uint64_t>(n);
  std::uint64_t d = m - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = detail::powmod(a, d, m);
    if (x == 1 || x == m - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = detail::mulmod(x, x, m);
      if (x == m - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// Exponent of p in n (n != 0).
inline long integer_valuation(mpz_class n, const mpz_class& p) {
  if (n == 0) throw DomainError("valuation of integer zero");
  mpz_class rest;
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

namespace detail {

struct ContextData {
  std::int64_t prime;
  long precision;
  mpz_class prime_z;
  std::vector<mpz_class> powers;  // p^0 .. p^precision
};

}  // namespace detail

/// The prime p and the number N of significant base-p digits carried.
class PadicContext {
 public:
  PadicContext(std::int64_t prime, long working_precision) {
    if (!is_prime(prime)) throw DomainError("p = " + std::to_string(prime) + " is not prime");
    if (working_precision < 1) throw DomainError("working precision must be at least 1");
    auto data = std::make_shared<detail::ContextData>();
    data->prime = prime;
    data->precision = working_precision;
    data->prime_z = mpz_class(static_cast<long>(prime));
    data->powers.reserve(static_cast<std::size_t>(working_precision) + 1);
    mpz_class acc = 1;
    for (long k = 0; k <= working_precision; ++k) {
      data->powers.push_back(acc);
      acc *= data->prime_z;
    }
    data_ = std::move(data);
  }

  std::int64_t prime() const { return data_->prime; }
  long working_precision() const { return data_->precision; }
  const mpz_class& prime_z() const { return data_->prime_z; }

  /// p^k for 0 <= k <= N.
  const mpz_class& prime_power(long k) const {
    if (k < 0 || k > data_->precision) throw std::out_of_range("prime power outside cached range");
    return data_->powers[static_cast<std::size_t>(k)];
  }

  friend bool operator==(const PadicContext& a, const PadicContext& b) {
    return a.data_ == b.data_ ||
           (a.data_->prime == b.data_->prime && a.data_->precision == b.data_->precision);
  }

 private:
  friend class PadicNumber;
  explicit PadicContext(std::shared_ptr<const detail::ContextData> data) : data_(std::move(data)) {}
  std::shared_ptr<const detail::ContextData> data_;
};

class PadicNumber {
 public:
  /// Exact zero.
  static PadicNumber zero(const PadicContext& ctx) { return PadicNumber(ctx.data_, kInfinitePrecision, 0, 0); }

  /// O(p^absolute_precision).
  static PadicNumber zero(const PadicContext& ctx, long absolute_precision) {
    return PadicNumber(ctx.data_, absolute_precision, 0, 0);
  }

  static PadicNumber one(const PadicContext& ctx) { return from_integer(ctx, 1); }

  static PadicNumber from_integer(const PadicContext& ctx, const mpz_class& n) {
    return from_rational(ctx, n, mpz_class(1));
  }

  /// Image of numerator/denominator at full working precision.
  static PadicNumber from_rational(const PadicContext& ctx, mpz_class numerator, mpz_class denominator) {
    if (denominator == 0) throw DomainError("zero denominator");
    if (numerator == 0) return zero(ctx);
    const mpz_class& p = ctx.prime_z();
    long v = 0;
    v += static_cast<long>(mpz_remove(numerator.get_mpz_t(), numerator.get_mpz_t(), p.get_mpz_t()));
    v -= static_cast<long>(mpz_remove(denominator.get_mpz_t(), denominator.get_mpz_t(), p.get_mpz_t()));
    const long n = ctx.working_precision();
    const mpz_class& modulus = ctx.prime_power(n);
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), denominator.get_mpz_t(), modulus.get_mpz_t());
    mpz_class u = numerator * inv;
    mpz_mod(u.get_mpz_t(), u.get_mpz_t(), modulus.get_mpz_t());
    return PadicNumber(ctx.data_, v, n, std::move(u));
  }

  static PadicNumber from_rational(const PadicContext& ctx, long numerator, long denominator) {
    return from_rational(ctx, mpz_class(numerator), mpz_class(denominator));
  }

  /// Parses "a" or "a/b" with optional sign.
  static PadicNumber parse(const PadicContext& ctx, std::string_view text) {
    std::string s(text);
    const auto slash = s.find('/');
    mpz_class num, den(1);
    auto read = [&](const std::string& part, mpz_class& out) {
      if (part.empty() || out.set_str(part, 10) != 0) {
        throw DomainError("malformed rational '" + s + "'");
      }
    };
    if (slash == std::string::npos) {
      read(s, num);
    } else {
      read(s.substr(0, slash), num);
      read(s.substr(slash + 1), den);
    }
    return from_rational(ctx, num, den);
  }

  /// p^valuation * unit + O(p^(valuation + relative_precision)); unit must be prime to p.
  static PadicNumber from_parts(const PadicContext& ctx, long valuation, mpz_class unit, long relative_precision) {
    if (relative_precision < 1) throw DomainError("relative precision must be positive");
    relative_precision = std::min(relative_precision, ctx.working_precision());
    const mpz_class& modulus = ctx.prime_power(relative_precision);
    mpz_mod(unit.get_mpz_t(), unit.get_mpz_t(), modulus.get_mpz_t());
    if (mpz_divisible_p(unit.get_mpz_t(), ctx.prime_z().get_mpz_t())) throw DomainError("unit part divisible by p");
    return PadicNumber(ctx.data_, valuation, relative_precision, std::move(unit));
  }

  PadicContext context() const { return PadicContext(ctx_); }
  std::int64_t prime() const { return ctx_->prime; }

  /// Indistinguishable from zero at the tracked precision.
  bool is_zero() const { return precision_ == 0; }
  bool is_exact_zero() const { return precision_ == 0 && valuation_ >= kInfinitePrecision; }

  /// Exact valuation; throws if the value is indistinguishable from zero.
  long valuation() const {
    if (is_zero()) {
      throw PrecisionError("valuation undecidable: value is O(p^" + absolute_precision_string() + ")");
    }
    return valuation_;
  }

  /// Valuation for nonzero values, absolute precision for zeros.
  long valuation_lower_bound() const { return valuation_; }

  long relative_precision() const { return precision_; }
  long absolute_precision() const { return is_zero() ? valuation_ : valuation_ + precision_; }

  const mpz_class& unit() const { return unit_; }

  /// Base-p digits of the unit part, least significant first.
  std::vector<std::int64_t> unit_digits(long count) const {
    std::vector<std::int64_t> out;
    mpz_class rest = unit_;
    for (long i = 0; i < std::min(count, precision_); ++i) {
      mpz_class d;
      mpz_fdiv_qr(rest.get_mpz_t(), d.get_mpz_t(), rest.get_mpz_t(), ctx_->prime_z.get_mpz_t());
      out.push_back(d.get_si());
    }
    return out;
  }

  /// Forget digits at and beyond p^m.
  PadicNumber with_absolute_cap(long m) const {
    if (m >= absolute_precision()) return *this;
    if (is_zero() || m <= valuation_) return PadicNumber(ctx_, m, 0, 0);
    const long k = m - valuation_;
    mpz_class u = unit_ % ctx_->powers[static_cast<std::size_t>(k)];
    return PadicNumber(ctx_, valuation_, k, std::move(u));
  }

  PadicNumber operator-() const {
    if (is_zero()) return *this;
    mpz_class u = ctx_->powers[static_cast<std::size_t>(precision_)] - unit_;
    return PadicNumber(ctx_, valuation_, precision_, std::move(u));
  }

  friend PadicNumber operator+(const PadicNumber& x, const PadicNumber& y) {
    x.require_same(y);
    if (x.is_exact_zero()) return y;
    if (y.is_exact_zero()) return x;
    const long abs = std::min(x.absolute_precision(), y.absolute_precision());
    if (x.is_zero()) return y.with_absolute_cap(abs);
    if (y.is_zero()) return x.with_absolute_cap(abs);
    const long vmin = std::min(x.valuation_, y.valuation_);
    const long target = abs - vmin;
    if (target <= 0) return PadicNumber(x.ctx_, abs, 0, 0);
    const auto& pw = x.ctx_->powers;
    mpz_class sum = 0;
    for (const PadicNumber* t : {&x, &y}) {
      const long shift = t->valuation_ - vmin;
      if (shift >= target) continue;
      if (shift == 0) {
        sum += t->unit_;
      } else {
        sum += t->unit_ * pw[static_cast<std::size_t>(shift)];
      }
    }
    const mpz_class& modulus = pw[static_cast<std::size_t>(target)];
    if (sum >= modulus) mpz_mod(sum.get_mpz_t(), sum.get_mpz_t(), modulus.get_mpz_t());
    if (sum == 0) return PadicNumber(x.ctx_, abs, 0, 0);
    const long e = static_cast<long>(
        mpz_remove(sum.get_mpz_t(), sum.get_mpz_t(), x.ctx_->prime_z.get_mpz_t()));
    return PadicNumber(x.ctx_, vmin + e, target - e, std::move(sum));
  }

  friend PadicNumber operator-(const PadicNumber& x, const PadicNumber& y) { return x + (-y); }

  friend PadicNumber operator*(const PadicNumber& x, const PadicNumber& y) {
    x.require_same(y);
    if (x.is_exact_zero() || y.is_exact_zero()) return PadicNumber(x.ctx_, kInfinitePrecision, 0, 0);
    if (x.is_zero() || y.is_zero()) {
      return PadicNumber(x.ctx_, x.valuation_ + y.valuation_, 0, 0);
    }
    const long k = std::min(x.precision_, y.precision_);
    mpz_class u = x.unit_ * y.unit_;
    mpz_mod(u.get_mpz_t(), u.get_mpz_t(), x.ctx_->powers[static_cast<std::size_t>(k)].get_mpz_t());
    return PadicNumber(x.ctx_, x.valuation_ + y.valuation_, k, std::move(u));
  }

  friend PadicNumber operator/(const PadicNumber& x, const PadicNumber& y) {
    x.require_same(y);
    if (y.is_exact_zero()) throw DomainError("division by zero");
    if (y.is_zero()) throw PrecisionError("division by a value indistinguishable from zero");
    if (x.is_exact_zero()) return x;
    if (x.is_zero()) return PadicNumber(x.ctx_, x.valuation_ - y.valuation_, 0, 0);
    const long k = std::min(x.precision_, y.precision_);
    const mpz_class& modulus = x.ctx_->powers[static_cast<std::size_t>(k)];
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), y.unit_.get_mpz_t(), modulus.get_mpz_t());
    mpz_class u = x.unit_ * inv;
    mpz_mod(u.get_mpz_t(), u.get_mpz_t(), modulus.get_mpz_t());
    return PadicNumber(x.ctx_, x.valuation_ - y.valuation_, k, std::move(u));
  }

  PadicNumber& operator+=(const PadicNumber& y) { return *this = *this + y; }
  PadicNumber& operator-=(const PadicNumber& y) { return *this = *this - y; }
  PadicNumber& operator*=(const PadicNumber& y) { return *this = *this * y; }
  PadicNumber& operator/=(const PadicNumber& y) { return *this = *this / y; }

  PadicNumber pow(unsigned long n) const {
    if (n == 0) return PadicNumber::one(context());
    if (is_exact_zero()) return *this;
    if (is_zero()) return PadicNumber(ctx_, valuation_ * static_cast<long>(n), 0, 0);
    mpz_class u;
    mpz_powm_ui(u.get_mpz_t(), unit_.get_mpz_t(), n, ctx_->powers[static_cast<std::size_t>(precision_)].get_mpz_t());
    return PadicNumber(ctx_, valuation_ * static_cast<long>(n), precision_, std::move(u));
  }

  /// Equal to the precision of both operands.
  bool equals_to_precision(const PadicNumber& other) const { return (*this - other).is_zero(); }

  /// Bitwise identity of the representation.
  friend bool operator==(const PadicNumber& a, const PadicNumber& b) {
    return a.ctx_->prime == b.ctx_->prime && a.valuation_ == b.valuation_ && a.precision_ == b.precision_ &&
           a.unit_ == b.unit_;
  }

  std::string to_string() const {
    if (is_exact_zero()) return "0";
    if (is_zero()) return "O(" + std::to_string(ctx_->prime) + "^" + std::to_string(valuation_) + ")";
    return std::to_string(ctx_->prime) + "^" + std::to_string(valuation_) + "*" + unit_.get_str() + " + O(" +
           std::to_string(ctx_->prime) + "^" + std::to_string(valuation_ + precision_) + ")";
  }

 private:
  PadicNumber(std::shared_ptr<const detail::ContextData> ctx, long valuation, long precision, mpz_class unit)
      : ctx_(std::move(ctx)), valuation_(valuation), precision_(precision), unit_(std::move(unit)) {
    if (precision_ > ctx_->precision) {
      precision_ = ctx_->precision;
      unit_ %= ctx_->powers[static_cast<std::size_t>(precision_)];
    }
    if (precision_ == 0) {
      unit_ = 0;
      valuation_ = std::min(valuation_, kInfinitePrecision);
    }
  }

  void require_same(const PadicNumber& other) const {
    if (ctx_ != other.ctx_ && (ctx_->prime != other.ctx_->prime || ctx_->precision != other.ctx_->precision)) {
      throw DomainError("p-adic operands from different contexts");
    }
  }

  std::string absolute_precision_string() const {
    return is_exact_zero() ? std::string("inf") : std::to_string(valuation_);
  }

  std::shared_ptr<const detail::ContextData> ctx_;
  long valuation_ = 0;   // absolute precision when zero
  long precision_ = 0;   // relative precision; 0 marks a zero
  mpz_class unit_;
};

/// {z : v(z - center) >= radius_valuation}.
struct Ball {
  PadicNumber center;
  long radius_valuation;

  /// Throws PrecisionError when v(z - center) is not decidable against the cutoff.
  bool contains(const PadicNumber& z) const {
    const PadicNumber d = z - center;
    if (d.is_zero()) {
      if (d.absolute_precision() >= radius_valuation) return true;
      throw PrecisionError("ball membership undecidable: distance is O(p^" +
                           std::to_string(d.absolute_precision()) + "), cutoff " +
                           std::to_string(radius_valuation));
    }
    return d.valuation() >= radius_valuation;
  }
};

/// v(b^n - b) in closed form for v(b) >= 1: b^(n-1) - 1 is then a unit.
inline long schinzel_valuation(const PadicNumber& b, long n) {
  if (n < 2) throw DomainError("schinzel_valuation needs n >= 2");
  if (b.is_zero()) throw PrecisionError("schinzel_valuation of a value indistinguishable from zero");
  if (b.valuation() < 1) throw DomainError("schinzel_valuation implemented only for v(b) >= 1");
  return b.valuation();
}

/// Executable form of v(beta^n - 1) = v(beta - 1) + v_p(n) for v(beta - 1) >= 2.
inline bool norm_identity_check(const PadicNumber& beta, long n) {
  if (n < 1) throw DomainError("norm_identity_check needs n >= 1");
  const PadicContext ctx = beta.context();
  const PadicNumber one = PadicNumber::one(ctx);
  const PadicNumber base = beta - one;
  if (base.valuation_lower_bound() < 2) throw DomainError("norm_identity_check needs v(beta - 1) >= 2");
  const PadicNumber lhs = beta.pow(static_cast<unsigned long>(n)) - one;
  if (base.is_zero()) return lhs.is_zero();
  if (lhs.is_zero()) throw PrecisionError("beta^n - 1 exhausted the working precision");
  return lhs.valuation() == base.valuation() + integer_valuation(mpz_class(n), ctx.prime_z());
}

}  // namespace padyn

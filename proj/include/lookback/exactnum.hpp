#pragma once

#include <gmpxx.h>

#include <compare>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace lookback {

enum class NumericMode { Exact, LogSigned };

std::string_view mode_name(NumericMode mode);
NumericMode parse_mode(std::string_view text);

/// value = sign * exp(log_abs); sign 0 is exactly zero whatever log_abs holds.
struct LogValue {
  int sign = 0;
  double log_abs = 0.0;
};

/// Below this relative magnitude an opposite-sign LogSigned sum counts as a
/// cancellation event.
inline constexpr double kCancellationThreshold = 1e-13;

/// Number of LogSigned additions whose result lost more than 13 digits.
std::uint64_t precision_warning_count();
void reset_precision_warnings();

/*
 * Scalar used by every formula in the library.
 *
 * Exact mode holds a GMP rational in lowest terms. LogSigned mode holds a
 * sign and the natural log of the magnitude, which keeps super-exponential
 * quantities (Stirling numbers, factorials) representable as doubles.
 *
 * Binary operations on mixed modes promote the exact operand to LogSigned.
 */
class ExactScalar {
 public:
  ExactScalar() : value_(mpq_class(0)) {}

  template <std::signed_integral I>
  ExactScalar(I v) : value_(mpq_class(mpz_class(static_cast<long>(v)))) {}

  template <std::unsigned_integral I>
  ExactScalar(I v) : value_(mpq_class(mpz_class(static_cast<unsigned long>(v)))) {}

  explicit ExactScalar(mpq_class q);
  explicit ExactScalar(const mpz_class& z) : ExactScalar(mpq_class(z)) {}

  static ExactScalar from_log(int sign, double log_abs);
  static ExactScalar from_double(double v);

  /// Accepts "p", "p/q", decimals ("0.75", "-1.5e-3"); decimals are read
  /// exactly as rationals. In LogSigned mode the parsed rational is converted.
  static ExactScalar parse(std::string_view text,
                           NumericMode mode = NumericMode::Exact);

  NumericMode mode() const {
    return std::holds_alternative<mpq_class>(value_) ? NumericMode::Exact
                                                     : NumericMode::LogSigned;
  }
  bool is_exact() const { return mode() == NumericMode::Exact; }

  ExactScalar to_mode(NumericMode target) const;
  LogValue as_log() const;

  /// Throws std::logic_error in LogSigned mode.
  const mpq_class& rational() const;

  int sign() const;
  bool is_zero() const { return sign() == 0; }
  double to_double() const;
  double log_abs() const { return as_log().log_abs; }
  ExactScalar abs() const;

  /// Exact: "p" or "p/q". LogSigned: shortest round-trip decimal.
  /// decimal_digits >= 0 forces decimal rendering with that many significant
  /// digits in either mode.
  std::string to_string(int decimal_digits = -1) const;

  /// Stable identity string, used for cache keys.
  std::string key() const;

  ExactScalar operator-() const;
  ExactScalar& operator+=(const ExactScalar& rhs);
  ExactScalar& operator-=(const ExactScalar& rhs);
  ExactScalar& operator*=(const ExactScalar& rhs);
  /// Throws std::domain_error on division by zero.
  ExactScalar& operator/=(const ExactScalar& rhs);

  friend ExactScalar operator+(ExactScalar lhs, const ExactScalar& rhs) { return lhs += rhs; }
  friend ExactScalar operator-(ExactScalar lhs, const ExactScalar& rhs) { return lhs -= rhs; }
  friend ExactScalar operator*(ExactScalar lhs, const ExactScalar& rhs) { return lhs *= rhs; }
  friend ExactScalar operator/(ExactScalar lhs, const ExactScalar& rhs) { return lhs /= rhs; }

  friend bool operator==(const ExactScalar& a, const ExactScalar& b);
  friend std::partial_ordering operator<=>(const ExactScalar& a, const ExactScalar& b);

 private:
  std::variant<mpq_class, LogValue> value_;
};

ExactScalar pow(const ExactScalar& base, unsigned exponent);

/// (x)_s = x(x+1)...(x+s-1)
ExactScalar rising_factorial(const ExactScalar& x, unsigned s);
/// (x)_{s↓} = x(x-1)...(x-s+1)
ExactScalar falling_factorial(const ExactScalar& x, unsigned s);
/// x(x+step)(x+2step)...(x+(j-1)step); step 0 gives x^j.
ExactScalar generalized_rising(const ExactScalar& x, unsigned j, const ExactScalar& step);

mpz_class factorial(unsigned n);
/// Zero outside 0 <= k <= n.
mpz_class binomial(long n, long k);

/// Discount parameter of a Gibbs-type prior, strictly below 1.
class Alpha {
 public:
  /// Throws std::domain_error unless value < 1.
  explicit Alpha(ExactScalar value);
  static Alpha parse(std::string_view text, NumericMode mode = NumericMode::Exact);

  const ExactScalar& value() const { return value_; }
  NumericMode mode() const { return value_.mode(); }
  Alpha to_mode(NumericMode target) const { return Alpha(value_.to_mode(target)); }

  friend bool operator==(const Alpha&, const Alpha&) = default;

 private:
  ExactScalar value_;
};

}  // namespace lookback

#include "lookback/exactnum.hpp"

#include <gmp.h>

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lookback {

namespace {

std::atomic<std::uint64_t> g_precision_warnings{0};

double log_mpz(const mpz_class& z) {
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

LogValue rational_to_log(const mpq_class& q) {
  int s = sgn(q);
  if (s == 0) return {};
  return {s, log_mpz(q.get_num()) - log_mpz(q.get_den())};
}

LogValue log_add(LogValue a, LogValue b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  if (a.log_abs < b.log_abs) std::swap(a, b);
  const double d = b.log_abs - a.log_abs;
  if (a.sign == b.sign) return {a.sign, a.log_abs + std::log1p(std::exp(d))};
  const double rel = -std::expm1(d);
  if (rel < kCancellationThreshold) {
    g_precision_warnings.fetch_add(1, std::memory_order_relaxed);
    if (rel <= 0.0) return {};
  }
  return {a.sign, a.log_abs + std::log(rel)};
}

mpq_class parse_rational(std::string_view text) {
  auto fail = [&] {
    return std::invalid_argument("not a rational number: '" + std::string(text) + "'");
  };
  if (text.empty()) throw fail();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto is_int = [](std::string_view s) {
      if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
      if (s.empty()) return false;
      for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
      return true;
    };
    std::string_view num = text.substr(0, slash), den = text.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) throw fail();
    if (num.front() == '+') num.remove_prefix(1);
    if (den.front() == '+') den.remove_prefix(1);
    mpz_class p{std::string(num), 10}, q{std::string(den), 10};
    if (q == 0) throw std::domain_error("zero denominator in '" + std::string(text) + "'");
    mpq_class out(p, q);
    out.canonicalize();
    return out;
  }

  // Decimal: [sign] digits [. digits] [e|E [sign] digits]
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') negative = text[i++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_digit = false;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    digits += text[i++];
    seen_digit = true;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      digits += text[i++];
      --scale;
      seen_digit = true;
    }
  }
  if (!seen_digit) throw fail();
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) exp_negative = text[i++] == '-';
    if (i == text.size()) throw fail();
    long exponent = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      exponent = exponent * 10 + (text[i++] - '0');
      if (exponent > 100000) throw fail();
    }
    scale += exp_negative ? -exponent : exponent;
  }
  if (i != text.size()) throw fail();

  mpz_class mantissa(digits, 10);
  if (negative) mantissa = -mantissa;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  mpq_class out = scale < 0 ? mpq_class(mantissa, ten_pow) : mpq_class(mantissa * ten_pow);
  out.canonicalize();
  return out;
}

std::string format_log_decimal(LogValue v, int digits) {
  if (v.sign == 0) return "0";
  const double log10v = v.log_abs / std::log(10.0);
  char buf[400];
  if (std::fabs(log10v) < 300) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v.sign * std::exp(v.log_abs));
    return buf;
  }
  double exponent = std::floor(log10v);
  double mant = std::pow(10.0, log10v - exponent);
  const int mant_digits = digits - 1 > 0 ? digits - 1 : 1;
  if (mant >= 10.0 - 5.0 * std::pow(10.0, -mant_digits)) {
    mant /= 10.0;
    exponent += 1.0;
  }
  std::snprintf(buf, sizeof buf, "%s%.*ge%+.0f", v.sign < 0 ? "-" : "", mant_digits, mant, exponent);
  return buf;
}

}  // namespace

std::string_view mode_name(NumericMode mode) {
  return mode == NumericMode::Exact ? "exact" : "log";
}

NumericMode parse_mode(std::string_view text) {
  if (text == "exact") return NumericMode::Exact;
  if (text == "log") return NumericMode::LogSigned;
  throw std::invalid_argument("unknown numeric mode '" + std::string(text) + "' (expected exact|log)");
}

std::uint64_t precision_warning_count() { return g_precision_warnings.load(); }
void reset_precision_warnings() { g_precision_warnings.store(0); }

ExactScalar::ExactScalar(mpq_class q) : value_(std::move(q)) {
  std::get<mpq_class>(value_).canonicalize();
}

ExactScalar ExactScalar::from_log(int sign, double log_abs) {
  if (sign < -1 || sign > 1) throw std::invalid_argument("log sign must be -1, 0 or +1");
  if (sign != 0 && !std::isfinite(log_abs))
    throw std::domain_error("non-finite log magnitude");
  ExactScalar out;
  out.value_ = sign == 0 ? LogValue{} : LogValue{sign, log_abs};
  return out;
}

ExactScalar ExactScalar::from_double(double v) {
  if (!std::isfinite(v)) throw std::domain_error("non-finite double");
  if (v == 0.0) return from_log(0, 0.0);
  return from_log(v < 0 ? -1 : 1, std::log(std::fabs(v)));
}

ExactScalar ExactScalar::parse(std::string_view text, NumericMode mode) {
  return ExactScalar(parse_rational(text)).to_mode(mode);
}

ExactScalar ExactScalar::to_mode(NumericMode target) const {
  if (target == mode()) return *this;
  if (target == NumericMode::LogSigned) {
    LogValue v = as_log();
    return from_log(v.sign, v.log_abs);
  }
  throw std::logic_error("cannot convert a LogSigned value back to an exact rational");
}

LogValue ExactScalar::as_log() const {
  if (const auto* q = std::get_if<mpq_class>(&value_)) return rational_to_log(*q);
  return std::get<LogValue>(value_);
}

const mpq_class& ExactScalar::rational() const {
  if (const auto* q = std::get_if<mpq_class>(&value_)) return *q;
  throw std::logic_error("rational() called on a LogSigned value");
}

int ExactScalar::sign() const {
  if (const auto* q = std::get_if<mpq_class>(&value_)) return sgn(*q);
  return std::get<LogValue>(value_).sign;
}

double ExactScalar::to_double() const {
  if (const auto* q = std::get_if<mpq_class>(&value_)) return q->get_d();
  const auto& v = std::get<LogValue>(value_);
  return v.sign == 0 ? 0.0 : v.sign * std::exp(v.log_abs);
}

ExactScalar ExactScalar::abs() const {
  return sign() < 0 ? -*this : *this;
}

std::string ExactScalar::to_string(int decimal_digits) const {
  if (const auto* q = std::get_if<mpq_class>(&value_)) {
    if (decimal_digits < 0) return q->get_str();
    if (sgn(*q) == 0) return "0";
    mpf_class f(*q, 1024);
    std::vector<char> buf(static_cast<std::size_t>(decimal_digits) + 64);
    gmp_snprintf(buf.data(), buf.size(), "%.*Fg", decimal_digits, f.get_mpf_t());
    return buf.data();
  }
  const auto& v = std::get<LogValue>(value_);
  return format_log_decimal(v, decimal_digits < 0 ? 17 : decimal_digits);
}

std::string ExactScalar::key() const {
  if (const auto* q = std::get_if<mpq_class>(&value_)) return "q:" + q->get_str();
  const auto& v = std::get<LogValue>(value_);
  if (v.sign == 0) return "l:0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "l:%d:%a", v.sign, v.log_abs);
  return buf;
}

ExactScalar ExactScalar::operator-() const {
  ExactScalar out = *this;
  if (auto* q = std::get_if<mpq_class>(&out.value_))
    *q = -*q;
  else
    std::get<LogValue>(out.value_).sign *= -1;
  return out;
}

ExactScalar& ExactScalar::operator+=(const ExactScalar& rhs) {
  auto* a = std::get_if<mpq_class>(&value_);
  const auto* b = std::get_if<mpq_class>(&rhs.value_);
  if (a && b) {
    *a += *b;
    return *this;
  }
  value_ = log_add(as_log(), rhs.as_log());
  return *this;
}

ExactScalar& ExactScalar::operator-=(const ExactScalar& rhs) { return *this += -rhs; }

ExactScalar& ExactScalar::operator*=(const ExactScalar& rhs) {
  auto* a = std::get_if<mpq_class>(&value_);
  const auto* b = std::get_if<mpq_class>(&rhs.value_);
  if (a && b) {
    *a *= *b;
    return *this;
  }
  LogValue x = as_log(), y = rhs.as_log();
  if (x.sign == 0 || y.sign == 0)
    value_ = LogValue{};
  else
    value_ = LogValue{x.sign * y.sign, x.log_abs + y.log_abs};
  return *this;
}

ExactScalar& ExactScalar::operator/=(const ExactScalar& rhs) {
  if (rhs.is_zero()) throw std::domain_error("division by zero");
  auto* a = std::get_if<mpq_class>(&value_);
  const auto* b = std::get_if<mpq_class>(&rhs.value_);
  if (a && b) {
    *a /= *b;
    return *this;
  }
  LogValue x = as_log(), y = rhs.as_log();
  if (x.sign == 0)
    value_ = LogValue{};
  else
    value_ = LogValue{x.sign * y.sign, x.log_abs - y.log_abs};
  return *this;
}

bool operator==(const ExactScalar& a, const ExactScalar& b) {
  const auto* x = std::get_if<mpq_class>(&a.value_);
  const auto* y = std::get_if<mpq_class>(&b.value_);
  if (x && y) return *x == *y;
  LogValue u = a.as_log(), v = b.as_log();
  if (u.sign != v.sign) return false;
  return u.sign == 0 || u.log_abs == v.log_abs;
}

std::partial_ordering operator<=>(const ExactScalar& a, const ExactScalar& b) {
  const auto* x = std::get_if<mpq_class>(&a.value_);
  const auto* y = std::get_if<mpq_class>(&b.value_);
  if (x && y) return cmp(*x, *y) <=> 0;
  LogValue u = a.as_log(), v = b.as_log();
  if (u.sign != v.sign) return u.sign <=> v.sign;
  if (u.sign == 0) return std::partial_ordering::equivalent;
  return u.sign > 0 ? (u.log_abs <=> v.log_abs) : (v.log_abs <=> u.log_abs);
}

ExactScalar pow(const ExactScalar& base, unsigned exponent) {
  ExactScalar out = ExactScalar(1).to_mode(base.mode());
  for (unsigned i = 0; i < exponent; ++i) out *= base;
  return out;
}

ExactScalar rising_factorial(const ExactScalar& x, unsigned s) {
  return generalized_rising(x, s, ExactScalar(1));
}

ExactScalar falling_factorial(const ExactScalar& x, unsigned s) {
  return generalized_rising(x, s, ExactScalar(-1));
}

ExactScalar generalized_rising(const ExactScalar& x, unsigned j, const ExactScalar& step) {
  ExactScalar out = ExactScalar(1).to_mode(x.mode());
  ExactScalar term = x;
  for (unsigned i = 0; i < j; ++i) {
    out *= term;
    term += step;
  }
  return out;
}

mpz_class factorial(unsigned n) {
  mpz_class out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

mpz_class binomial(long n, long k) {
  if (n < 0 || k < 0 || k > n) return 0;
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

Alpha::Alpha(ExactScalar value) : value_(std::move(value)) {
  if (!(value_ < ExactScalar(1)))
    throw std::domain_error("discount alpha must be < 1, got " + value_.to_string());
}

Alpha Alpha::parse(std::string_view text, NumericMode mode) {
  return Alpha(ExactScalar::parse(text, mode));
}

}  // namespace lookback

#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace retswitch {

/// Raised when text cannot be read as a rational; the message names the offending token.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ArithmeticError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exact rational number in canonical form (den > 0, gcd(|num|, den) = 1).
///
/// Every value that takes part in simulation or classification is a Rat.
/// There are no mutating members besides assignment, so instances can be
/// shared freely between threads.
class Rat {
 public:
  Rat() = default;
  Rat(long value) : q_(value) {}  // NOLINT(google-explicit-constructor)
  Rat(long num, long den);
  Rat(const mpz_class& num, const mpz_class& den);

  /// Accepts "p/q", "p", or a finite decimal such as "-1.25".
  static Rat parse(std::string_view text);

  [[nodiscard]] mpz_class numerator() const { return q_.get_num(); }
  [[nodiscard]] mpz_class denominator() const { return q_.get_den(); }
  [[nodiscard]] int sign() const { return sgn(q_); }
  [[nodiscard]] bool is_integer() const { return q_.get_den() == 1; }

  /// "p/q", or "p" when the denominator is 1.
  [[nodiscard]] std::string str() const;
  /// Rounded half away from zero to `digits` fractional digits. Never "-0.…".
  [[nodiscard]] std::string to_decimal(unsigned digits) const;
  [[nodiscard]] double to_double() const { return q_.get_d(); }

  [[nodiscard]] Rat abs() const;

  friend Rat operator+(const Rat& a, const Rat& b);
  friend Rat operator-(const Rat& a, const Rat& b);
  friend Rat operator*(const Rat& a, const Rat& b);
  friend Rat operator/(const Rat& a, const Rat& b);
  friend Rat operator-(const Rat& a);

  Rat& operator+=(const Rat& b) { return *this = *this + b; }
  Rat& operator-=(const Rat& b) { return *this = *this - b; }
  Rat& operator*=(const Rat& b) { return *this = *this * b; }
  Rat& operator/=(const Rat& b) { return *this = *this / b; }

  friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    const int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r);

 private:
  explicit Rat(mpq_class q) : q_(std::move(q)) {}

  mpq_class q_;
};

/// 2^n as an exact integer.
mpz_class pow2(unsigned n);
/// 4^n as an exact integer.
mpz_class pow4(unsigned n);

}  // namespace retswitch

template <>
struct std::hash<retswitch::Rat> {
  std::size_t operator()(const retswitch::Rat& r) const noexcept {
    return std::hash<std::string>{}(r.str());
  }
};

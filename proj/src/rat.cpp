#include "retswitch/rat.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>

namespace retswitch {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

[[noreturn]] void fail(std::string_view text, std::string_view token, std::string_view why) {
  throw ParseError("cannot parse rational '" + std::string(text) + "': " + std::string(why) + " (token '" +
                   std::string(token) + "')");
}

}  // namespace

Rat::Rat(long num, long den) : Rat(mpz_class(num), mpz_class(den)) {}

Rat::Rat(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw ArithmeticError("rational with zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rat Rat::parse(std::string_view text) {
  if (text.empty()) fail(text, text, "empty input");

  std::string_view body = text;
  bool negative = false;
  if (body.front() == '+' || body.front() == '-') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }

  mpz_class num;
  mpz_class den = 1;

  if (const auto slash = body.find('/'); slash != std::string_view::npos) {
    const auto p = body.substr(0, slash);
    const auto q = body.substr(slash + 1);
    if (!all_digits(p)) fail(text, p, "numerator is not an integer");
    if (!all_digits(q)) fail(text, q, "denominator is not a positive integer");
    num = mpz_class(std::string(p), 10);
    den = mpz_class(std::string(q), 10);
    if (den == 0) fail(text, q, "zero denominator");
  } else if (const auto dot = body.find('.'); dot != std::string_view::npos) {
    const auto whole = body.substr(0, dot);
    const auto frac = body.substr(dot + 1);
    if (!all_digits(whole)) fail(text, whole, "integer part is not a digit sequence");
    if (!all_digits(frac)) fail(text, frac, "fractional part is not a digit sequence");
    num = mpz_class(std::string(whole) + std::string(frac), 10);
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
  } else {
    if (!all_digits(body)) fail(text, body, "not a number");
    num = mpz_class(std::string(body), 10);
  }

  if (negative) num = -num;
  return Rat(num, den);
}

std::string Rat::str() const {
  if (is_integer()) return q_.get_num().get_str();
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

std::string Rat::to_decimal(unsigned digits) const {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);

  // round(|q| * 10^d) with ties away from zero: floor((2*|num|*10^d + den) / (2*den))
  const mpz_class n = ::abs(q_.get_num());
  const mpz_class d = q_.get_den();
  mpz_class scaled;
  mpz_fdiv_q(scaled.get_mpz_t(), mpz_class(2 * n * scale + d).get_mpz_t(), mpz_class(2 * d).get_mpz_t());

  std::string digits_str = scaled.get_str();
  if (digits_str.size() <= digits) digits_str.insert(0, digits + 1 - digits_str.size(), '0');

  std::string out;
  if (sign() < 0 && scaled != 0) out.push_back('-');
  out += digits_str.substr(0, digits_str.size() - digits);
  if (digits > 0) {
    out.push_back('.');
    out += digits_str.substr(digits_str.size() - digits);
  }
  return out;
}

Rat Rat::abs() const { return Rat(mpq_class(::abs(q_))); }

Rat operator+(const Rat& a, const Rat& b) { return Rat(mpq_class(a.q_ + b.q_)); }
Rat operator-(const Rat& a, const Rat& b) { return Rat(mpq_class(a.q_ - b.q_)); }
Rat operator*(const Rat& a, const Rat& b) { return Rat(mpq_class(a.q_ * b.q_)); }
Rat operator/(const Rat& a, const Rat& b) {
  if (b.sign() == 0) throw ArithmeticError("division by zero");
  return Rat(mpq_class(a.q_ / b.q_));
}
Rat operator-(const Rat& a) { return Rat(mpq_class(-a.q_)); }

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

mpz_class pow2(unsigned n) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, n);
  return r;
}

mpz_class pow4(unsigned n) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 4, n);
  return r;
}

}  // namespace retswitch

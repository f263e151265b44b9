#include "cvconv/rational.hpp"

namespace cvconv {

namespace {

int128 iabs(int128 v) { return v < 0 ? -v : v; }

int128 gcd128(int128 a, int128 b) {
  a = iabs(a);
  b = iabs(b);
  while (b != 0) {
    int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

int128 checked_mul(int128 a, int128 b) {
  int128 r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw std::overflow_error("rational: 128-bit multiply overflow");
  }
  return r;
}

int128 checked_add(int128 a, int128 b) {
  int128 r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw std::overflow_error("rational: 128-bit add overflow");
  }
  return r;
}

}  // namespace

std::string int128_to_string(int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  // Peel digits off as unsigned to survive INT128_MIN.
  unsigned __int128 u = neg ? (unsigned __int128)(-(v + 1)) + 1 : (unsigned __int128)v;
  std::string digits;
  while (u != 0) {
    digits.push_back(char('0' + int(u % 10)));
    u /= 10;
  }
  if (neg) digits.push_back('-');
  return std::string(digits.rbegin(), digits.rend());
}

Rational::Rational(int128 num, int128 den) : num_(num), den_(den) {
  if (den_ == 0) throw std::invalid_argument("rational: zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_ == 0) {
    den_ = 1;
    return;
  }
  int128 g = gcd128(num_, den_);
  num_ /= g;
  den_ /= g;
}

double Rational::to_double() const {
  return double(num_) / double(den_);
}

std::string Rational::to_string() const {
  if (den_ == 1) return int128_to_string(num_);
  return int128_to_string(num_) + "/" + int128_to_string(den_);
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational& Rational::operator+=(const Rational& o) {
  // Reduce across denominators before multiplying to keep magnitudes down.
  int128 g = gcd128(den_, o.den_);
  int128 lhs = checked_mul(num_, o.den_ / g);
  int128 rhs = checked_mul(o.num_, den_ / g);
  num_ = checked_add(lhs, rhs);
  den_ = checked_mul(den_, o.den_ / g);
  normalize();
  return *this;
}

Rational& Rational::operator-=(const Rational& o) {
  return *this += (-o);
}

Rational& Rational::operator*=(const Rational& o) {
  int128 g1 = gcd128(num_, o.den_);
  int128 g2 = gcd128(o.num_, den_);
  num_ = checked_mul(num_ / g1, o.num_ / g2);
  den_ = checked_mul(den_ / g2, o.den_ / g1);
  normalize();
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::invalid_argument("rational: divide by zero");
  return *this *= Rational(o.den_, o.num_);
}

bool operator<(const Rational& a, const Rational& b) {
  // Denominators are positive after normalization.
  return checked_mul(a.num_, b.den_) < checked_mul(b.num_, a.den_);
}

int128 Rational::round_half_away() const {
  int128 q = num_ / den_;
  int128 r = num_ % den_;
  if (r == 0) return q;
  int128 twice = iabs(r) * 2;
  if (twice >= den_) q += (num_ < 0) ? -1 : 1;
  return q;
}

}  // namespace cvconv

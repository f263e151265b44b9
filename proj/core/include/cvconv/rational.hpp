#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cvconv {

using int128 = __int128;

// Decimal rendering; __int128 has no ostream support.
std::string int128_to_string(int128 v);

// Exact rational number over 128-bit integers. Always stored reduced with a
// positive denominator. All closed-form error statistics in this library are
// carried as Rationals so equality against enumeration oracles is exact.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(int128 n) : num_(n), den_(1) {}
  Rational(int128 num, int128 den);

  int128 num() const { return num_; }
  int128 den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  double to_double() const;
  std::string to_string() const;  // "num/den", or "num" when integral

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator<=(const Rational& a, const Rational& b) { return a < b || a == b; }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

  // Nearest integer, halves rounded away from zero.
  int128 round_half_away() const;

 private:
  void normalize();

  int128 num_;
  int128 den_;
};

}  // namespace cvconv

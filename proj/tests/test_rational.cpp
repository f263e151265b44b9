#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvconv/rational.hpp"

using cvconv::int128;
using cvconv::Rational;

TEST_CASE("construction normalizes sign and gcd") {
  CHECK(Rational(6, 4) == Rational(3, 2));
  CHECK(Rational(-6, 4) == Rational(3, -2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(6, 4).den() == 2);
  CHECK(Rational(6, -4).num() == -3);
  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("arithmetic") {
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(1, 2) - Rational(1, 3) == Rational(1, 6));
  CHECK(Rational(3, 4) * Rational(2, 9) == Rational(1, 6));
  CHECK(Rational(3, 4) / Rational(9, 2) == Rational(1, 6));
  CHECK(-Rational(3, 4) == Rational(-3, 4));
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::invalid_argument);
}

TEST_CASE("comparison") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(-1, 3));
  CHECK(Rational(2, 4) <= Rational(1, 2));
  CHECK(Rational(7, 2) > Rational(3));
}

TEST_CASE("round half away from zero") {
  CHECK(Rational(3, 2).round_half_away() == int128(2));
  CHECK(Rational(-3, 2).round_half_away() == int128(-2));
  CHECK(Rational(1, 4).round_half_away() == int128(0));
  CHECK(Rational(-1, 4).round_half_away() == int128(0));
  CHECK(Rational(5, 4).round_half_away() == int128(1));
  CHECK(Rational(7).round_half_away() == int128(7));
}

TEST_CASE("string rendering") {
  CHECK(Rational(5, 3).to_string() == "5/3");
  CHECK(Rational(-5, 3).to_string() == "-5/3");
  CHECK(Rational(4, 2).to_string() == "2");
  CHECK(cvconv::int128_to_string(int128(0)) == "0");
  CHECK(cvconv::int128_to_string(int128(-1234567890123456789ll)) == "-1234567890123456789");
}

TEST_CASE("to_double") {
  CHECK(Rational(1, 2).to_double() == doctest::Approx(0.5));
  CHECK(Rational(-7, 4).to_double() == doctest::Approx(-1.75));
}

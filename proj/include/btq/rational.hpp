#pragma once

#include <boost/rational.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace btq {

using Rational = boost::rational<long long>;
using RatVec = std::vector<Rational>;
using IntVec = std::vector<long long>;

/// Parses "p", "-p" or "p/q" (q > 0). Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Inverse of parse_rational: "p" when the denominator is 1, else "p/q".
std::string format_rational(const Rational& value);

inline double to_double(const Rational& value) {
  return boost::rational_cast<double>(value);
}

long long floor_div(const Rational& value);
long long ceil_div(const Rational& value);

}  // namespace btq

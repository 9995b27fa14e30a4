#include "btq/rational.hpp"

#include <charconv>
#include <stdexcept>

namespace btq {

namespace {

long long parse_integer(std::string_view text, std::string_view whole) {
  long long value = 0;
  auto first = text.data();
  auto last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    return Rational(parse_integer(text, text));
  }
  const long long num = parse_integer(text.substr(0, slash), text);
  const long long den = parse_integer(text.substr(slash + 1), text);
  if (den <= 0) {
    throw std::invalid_argument("rational '" + std::string(text) +
                                "' needs a positive denominator");
  }
  return Rational(num, den);
}

std::string format_rational(const Rational& value) {
  if (value.denominator() == 1) return std::to_string(value.numerator());
  return std::to_string(value.numerator()) + "/" +
         std::to_string(value.denominator());
}

long long floor_div(const Rational& value) {
  const long long n = value.numerator();
  const long long d = value.denominator();
  long long q = n / d;
  if ((n % d != 0) && (n < 0)) --q;
  return q;
}

long long ceil_div(const Rational& value) { return -floor_div(-value); }

}  // namespace btq

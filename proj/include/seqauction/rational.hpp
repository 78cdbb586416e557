#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace seqauction {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline void internal_check(bool cond, const char* msg) {
  if (!cond) throw std::logic_error(msg);
}

// Strictly between a and b whenever a != b, with small components.
inline Rat mediant(const Rat& a, const Rat& b) {
  return Rat(numerator(a) + numerator(b), denominator(a) + denominator(b));
}

// Parses "p/q" or "p" with optional leading '-'. Anything else (decimals,
// whitespace, empty fields) is rejected.
inline Rat parse_rat(const std::string& text) {
  auto digits_ok = [](const std::string& s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = (allow_sign && s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') return false;
    }
    return true;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    if (!digits_ok(text, true)) throw std::invalid_argument("bad rational literal: " + text);
    return Rat(Int(text));
  }
  const std::string num = text.substr(0, slash);
  const std::string den = text.substr(slash + 1);
  if (!digits_ok(num, true) || !digits_ok(den, false))
    throw std::invalid_argument("bad rational literal: " + text);
  Int d(den);
  if (d == 0) throw std::invalid_argument("zero denominator: " + text);
  return Rat(Int(num), d);
}

// Lowest terms; "/1" omitted.
inline std::string render_rat(const Rat& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) {
    s += '/';
    s += denominator(r).str();
  }
  return s;
}

}  // namespace seqauction

#include "hopf/rational.hpp"

#include <cctype>

#include "hopf/error.hpp"

namespace hopf {

std::string to_string(const Rational& q) {
  return boost::multiprecision::numerator(q).str() + "/" +
         boost::multiprecision::denominator(q).str();
}

namespace {
BigInt parse_int(const std::string& s, const std::string& whole) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
  if (i == s.size()) throw ParseError("malformed rational '" + whole + "'");
  for (std::size_t k = i; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k])))
      throw ParseError("malformed rational '" + whole + "'");
  return BigInt(s[0] == '+' ? s.substr(1) : s);
}
}  // namespace

Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(parse_int(s, s));
  const BigInt num = parse_int(s.substr(0, slash), s);
  const std::string ds = s.substr(slash + 1);
  if (!ds.empty() && (ds[0] == '-' || ds[0] == '+')) throw ParseError("malformed rational '" + s + "'");
  const BigInt den = parse_int(ds, s);
  if (den == 0) throw ParseError("zero denominator in '" + s + "'");
  return Rational(num, den);
}

}  // namespace hopf

#include "cubiclab/rational.hpp"

#include <stdexcept>

namespace cubiclab {

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::string numerator_string(const Rational& q) {
  return boost::multiprecision::numerator(q).str();
}

std::string denominator_string(const Rational& q) {
  return boost::multiprecision::denominator(q).str();
}

std::string to_string(const Rational& q) {
  const BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return numerator_string(q);
  return numerator_string(q) + "/" + den.str();
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  try {
    if (auto slash = text.find('/'); slash != std::string::npos) {
      BigInt num(text.substr(0, slash));
      BigInt den(text.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
      return Rational(num, den);
    }
    if (auto dot = text.find('.'); dot != std::string::npos) {
      std::string digits = text.substr(0, dot) + text.substr(dot + 1);
      const auto frac_len = static_cast<unsigned>(text.size() - dot - 1);
      BigInt den = 1;
      for (unsigned i = 0; i < frac_len; ++i) den *= 10;
      if (digits == "-" || digits.empty()) digits += "0";
      return Rational(BigInt(digits), den);
    }
    return Rational(BigInt(text));
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed rational literal '" + text + "'");
  }
}

BigInt pow3(unsigned k) {
  BigInt r = 1;
  for (unsigned i = 0; i < k; ++i) r *= 3;
  return r;
}

}  // namespace cubiclab

#include "xsdp/rational.hpp"

#include <cctype>

namespace xsdp {

Rational parse_decimal(std::string_view text) {
  mpz_class num = 0;
  mpz_class den = 1;
  bool seen_digit = false;
  bool seen_point = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_point) throw Error("malformed number '" + std::string(text) + "'");
      seen_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw Error("malformed number '" + std::string(text) + "'");
    seen_digit = true;
    num = num * 10 + (c - '0');
    if (seen_point) den *= 10;
  }
  if (!seen_digit) throw Error("malformed number '" + std::string(text) + "'");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_decimal(const Rational& q, int digits) {
  mpz_class scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const bool negative = sgn(q) < 0;
  Rational a = abs(q);
  // round half up on the last digit
  mpz_class scaled = (a.get_num() * scale * 2 + a.get_den()) / (a.get_den() * 2);
  mpz_class whole = scaled / scale;
  mpz_class frac = scaled % scale;
  std::string out;
  if (negative && scaled != 0) out += '-';
  out += whole.get_str();
  if (frac != 0) {
    std::string f = frac.get_str();
    f.insert(0, static_cast<std::size_t>(digits) - f.size(), '0');
    while (!f.empty() && f.back() == '0') f.pop_back();
    out += '.';
    out += f;
  }
  return out;
}

std::size_t hash_value(const mpz_class& z) {
  std::size_t seed = static_cast<std::size_t>(mpz_sgn(z.get_mpz_t()) + 1);
  const std::size_t n = mpz_size(z.get_mpz_t());
  for (std::size_t i = 0; i < n; ++i)
    hash_combine(seed, static_cast<std::size_t>(mpz_getlimbn(z.get_mpz_t(), i)));
  return seed;
}

std::size_t hash_value(const Rational& q) {
  std::size_t seed = hash_value(q.get_num());
  hash_combine(seed, hash_value(q.get_den()));
  return seed;
}

}  // namespace xsdp

#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace xsdp {

using Rational = mpq_class;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses an unsigned decimal or integer literal ("100", "0.0002", "2.")
/// into an exact fraction. Throws Error on malformed input.
Rational parse_decimal(std::string_view text);

/// Canonical exact form: "a/b" or "a".
std::string to_string(const Rational& q);

/// Decimal rendering with up to `digits` fractional digits, trailing zeros
/// trimmed ("1.44", "70", "0.333333333333").
std::string to_decimal(const Rational& q, int digits = 12);

std::size_t hash_value(const mpz_class& z);
std::size_t hash_value(const Rational& q);

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace xsdp

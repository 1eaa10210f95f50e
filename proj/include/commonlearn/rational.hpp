#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace commonlearn {

using Rational = mpq_class;

/// Parses "p/q", "-p/q" or an integer. Decimal notation is rejected.
/// Throws std::invalid_argument on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

/// Parses a decimal literal ("0.375", "1e-3", "-2.5E+1") exactly. Also
/// accepts everything parse_rational accepts.
Rational parse_decimal(std::string_view text);

/// True if `text` looks like a decimal literal rather than p/q or an integer.
bool is_decimal_literal(std::string_view text);

/// Exact value of the shortest decimal string that round-trips to `value`,
/// so 0.05 maps to 1/20 rather than the binary double nearest to it.
Rational shortest_decimal(double value);

/// Canonical "p/q" (or "n" for integers).
std::string to_string(const Rational& value);

/// Nearest double (GMP's own conversion truncates toward zero).
double to_double(const Rational& value);

std::vector<double> to_doubles(const std::vector<Rational>& values);

}  // namespace commonlearn

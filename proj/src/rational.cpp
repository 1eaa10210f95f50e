#include "commonlearn/rational.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <charconv>
#include <stdexcept>
#include <system_error>

namespace commonlearn {
namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

std::string_view strip_sign(std::string_view s, bool& negative) {
    negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    return s;
}

mpz_class pow10(long exponent) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(exponent));
    return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    bool negative = false;
    std::string_view body = strip_sign(text, negative);
    const auto slash = body.find('/');
    std::string_view num = body.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
        throw std::invalid_argument("not a rational literal: '" + std::string(text) + "'");
    mpz_class n(std::string(num), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    Rational r(n, d);
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

bool is_decimal_literal(std::string_view text) {
    return text.find_first_of(".eE") != std::string_view::npos && text.find('/') == std::string_view::npos;
}

Rational parse_decimal(std::string_view text) {
    if (!is_decimal_literal(text)) return parse_rational(text);
    bool negative = false;
    std::string_view body = strip_sign(text, negative);
    long exponent = 0;
    if (const auto e = body.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_text = body.substr(e + 1);
        bool exp_negative = false;
        exp_text = strip_sign(exp_text, exp_negative);
        if (!all_digits(exp_text) || exp_text.size() > 6)
            throw std::invalid_argument("bad exponent in '" + std::string(text) + "'");
        exponent = std::stol(std::string(exp_text));
        if (exp_negative) exponent = -exponent;
        body = body.substr(0, e);
    }
    std::string digits;
    if (const auto dot = body.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = body.substr(0, dot);
        std::string_view frac_part = body.substr(dot + 1);
        if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)) ||
            (int_part.empty() && frac_part.empty()))
            throw std::invalid_argument("not a decimal literal: '" + std::string(text) + "'");
        digits = std::string(int_part) + std::string(frac_part);
        exponent -= static_cast<long>(frac_part.size());
    } else {
        if (!all_digits(body)) throw std::invalid_argument("not a decimal literal: '" + std::string(text) + "'");
        digits = std::string(body);
    }
    Rational r{mpz_class(digits, 10)};
    if (exponent > 0) r *= pow10(exponent);
    if (exponent < 0) r /= pow10(-exponent);
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

Rational shortest_decimal(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::invalid_argument("cannot format double");
    std::string_view s(buf, static_cast<std::size_t>(end - buf));
    if (s == "inf" || s == "-inf" || s == "nan" || s == "-nan")
        throw std::invalid_argument("non-finite value has no rational form");
    return parse_decimal(s);
}

std::string to_string(const Rational& value) {
    Rational v = value;
    v.canonicalize();
    return v.get_str();
}

double to_double(const Rational& value) {
    const double truncated = value.get_d();
    if (!std::isfinite(truncated) || Rational(truncated) == value) return truncated;
    const double away = std::nextafter(truncated, sgn(value) > 0 ? HUGE_VAL : -HUGE_VAL);
    if (!std::isfinite(away)) return truncated;
    const Rational below = abs(value - Rational(truncated));
    const Rational above = abs(Rational(away) - value);
    if (below != above) return below < above ? truncated : away;
    // Tie: pick the even mantissa.
    return (std::bit_cast<std::uint64_t>(truncated) & 1) == 0 ? truncated : away;
}

std::vector<double> to_doubles(const std::vector<Rational>& values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(to_double(v));
    return out;
}

}  // namespace commonlearn

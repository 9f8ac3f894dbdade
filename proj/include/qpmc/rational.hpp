#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace qpmc {

// All probabilities and squared moduli are exact arbitrary-precision rationals.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Semantic problem with an input (bad symbol, out-of-range bound, ...).
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Syntax error in a formula or file; carries a human-readable position.
struct parse_error : std::runtime_error {
    parse_error(const std::string& what, std::size_t line, std::size_t column)
        : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(column) +
                             ": " + what),
          line(line),
          column(column) {}

    explicit parse_error(const std::string& what) : std::runtime_error(what), line(0), column(0) {}

    std::size_t line;
    std::size_t column;
};

/// Parses "p/q" or "p" (optionally signed). Throws parse_error on junk or q = 0.
inline Rational parse_rational(std::string_view text) {
    if (text.empty()) throw parse_error("empty rational");
    for (char c : text) {
        if (!(c == '/' || c == '-' || c == '+' || (c >= '0' && c <= '9')))
            throw parse_error("bad rational '" + std::string(text) + "'");
    }
    try {
        Rational r{std::string(text)};
        return r;
    } catch (const std::exception&) {
        throw parse_error("bad rational '" + std::string(text) + "'");
    }
}

/// Renders as "p/q", or "p" when the denominator is 1.
inline std::string rational_str(const Rational& r) { return r.str(); }

inline double rational_double(const Rational& r) { return static_cast<double>(r); }

}  // namespace qpmc

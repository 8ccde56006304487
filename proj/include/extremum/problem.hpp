#ifndef EXTREMUM_PROBLEM_HPP
#define EXTREMUM_PROBLEM_HPP

#include <cctype>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "extremum/error.hpp"
#include "extremum/expr.hpp"
#include "extremum/interval.hpp"

namespace extremum {

/// Problem description read from a `key = value` text file:
///
///     # comment
///     formula     = x1^2 + x2^4
///     domain      = [-2, 2] x [-2, 2]
///     dimension   = 2          (optional, must agree with domain)
///     tol_x       = 1e-8
///     max_boxes   = 200000
///     newton      = true
///     retry_limit = 4
///     zero_tol    = 1e-9
///     epsilon     = 0.5        (all candidates)
///     epsilon[2]  = 0.25       (candidate 2, 1-based, midpoint order)
struct ProblemFile {
    std::string formula;
    std::size_t dimension = 0;
    Box domain;
    double tol_x = 1e-8;
    std::size_t max_boxes = 200000;
    bool newton = true;
    std::size_t retry_limit = 4;
    double zero_tol = 1e-9;
    std::optional<double> epsilon;
    std::map<std::size_t, double> epsilon_overrides; // 0-based candidate index

    Expression expression() const { return parse(formula, dimension); }
};

namespace detail {

inline std::string trim(std::string_view s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

[[noreturn]] inline void bad_line(std::size_t line, const std::string& msg)
{
    throw Error(Errc::invalid_argument, "line " + std::to_string(line) + ": " + msg);
}

inline double parse_real(const std::string& text, std::size_t line)
{
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
        bad_line(line, "expected a finite number, got '" + text + "'");
    }
    return v;
}

inline std::size_t parse_count(const std::string& text, std::size_t line)
{
    std::size_t v = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        bad_line(line, "expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

inline bool parse_bool(const std::string& text, std::size_t line)
{
    if (text == "true" || text == "yes" || text == "1") {
        return true;
    }
    if (text == "false" || text == "no" || text == "0") {
        return false;
    }
    bad_line(line, "expected true or false, got '" + text + "'");
}

// "[a, b] x [c, d]" (the separator between brackets may be 'x', ',' or blank).
// Decimal bounds that are not representable are rounded outward.
inline Box parse_domain(const std::string& text, std::size_t line)
{
    std::vector<Interval> coords;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char c = text[pos];
        if (std::isspace(static_cast<unsigned char>(c)) || c == 'x' || c == ',') {
            ++pos;
            continue;
        }
        if (c != '[') {
            bad_line(line, "domain must be a list of [lo, hi] pairs");
        }
        const std::size_t close = text.find(']', pos);
        if (close == std::string::npos) {
            bad_line(line, "unterminated '[' in domain");
        }
        const std::string inner = text.substr(pos + 1, close - pos - 1);
        const std::size_t comma = inner.find(',');
        if (comma == std::string::npos) {
            bad_line(line, "domain interval needs two bounds");
        }
        const std::string lo_text = trim(inner.substr(0, comma));
        const std::string hi_text = trim(inner.substr(comma + 1));
        parse_real(lo_text, line);
        parse_real(hi_text, line);
        const double lo = Interval::from_decimal(lo_text).lo();
        const double hi = Interval::from_decimal(hi_text).hi();
        if (!(lo < hi)) {
            bad_line(line, "domain bounds must satisfy lo < hi");
        }
        coords.emplace_back(lo, hi);
        pos = close + 1;
    }
    if (coords.empty()) {
        bad_line(line, "empty domain");
    }
    return Box(std::move(coords));
}

} // namespace detail

inline ProblemFile parse_problem(std::string_view text)
{
    ProblemFile p;
    std::optional<std::size_t> declared_dim;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        const std::string content = detail::trim(raw);
        if (content.empty()) {
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            detail::bad_line(line, "expected 'key = value'");
        }
        const std::string key = detail::trim(content.substr(0, eq));
        const std::string value = detail::trim(content.substr(eq + 1));

        if (key == "formula") {
            p.formula = value;
        } else if (key == "dimension") {
            declared_dim = detail::parse_count(value, line);
        } else if (key == "domain") {
            p.domain = detail::parse_domain(value, line);
        } else if (key == "tol_x") {
            p.tol_x = detail::parse_real(value, line);
        } else if (key == "max_boxes") {
            p.max_boxes = detail::parse_count(value, line);
        } else if (key == "newton") {
            p.newton = detail::parse_bool(value, line);
        } else if (key == "retry_limit") {
            p.retry_limit = detail::parse_count(value, line);
        } else if (key == "zero_tol") {
            p.zero_tol = detail::parse_real(value, line);
        } else if (key == "epsilon") {
            p.epsilon = detail::parse_real(value, line);
        } else if (key.rfind("epsilon[", 0) == 0 && key.back() == ']') {
            const std::size_t idx = detail::parse_count(key.substr(8, key.size() - 9), line);
            if (idx == 0) {
                detail::bad_line(line, "candidate indices start at 1");
            }
            p.epsilon_overrides[idx - 1] = detail::parse_real(value, line);
        } else {
            detail::bad_line(line, "unknown key '" + key + "'");
        }
    }

    if (p.formula.empty()) {
        throw Error(Errc::invalid_argument, "problem file has no formula");
    }
    if (p.domain.dim() == 0) {
        throw Error(Errc::invalid_argument, "problem file has no domain");
    }
    if (declared_dim && *declared_dim != p.domain.dim()) {
        throw Error(Errc::dimension_mismatch, "dimension does not match the number of domain intervals");
    }
    p.dimension = p.domain.dim();
    if (!(p.tol_x > 0) || p.max_boxes < 1 || !(p.zero_tol >= 0)) {
        throw Error(Errc::invalid_argument, "tol_x must be > 0, max_boxes >= 1, zero_tol >= 0");
    }
    // Validates the formula against the dimension now rather than mid-run.
    (void)p.expression();
    return p;
}

inline ProblemFile load_problem(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::io_error, "cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

} // namespace extremum

#endif // EXTREMUM_PROBLEM_HPP

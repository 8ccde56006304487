#ifndef EXTREMUM_INTERVAL_HPP
#define EXTREMUM_INTERVAL_HPP

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "extremum/error.hpp"

namespace extremum {

// Directed rounding primitives.
//
// Results are computed in round-to-nearest and then corrected with an
// error-free transformation (TwoSum / FMA residual). When the nearest result
// is exact it is returned unchanged, otherwise it is moved one ulp in the
// requested direction. The floating-point environment is never touched here,
// so these are safe to call from any thread.
namespace rounding {

inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr double max_finite = std::numeric_limits<double>::max();

// Below this magnitude the FMA residual of a product may itself underflow.
inline constexpr double residual_safe_min = 0x1p-960;

inline double next_down(double x) { return std::nextafter(x, -inf); }
inline double next_up(double x) { return std::nextafter(x, inf); }

namespace detail {

// Overflowed nearest result of finite operands: keep the bound on the safe side.
inline double clamp_overflow_down(double r) { return r > 0 ? max_finite : r; }
inline double clamp_overflow_up(double r) { return r < 0 ? -max_finite : r; }

inline double sum_residual(double a, double b, double s)
{
    const double bb = s - a;
    return (a - (s - bb)) + (b - bb);
}

} // namespace detail

inline double add_down(double a, double b)
{
    const double s = a + b;
    if (!std::isfinite(s)) {
        return std::isfinite(a) && std::isfinite(b) ? detail::clamp_overflow_down(s) : s;
    }
    return detail::sum_residual(a, b, s) < 0 ? next_down(s) : s;
}

inline double add_up(double a, double b)
{
    const double s = a + b;
    if (!std::isfinite(s)) {
        return std::isfinite(a) && std::isfinite(b) ? detail::clamp_overflow_up(s) : s;
    }
    return detail::sum_residual(a, b, s) > 0 ? next_up(s) : s;
}

inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

// 0 * inf is taken as 0, the convention needed for interval endpoint products.
inline double mul_down(double a, double b)
{
    if (a == 0 || b == 0) {
        return 0.0;
    }
    const double p = a * b;
    if (!std::isfinite(p)) {
        return std::isfinite(a) && std::isfinite(b) ? detail::clamp_overflow_down(p) : p;
    }
    if (std::fabs(p) < residual_safe_min) {
        return next_down(p);
    }
    return std::fma(a, b, -p) < 0 ? next_down(p) : p;
}

inline double mul_up(double a, double b)
{
    if (a == 0 || b == 0) {
        return 0.0;
    }
    const double p = a * b;
    if (!std::isfinite(p)) {
        return std::isfinite(a) && std::isfinite(b) ? detail::clamp_overflow_up(p) : p;
    }
    if (std::fabs(p) < residual_safe_min) {
        return next_up(p);
    }
    return std::fma(a, b, -p) > 0 ? next_up(p) : p;
}

// Caller guarantees b != 0.
inline double div_down(double a, double b)
{
    const double q = a / b;
    if (!std::isfinite(a) || !std::isfinite(b)) {
        return q;
    }
    if (!std::isfinite(q)) {
        return detail::clamp_overflow_down(q);
    }
    if (std::fabs(q) < residual_safe_min) {
        return a == 0 ? 0.0 : next_down(q);
    }
    // a = q*b + r exactly; the true quotient is q + r/b.
    const double r = std::fma(-q, b, a);
    return (r != 0 && ((r < 0) != (b < 0))) ? next_down(q) : q;
}

inline double div_up(double a, double b)
{
    const double q = a / b;
    if (!std::isfinite(a) || !std::isfinite(b)) {
        return q;
    }
    if (!std::isfinite(q)) {
        return detail::clamp_overflow_up(q);
    }
    if (std::fabs(q) < residual_safe_min) {
        return a == 0 ? 0.0 : next_up(q);
    }
    const double r = std::fma(-q, b, a);
    return (r != 0 && ((r < 0) == (b < 0))) ? next_up(q) : q;
}

// Non-negative base, exponent >= 0. Products of lower (upper) bounds of
// non-negative factors stay lower (upper) bounds, so plain square-and-multiply
// with one-sided rounding is sound.
inline double pow_down_nonneg(double base, unsigned k)
{
    double result = 1.0;
    while (k != 0) {
        if (k & 1u) {
            result = mul_down(result, base);
        }
        k >>= 1u;
        if (k != 0) {
            base = mul_down(base, base);
        }
    }
    return result;
}

inline double pow_up_nonneg(double base, unsigned k)
{
    double result = 1.0;
    while (k != 0) {
        if (k & 1u) {
            result = mul_up(result, base);
        }
        k >>= 1u;
        if (k != 0) {
            base = mul_up(base, base);
        }
    }
    return result;
}

// Decimal literal -> [round down, round up]. glibc strtod honours the dynamic
// rounding mode; the mode is restored before returning.
inline std::pair<double, double> decimal_bounds(const std::string& text)
{
    struct ModeGuard {
        int saved = std::fegetround();
        ~ModeGuard() { std::fesetround(saved); }
    } guard;

    std::fesetround(FE_DOWNWARD);
    const double lo = std::strtod(text.c_str(), nullptr);
    std::fesetround(FE_UPWARD);
    const double hi = std::strtod(text.c_str(), nullptr);
    return {lo, hi};
}

} // namespace rounding

/// Closed real interval [lo, hi] with outward-rounded endpoints.
///
/// lo is finite or -inf, hi is finite or +inf. The empty set is a separate
/// state (`Interval::empty()`); every arithmetic operation rejects it with
/// Errc::empty_operand.
class Interval {
public:
    constexpr Interval() = default;

    // NOLINTNEXTLINE(google-explicit-constructor)
    Interval(double x) : lo_(x), hi_(x)
    {
        if (std::isnan(x) || x == rounding::inf || x == -rounding::inf) {
            throw Error(Errc::invalid_argument, "point interval needs a finite value");
        }
    }

    Interval(double lo, double hi) : lo_(lo), hi_(hi)
    {
        if (std::isnan(lo) || std::isnan(hi) || lo > hi || lo == rounding::inf || hi == -rounding::inf) {
            throw Error(Errc::invalid_argument, "interval bounds must satisfy lo <= hi");
        }
    }

    static constexpr Interval empty()
    {
        Interval r;
        r.empty_ = true;
        return r;
    }

    static Interval entire() { return Interval(-rounding::inf, rounding::inf); }

    /// Tightest enclosure of a decimal literal such as "0.1" or "1e-3".
    static Interval from_decimal(const std::string& text)
    {
        const auto [lo, hi] = rounding::decimal_bounds(text);
        if (std::isnan(lo) || std::isnan(hi)) {
            throw Error(Errc::invalid_argument, "not a number: " + text);
        }
        return Interval(lo, hi);
    }

    constexpr double lo() const { return lo_; }
    constexpr double hi() const { return hi_; }
    constexpr bool is_empty() const { return empty_; }
    constexpr bool is_point() const { return !empty_ && lo_ == hi_; }
    constexpr bool is_bounded() const { return !empty_ && std::isfinite(lo_) && std::isfinite(hi_); }

    friend constexpr bool operator==(const Interval& a, const Interval& b)
    {
        if (a.empty_ || b.empty_) {
            return a.empty_ == b.empty_;
        }
        return a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

private:
    double lo_ = 0.0;
    double hi_ = 0.0;
    bool empty_ = false;
};

inline std::ostream& operator<<(std::ostream& os, const Interval& x)
{
    if (x.is_empty()) {
        return os << "[empty]";
    }
    return os << '[' << x.lo() << ", " << x.hi() << ']';
}

namespace detail {

inline void require_nonempty(const Interval& a)
{
    if (a.is_empty()) {
        throw Error(Errc::empty_operand, "operation on an empty interval");
    }
}

inline void require_nonempty(const Interval& a, const Interval& b)
{
    require_nonempty(a);
    require_nonempty(b);
}

// Nearest-rounded transcendental endpoints widened by one ulp each side.
inline Interval widen_ulp(double lo, double hi)
{
    return Interval(rounding::next_down(lo), rounding::next_up(hi));
}

// Does x contain a point of the lattice 2*pi*(k + phase), k integer? May
// answer true for near misses; that only loosens the enclosure.
inline bool touches_phase(const Interval& x, double phase)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double a = x.lo() / two_pi - phase;
    const double b = x.hi() / two_pi - phase;
    const double slack = 1e-12 * (1.0 + std::max(std::fabs(a), std::fabs(b)));
    return std::floor(b + slack) >= std::ceil(a - slack);
}

inline Interval trig_range(const Interval& x, double (*fn)(double), double max_phase, double min_phase)
{
    constexpr double full_turn = 2.0 * std::numbers::pi;
    if (!x.is_bounded() || x.hi() - x.lo() >= full_turn) {
        return Interval(-1.0, 1.0);
    }
    const double a = fn(x.lo());
    const double b = fn(x.hi());
    double lo = rounding::next_down(std::min(a, b));
    double hi = rounding::next_up(std::max(a, b));
    if (touches_phase(x, max_phase)) {
        hi = 1.0;
    }
    if (touches_phase(x, min_phase)) {
        lo = -1.0;
    }
    return Interval(std::max(lo, -1.0), std::min(hi, 1.0));
}

} // namespace detail

inline Interval operator-(const Interval& a)
{
    detail::require_nonempty(a);
    return Interval(-a.hi(), -a.lo());
}

inline Interval operator+(const Interval& a, const Interval& b)
{
    detail::require_nonempty(a, b);
    return Interval(rounding::add_down(a.lo(), b.lo()), rounding::add_up(a.hi(), b.hi()));
}

inline Interval operator-(const Interval& a, const Interval& b)
{
    detail::require_nonempty(a, b);
    return Interval(rounding::sub_down(a.lo(), b.hi()), rounding::sub_up(a.hi(), b.lo()));
}

inline Interval operator*(const Interval& a, const Interval& b)
{
    detail::require_nonempty(a, b);
    using namespace rounding;
    const double lo = std::min({mul_down(a.lo(), b.lo()), mul_down(a.lo(), b.hi()), mul_down(a.hi(), b.lo()),
                                mul_down(a.hi(), b.hi())});
    const double hi = std::max(
        {mul_up(a.lo(), b.lo()), mul_up(a.lo(), b.hi()), mul_up(a.hi(), b.lo()), mul_up(a.hi(), b.hi())});
    return Interval(lo, hi);
}

inline Interval operator/(const Interval& a, const Interval& b)
{
    detail::require_nonempty(a, b);
    if (b.lo() <= 0 && b.hi() >= 0) {
        throw Error(Errc::zero_in_divisor, "divisor interval contains zero");
    }
    using namespace rounding;
    const double lo = std::min({div_down(a.lo(), b.lo()), div_down(a.lo(), b.hi()), div_down(a.hi(), b.lo()),
                                div_down(a.hi(), b.hi())});
    const double hi = std::max(
        {div_up(a.lo(), b.lo()), div_up(a.lo(), b.hi()), div_up(a.hi(), b.lo()), div_up(a.hi(), b.hi())});
    return Interval(lo, hi);
}

inline Interval& operator+=(Interval& a, const Interval& b) { return a = a + b; }
inline Interval& operator-=(Interval& a, const Interval& b) { return a = a - b; }
inline Interval& operator*=(Interval& a, const Interval& b) { return a = a * b; }

/// x^k as a range, not as repeated multiplication: even powers never go
/// below zero, so sqr([-1,1]) is [0,1].
inline Interval pow_int(const Interval& x, int k)
{
    detail::require_nonempty(x);
    if (k == 0) {
        return Interval(1.0);
    }
    if (k < 0) {
        return Interval(1.0) / pow_int(x, -k);
    }
    using namespace rounding;
    const auto uk = static_cast<unsigned>(k);
    if (k % 2 == 0) {
        if (x.lo() >= 0) {
            return Interval(pow_down_nonneg(x.lo(), uk), pow_up_nonneg(x.hi(), uk));
        }
        if (x.hi() <= 0) {
            return Interval(pow_down_nonneg(-x.hi(), uk), pow_up_nonneg(-x.lo(), uk));
        }
        return Interval(0.0, pow_up_nonneg(std::max(-x.lo(), x.hi()), uk));
    }
    const double lo = x.lo() >= 0 ? pow_down_nonneg(x.lo(), uk) : -pow_up_nonneg(-x.lo(), uk);
    const double hi = x.hi() >= 0 ? pow_up_nonneg(x.hi(), uk) : -pow_down_nonneg(-x.hi(), uk);
    return Interval(lo, hi);
}

inline Interval sqr(const Interval& x) { return pow_int(x, 2); }

inline Interval exp(const Interval& x)
{
    detail::require_nonempty(x);
    const double lo = std::max(0.0, rounding::next_down(std::exp(x.lo())));
    const double hi = x.hi() == rounding::inf ? rounding::inf : rounding::next_up(std::exp(x.hi()));
    return Interval(lo, hi);
}

inline Interval ln(const Interval& x)
{
    detail::require_nonempty(x);
    if (!(x.lo() > 0)) {
        throw Error(Errc::domain_violation, "ln of an interval touching values <= 0");
    }
    const double hi = x.hi() == rounding::inf ? rounding::inf : rounding::next_up(std::log(x.hi()));
    return Interval(rounding::next_down(std::log(x.lo())), hi);
}

inline Interval sin(const Interval& x)
{
    detail::require_nonempty(x);
    return detail::trig_range(x, [](double v) { return std::sin(v); }, 0.25, 0.75);
}

inline Interval cos(const Interval& x)
{
    detail::require_nonempty(x);
    return detail::trig_range(x, [](double v) { return std::cos(v); }, 0.0, 0.5);
}

/// a.hi < b.lo: every real in a is below every real in b.
inline bool strictly_less(const Interval& a, const Interval& b)
{
    detail::require_nonempty(a, b);
    return a.hi() < b.lo();
}

/// Shared points, including a single shared endpoint.
inline bool intersects(const Interval& a, const Interval& b)
{
    detail::require_nonempty(a, b);
    return std::max(a.lo(), b.lo()) <= std::min(a.hi(), b.hi());
}

inline Interval hull(const Interval& a, const Interval& b)
{
    if (a.is_empty()) {
        return b;
    }
    if (b.is_empty()) {
        return a;
    }
    return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

inline Interval intersect(const Interval& a, const Interval& b)
{
    if (a.is_empty() || b.is_empty()) {
        return Interval::empty();
    }
    const double lo = std::max(a.lo(), b.lo());
    const double hi = std::min(a.hi(), b.hi());
    return lo <= hi ? Interval(lo, hi) : Interval::empty();
}

// Rounded upward.
inline double width(const Interval& a)
{
    detail::require_nonempty(a);
    return rounding::sub_up(a.hi(), a.lo());
}

inline bool contains(const Interval& a, double x)
{
    return !a.is_empty() && a.lo() <= x && x <= a.hi();
}

inline bool subset(const Interval& inner, const Interval& outer)
{
    if (inner.is_empty()) {
        return true;
    }
    return !outer.is_empty() && outer.lo() <= inner.lo() && inner.hi() <= outer.hi();
}

// Strictly inside: no shared endpoint.
inline bool interior_subset(const Interval& inner, const Interval& outer)
{
    return !inner.is_empty() && !outer.is_empty() && outer.lo() < inner.lo() && inner.hi() < outer.hi();
}

/// Nearest-rounded centre, always inside the interval.
inline double mid(const Interval& a)
{
    detail::require_nonempty(a);
    if (!a.is_bounded()) {
        throw Error(Errc::unbounded_box, "midpoint of an unbounded interval");
    }
    double m = 0.5 * (a.lo() + a.hi());
    if (!std::isfinite(m)) {
        m = 0.5 * a.lo() + 0.5 * a.hi();
    }
    return std::clamp(m, a.lo(), a.hi());
}

using Point = std::vector<double>;

/// Axis-aligned product of intervals.
class Box {
public:
    Box() = default;
    explicit Box(std::vector<Interval> coords) : coords_(std::move(coords)) {}
    Box(std::initializer_list<Interval> coords) : coords_(coords) {}

    static Box from_point(std::span<const double> x)
    {
        std::vector<Interval> c;
        c.reserve(x.size());
        for (double v : x) {
            c.emplace_back(v);
        }
        return Box(std::move(c));
    }

    std::size_t dim() const { return coords_.size(); }
    const Interval& operator[](std::size_t i) const { return coords_[i]; }
    Interval& operator[](std::size_t i) { return coords_[i]; }
    const std::vector<Interval>& coords() const { return coords_; }

    auto begin() const { return coords_.begin(); }
    auto end() const { return coords_.end(); }

    bool is_empty() const
    {
        return std::any_of(coords_.begin(), coords_.end(), [](const Interval& c) { return c.is_empty(); });
    }

    friend bool operator==(const Box&, const Box&) = default;

private:
    std::vector<Interval> coords_;
};

inline std::ostream& operator<<(std::ostream& os, const Box& b)
{
    for (std::size_t i = 0; i < b.dim(); ++i) {
        os << (i == 0 ? "" : " x ") << b[i];
    }
    return os;
}

inline Point midpoint(const Box& b)
{
    Point m;
    m.reserve(b.dim());
    for (const auto& c : b) {
        if (!c.is_bounded()) {
            throw Error(Errc::unbounded_box, "midpoint of an unbounded box");
        }
        m.push_back(mid(c));
    }
    return m;
}

inline double max_width(const Box& b)
{
    double w = 0.0;
    for (const auto& c : b) {
        w = std::max(w, width(c));
    }
    return w;
}

/// Widest axis, lowest index on ties.
inline std::size_t widest_axis(const Box& b)
{
    std::size_t best = 0;
    double best_w = -1.0;
    for (std::size_t i = 0; i < b.dim(); ++i) {
        const double w = width(b[i]);
        if (w > best_w) {
            best_w = w;
            best = i;
        }
    }
    return best;
}

inline bool contains(const Box& b, std::span<const double> x)
{
    if (b.dim() != x.size()) {
        return false;
    }
    for (std::size_t i = 0; i < b.dim(); ++i) {
        if (!contains(b[i], x[i])) {
            return false;
        }
    }
    return true;
}

inline bool subset(const Box& inner, const Box& outer)
{
    if (inner.dim() != outer.dim()) {
        return false;
    }
    for (std::size_t i = 0; i < inner.dim(); ++i) {
        if (!subset(inner[i], outer[i])) {
            return false;
        }
    }
    return true;
}

inline Box hull(const Box& a, const Box& b)
{
    if (a.dim() != b.dim()) {
        throw Error(Errc::dimension_mismatch, "hull of boxes with different dimension");
    }
    std::vector<Interval> c(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        c[i] = hull(a[i], b[i]);
    }
    return Box(std::move(c));
}

/// Infinity-norm distance between the midpoints, rounded downward.
inline double distance(const Box& a, const Box& b)
{
    if (a.dim() != b.dim()) {
        throw Error(Errc::dimension_mismatch, "distance between boxes of different dimension");
    }
    const Point ma = midpoint(a);
    const Point mb = midpoint(b);
    double d = 0.0;
    for (std::size_t i = 0; i < ma.size(); ++i) {
        const double di = ma[i] >= mb[i] ? rounding::sub_down(ma[i], mb[i]) : rounding::sub_down(mb[i], ma[i]);
        d = std::max(d, di);
    }
    return d;
}

} // namespace extremum

#endif // EXTREMUM_INTERVAL_HPP

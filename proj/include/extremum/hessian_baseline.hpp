#ifndef EXTREMUM_HESSIAN_BASELINE_HPP
#define EXTREMUM_HESSIAN_BASELINE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "extremum/expr.hpp"

namespace extremum {

// Classical second-derivative test in plain floating point. It is not a
// verified method; it exists to compare against the interval classifier.

enum class EigenSigns { all_positive, all_negative, mixed, has_zero_within_tolerance };
enum class BaselineVerdict { minimum, maximum, inconclusive_or_saddle };

inline std::string_view eigen_signs_name(EigenSigns s)
{
    switch (s) {
    case EigenSigns::all_positive: return "all-positive";
    case EigenSigns::all_negative: return "all-negative";
    case EigenSigns::mixed: return "mixed";
    case EigenSigns::has_zero_within_tolerance: return "has-zero-within-tolerance";
    }
    return "mixed";
}

inline std::string_view baseline_verdict_name(BaselineVerdict v)
{
    switch (v) {
    case BaselineVerdict::minimum: return "minimum";
    case BaselineVerdict::maximum: return "maximum";
    case BaselineVerdict::inconclusive_or_saddle: return "inconclusive-or-saddle";
    }
    return "inconclusive-or-saddle";
}

struct TwoByTwoTest {
    double f11 = 0.0;
    double f22 = 0.0;
    double discriminant = 0.0; // f11*f22 - f12^2
    std::array<double, 2> eigenvalues{};
};

struct HessianReport {
    std::size_t dim = 0;
    std::vector<double> matrix; // row-major n x n
    std::vector<double> minors; // leading principal minors, orders 1..n
    EigenSigns eigen_signs = EigenSigns::mixed;
    BaselineVerdict verdict = BaselineVerdict::inconclusive_or_saddle;
    std::optional<TwoByTwoTest> two_by_two;

    double at(std::size_t i, std::size_t j) const { return matrix[i * dim + j]; }
};

/// Determinant of the leading k x k block by Gaussian elimination with
/// partial pivoting.
inline double leading_minor(const std::vector<double>& a, std::size_t n, std::size_t k)
{
    std::vector<double> m(k * k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            m[i * k + j] = a[i * n + j];
        }
    }
    double det = 1.0;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < k; ++r) {
            if (std::fabs(m[r * k + c]) > std::fabs(m[p * k + c])) {
                p = r;
            }
        }
        if (m[p * k + c] == 0.0) {
            return 0.0;
        }
        if (p != c) {
            for (std::size_t j = 0; j < k; ++j) {
                std::swap(m[p * k + j], m[c * k + j]);
            }
            det = -det;
        }
        const double pivot = m[c * k + c];
        det *= pivot;
        for (std::size_t r = c + 1; r < k; ++r) {
            const double f = m[r * k + c] / pivot;
            for (std::size_t j = c; j < k; ++j) {
                m[r * k + j] -= f * m[c * k + j];
            }
        }
    }
    return det;
}

/// Sylvester test on H(x): every leading minor > zero_tol means minimum,
/// minors alternating in sign from negative means maximum, anything else
/// (including a minor within zero_tol of 0) is inconclusive.
inline HessianReport hessian_verdict(const GradientSystem& sys, std::span<const double> x, double zero_tol = 1e-9)
{
    if (!(zero_tol >= 0)) {
        throw Error(Errc::invalid_argument, "zero_tol must be >= 0");
    }
    const std::size_t n = sys.dim();
    HessianReport rep;
    rep.dim = n;
    rep.matrix.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            rep.matrix[i * n + j] = rep.matrix[j * n + i] = sys.hessian(i, j).eval_real(x);
        }
    }
    for (std::size_t k = 1; k <= n; ++k) {
        rep.minors.push_back(leading_minor(rep.matrix, n, k));
    }

    bool any_zero = false;
    bool all_pos = true;
    bool alternating = true;
    for (std::size_t k = 0; k < n; ++k) {
        const double mk = rep.minors[k];
        if (std::fabs(mk) <= zero_tol) {
            any_zero = true;
        }
        all_pos = all_pos && mk > zero_tol;
        // order k+1 must carry sign (-1)^(k+1)
        const bool want_negative = (k % 2) == 0;
        alternating = alternating && (want_negative ? mk < -zero_tol : mk > zero_tol);
    }
    if (any_zero) {
        rep.eigen_signs = EigenSigns::has_zero_within_tolerance;
    } else if (all_pos) {
        rep.eigen_signs = EigenSigns::all_positive;
        rep.verdict = BaselineVerdict::minimum;
    } else if (alternating) {
        rep.eigen_signs = EigenSigns::all_negative;
        rep.verdict = BaselineVerdict::maximum;
    }

    if (n == 2) {
        TwoByTwoTest t;
        const double a = rep.at(0, 0);
        const double b = rep.at(0, 1);
        const double d = rep.at(1, 1);
        t.f11 = a;
        t.f22 = d;
        t.discriminant = a * d - b * b;
        const double mean = 0.5 * (a + d);
        const double r = std::hypot(0.5 * (a - d), b);
        t.eigenvalues = {mean + r, mean - r};
        rep.two_by_two = t;
    }
    return rep;
}

} // namespace extremum

#endif // EXTREMUM_HESSIAN_BASELINE_HPP

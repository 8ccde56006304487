#ifndef EXTREMUM_ROOTFIND_HPP
#define EXTREMUM_ROOTFIND_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "extremum/expr.hpp"
#include "extremum/interval.hpp"

namespace extremum {

struct SolveConfig {
    double tol_x = 1e-8;          // stop bisecting once every axis is this narrow
    std::size_t max_boxes = 200000; // work budget: boxes taken off the queue
    bool use_newton_contraction = true;
};

enum class Uniqueness { verified_unique, possible };
enum class Completeness { complete, truncated };

/// Verified enclosure of (at least one) stationary point.
struct Candidate {
    Box enclosure;
    Uniqueness status = Uniqueness::possible;
    Interval value; // f over the enclosure
    std::size_t leaves = 1;
};

struct SolveResult {
    std::vector<Candidate> candidates; // sorted by lexicographic midpoint
    std::vector<Box> unresolved;       // boxes still queued when the budget ran out
    Completeness completeness = Completeness::complete;
    std::size_t boxes_processed = 0;
    std::string diagnostic;
};

namespace detail {

// Bisection point as a fraction of the axis width. Slightly off-centre so that
// stationary points at symmetric positions (the origin of a symmetric domain,
// most often) fall inside a box instead of onto a split plane.
inline constexpr double split_fraction = 0.5 - 1.0 / 64.0;

inline bool gradient_excludes_zero(const GradientSystem& sys, const Box& x)
{
    for (const auto& g : sys.grad) {
        if (!contains(g.eval_interval(x), 0.0)) {
            return true;
        }
    }
    return false;
}

// Real Gauss-Jordan inverse with partial pivoting; nullopt when (nearly) singular.
inline std::optional<std::vector<double>> invert(std::vector<double> a, std::size_t n)
{
    std::vector<double> inv(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        inv[i * n + i] = 1.0;
    }
    double scale = 0.0;
    for (double v : a) {
        scale = std::max(scale, std::fabs(v));
    }
    if (scale == 0.0 || !std::isfinite(scale)) {
        return std::nullopt;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::fabs(a[r * n + c]) > std::fabs(a[p * n + c])) {
                p = r;
            }
        }
        if (std::fabs(a[p * n + c]) <= 1e-13 * scale) {
            return std::nullopt;
        }
        if (p != c) {
            for (std::size_t k = 0; k < n; ++k) {
                std::swap(a[p * n + k], a[c * n + k]);
                std::swap(inv[p * n + k], inv[c * n + k]);
            }
        }
        const double d = a[c * n + c];
        for (std::size_t k = 0; k < n; ++k) {
            a[c * n + k] /= d;
            inv[c * n + k] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) {
                continue;
            }
            const double f = a[r * n + c];
            if (f == 0.0) {
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
                a[r * n + k] -= f * a[c * n + k];
                inv[r * n + k] -= f * inv[c * n + k];
            }
        }
    }
    return inv;
}

struct KrawczykStep {
    Box image;          // K(X), not yet intersected with X
    bool valid = false; // false when the preconditioner could not be built
};

// K(X) = m - Y g(m) + (I - Y H(X)) (X - m), Y ~ H(m)^-1.
// Every root of g in X lies in K(X); K(X) inside int(X) proves exactly one.
inline KrawczykStep krawczyk(const GradientSystem& sys, const Box& x)
{
    const std::size_t n = sys.dim();
    KrawczykStep step;
    try {
        const Point m = midpoint(x);
        const Box mbox = Box::from_point(m);

        std::vector<double> hm(n * n);
        std::vector<Interval> hx(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                const Expression& h = sys.hessian(i, j);
                hm[i * n + j] = hm[j * n + i] = h.eval_real(m);
                hx[i * n + j] = hx[j * n + i] = h.eval_interval(x);
            }
        }
        const auto y = invert(hm, n);
        if (!y) {
            return step;
        }

        std::vector<Interval> gm(n);
        std::vector<Interval> dx(n);
        for (std::size_t i = 0; i < n; ++i) {
            gm[i] = sys.grad[i].eval_interval(mbox);
            dx[i] = x[i] - Interval(m[i]);
        }

        std::vector<Interval> k(n);
        for (std::size_t i = 0; i < n; ++i) {
            Interval yg(0.0);
            for (std::size_t j = 0; j < n; ++j) {
                yg += Interval((*y)[i * n + j]) * gm[j];
            }
            Interval acc = Interval(m[i]) - yg;
            for (std::size_t j = 0; j < n; ++j) {
                Interval c(i == j ? 1.0 : 0.0);
                for (std::size_t l = 0; l < n; ++l) {
                    c -= Interval((*y)[i * n + l]) * hx[l * n + j];
                }
                acc += c * dx[j];
            }
            k[i] = acc;
        }
        step.image = Box(std::move(k));
        step.valid = true;
    } catch (const Error&) {
        step.valid = false;
    }
    return step;
}

inline bool interior_subset(const Box& inner, const Box& outer)
{
    for (std::size_t i = 0; i < inner.dim(); ++i) {
        if (!extremum::interior_subset(inner[i], outer[i])) {
            return false;
        }
    }
    return true;
}

inline Box intersect(const Box& a, const Box& b)
{
    std::vector<Interval> c(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        c[i] = extremum::intersect(a[i], b[i]);
    }
    return Box(std::move(c));
}

// Contract x with repeated Krawczyk steps while they pay off. Returns false
// when x is proven root-free.
inline bool contract(const GradientSystem& sys, Box& x, bool& unique)
{
    for (int iter = 0; iter < 16; ++iter) {
        const KrawczykStep step = krawczyk(sys, x);
        if (!step.valid) {
            return true;
        }
        if (interior_subset(step.image, x)) {
            unique = true;
        }
        Box next = intersect(step.image, x);
        if (next.is_empty()) {
            return false;
        }
        const double before = max_width(x);
        const double after = max_width(next);
        x = std::move(next);
        if (!(after < 0.75 * before)) {
            break;
        }
    }
    return true;
}

// Uniqueness proof for a cluster. A contracted cluster can be (nearly) a
// point, which no image fits strictly inside, so the test is repeated on
// slightly inflated copies: exactly one root in the inflated box implies at
// most one in the cluster itself.
inline bool verify_unique(const GradientSystem& sys, const Box& x, double tol)
{
    for (const double delta : {0.0, tol, 16 * tol}) {
        Box y = x;
        if (delta > 0.0) {
            for (std::size_t i = 0; i < y.dim(); ++i) {
                const double r = std::max(delta, 0.125 * (x[i].hi() - x[i].lo()));
                y[i] = Interval(rounding::sub_down(x[i].lo(), r), rounding::add_up(x[i].hi(), r));
            }
        }
        const KrawczykStep step = krawczyk(sys, y);
        if (step.valid && interior_subset(step.image, y)) {
            return true;
        }
    }
    return false;
}

// Boxes touch when they overlap or share a face, allowing one ulp of slack.
inline bool touching(const Box& a, const Box& b)
{
    for (std::size_t i = 0; i < a.dim(); ++i) {
        if (a[i].lo() > rounding::next_up(b[i].hi()) || b[i].lo() > rounding::next_up(a[i].hi())) {
            return false;
        }
    }
    return true;
}

inline bool lex_less(const Point& a, const Point& b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline std::vector<Box> merge_clusters(std::vector<Box> leaves, std::vector<std::size_t>& sizes)
{
    std::sort(leaves.begin(), leaves.end(), [](const Box& a, const Box& b) {
        for (std::size_t i = 0; i < a.dim(); ++i) {
            if (a[i].lo() != b[i].lo()) {
                return a[i].lo() < b[i].lo();
            }
            if (a[i].hi() != b[i].hi()) {
                return a[i].hi() < b[i].hi();
            }
        }
        return false;
    });

    std::vector<std::size_t> parent(leaves.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };

    // Sorted by lower edge on axis 0, so the inner scan can stop early.
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const double reach = rounding::next_up(leaves[i][0].hi());
        for (std::size_t j = i + 1; j < leaves.size() && leaves[j][0].lo() <= reach; ++j) {
            if (touching(leaves[i], leaves[j])) {
                parent[find(j)] = find(i);
            }
        }
    }

    std::vector<Box> clusters;
    std::vector<std::size_t> cluster_of(leaves.size(), static_cast<std::size_t>(-1));
    sizes.clear();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const std::size_t r = find(i);
        if (cluster_of[r] == static_cast<std::size_t>(-1)) {
            cluster_of[r] = clusters.size();
            clusters.push_back(leaves[i]);
            sizes.push_back(1);
        } else {
            clusters[cluster_of[r]] = hull(clusters[cluster_of[r]], leaves[i]);
            ++sizes[cluster_of[r]];
        }
    }
    return clusters;
}

// Gap between two boxes in the infinity norm (0 when they overlap).
inline double box_gap(const Box& a, const Box& b)
{
    double g = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        g = std::max({g, rounding::sub_down(b[i].lo(), a[i].hi()), rounding::sub_down(a[i].lo(), b[i].hi())});
    }
    return g;
}

// Near a multiple root the gradient is below rounding noise over a zone much
// wider than tol, and pruning inside that zone leaves scattered fragments.
// Clusters closer to each other than the wider one's own width could never
// get an admissible probe size, so they are joined into one candidate.
inline void coalesce_fragments(std::vector<Box>& clusters, std::vector<std::size_t>& sizes, double tol)
{
    bool changed = true;
    while (changed && clusters.size() > 1) {
        changed = false;
        std::vector<std::size_t> order(clusters.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return clusters[a][0].lo() < clusters[b][0].lo(); });
        double widest = 0.0;
        for (const auto& c : clusters) {
            widest = std::max(widest, max_width(c));
        }
        const double reach = widest + 2 * tol;
        std::vector<bool> gone(clusters.size(), false);
        for (std::size_t oi = 0; oi < order.size(); ++oi) {
            const std::size_t i = order[oi];
            if (gone[i]) {
                continue;
            }
            for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
                const std::size_t j = order[oj];
                if (clusters[j][0].lo() > clusters[i][0].hi() + reach) {
                    break;
                }
                if (gone[j]) {
                    continue;
                }
                const double limit = std::max(max_width(clusters[i]), max_width(clusters[j])) + 2 * tol;
                if (box_gap(clusters[i], clusters[j]) <= limit) {
                    clusters[i] = hull(clusters[i], clusters[j]);
                    sizes[i] += sizes[j];
                    gone[j] = true;
                    changed = true;
                }
            }
        }
        std::vector<Box> kept;
        std::vector<std::size_t> kept_sizes;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            if (!gone[i]) {
                kept.push_back(std::move(clusters[i]));
                kept_sizes.push_back(sizes[i]);
            }
        }
        clusters = std::move(kept);
        sizes = std::move(kept_sizes);
    }
}

} // namespace detail

/// Encloses every solution of grad f = 0 inside `domain`.
///
/// Branch-and-prune: a box is discarded when some gradient component provably
/// has no zero on it; survivors are bisected along the widest axis until every
/// axis is at most tol_x wide. With Newton contraction enabled each box is
/// first tightened by Krawczyk steps. Touching survivors are merged into one
/// candidate per cluster, and clusters nearer to each other than their own
/// width (fragments around a multiple root) are joined as well. When the work budget runs out the result is marked
/// truncated and the still-queued boxes are returned in `unresolved`.
inline SolveResult solve_stationary(const GradientSystem& sys, const Box& domain, const SolveConfig& cfg)
{
    if (domain.dim() != sys.dim()) {
        throw Error(Errc::dimension_mismatch, "domain dimension does not match the formula");
    }
    if (!(cfg.tol_x > 0) || cfg.max_boxes < 1) {
        throw Error(Errc::invalid_argument, "tol_x must be > 0 and max_boxes >= 1");
    }
    for (const auto& c : domain) {
        if (!c.is_bounded()) {
            throw Error(Errc::unbounded_box, "domain must be bounded");
        }
    }

    SolveResult result;
    std::vector<Box> stack{domain};
    std::vector<Box> leaves;

    while (!stack.empty()) {
        if (result.boxes_processed >= cfg.max_boxes) {
            result.completeness = Completeness::truncated;
            result.unresolved = std::move(stack);
            break;
        }
        Box x = std::move(stack.back());
        stack.pop_back();
        ++result.boxes_processed;

        if (detail::gradient_excludes_zero(sys, x)) {
            continue;
        }
        if (cfg.use_newton_contraction) {
            bool unique = false;
            if (!detail::contract(sys, x, unique)) {
                continue;
            }
            if (detail::gradient_excludes_zero(sys, x)) {
                continue;
            }
        }
        if (max_width(x) <= cfg.tol_x) {
            leaves.push_back(std::move(x));
            continue;
        }

        const std::size_t axis = widest_axis(x);
        const Interval c = x[axis];
        double cut = c.lo() + detail::split_fraction * (c.hi() - c.lo());
        if (!(cut > c.lo() && cut < c.hi())) {
            cut = mid(c);
        }
        if (!(cut > c.lo() && cut < c.hi())) {
            // Cannot split further in double precision.
            leaves.push_back(std::move(x));
            continue;
        }
        Box upper = x;
        upper[axis] = Interval(cut, c.hi());
        x[axis] = Interval(c.lo(), cut);
        stack.push_back(std::move(upper));
        stack.push_back(std::move(x));
    }

    const std::size_t leaf_count = leaves.size();
    std::vector<std::size_t> sizes;
    std::vector<Box> clusters = detail::merge_clusters(std::move(leaves), sizes);
    if (result.completeness == Completeness::complete) {
        detail::coalesce_fragments(clusters, sizes, cfg.tol_x);
    }
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        Candidate cand;
        cand.enclosure = clusters[i];
        cand.leaves = sizes[i];
        if (cfg.use_newton_contraction) {
            if (detail::verify_unique(sys, cand.enclosure, cfg.tol_x)) {
                cand.status = Uniqueness::verified_unique;
            }
        }
        cand.value = sys.f.eval_interval(cand.enclosure);
        result.candidates.push_back(std::move(cand));
    }
    std::stable_sort(result.candidates.begin(), result.candidates.end(), [](const Candidate& a, const Candidate& b) {
        return detail::lex_less(midpoint(a.enclosure), midpoint(b.enclosure));
    });

    if (result.completeness == Completeness::truncated) {
        result.diagnostic = "work budget of " + std::to_string(cfg.max_boxes) + " boxes exhausted with "
                            + std::to_string(result.unresolved.size()) + " boxes unresolved and "
                            + std::to_string(clusters.size()) + " candidate clusters";
        // An isolated root leaves a handful of tol-sized leaves; thousands of
        // them point at a curve or surface of stationary points.
        if (leaf_count > 64 * clusters.size() + cfg.max_boxes / 100) {
            result.diagnostic += "; the survivor count keeps growing, the stationary set may be a continuum";
        }
    }
    return result;
}

/// Separation D_k of every candidate: infinity-norm distance from its
/// midpoint to the nearest other candidate midpoint. A lone candidate falls
/// back to its distance from the nearest face of `domain`.
inline std::vector<double> separation_distances(const std::vector<Candidate>& cands, const Box& domain)
{
    std::vector<double> d(cands.size(), rounding::inf);
    if (cands.size() == 1) {
        const Point m = midpoint(cands[0].enclosure);
        if (m.size() != domain.dim()) {
            throw Error(Errc::dimension_mismatch, "candidate and domain dimension differ");
        }
        for (std::size_t i = 0; i < m.size(); ++i) {
            d[0] = std::min({d[0], rounding::sub_down(m[i], domain[i].lo()), rounding::sub_down(domain[i].hi(), m[i])});
        }
        d[0] = std::max(d[0], 0.0);
        return d;
    }
    for (std::size_t k = 0; k < cands.size(); ++k) {
        for (std::size_t j = k + 1; j < cands.size(); ++j) {
            const double dist = distance(cands[k].enclosure, cands[j].enclosure);
            d[k] = std::min(d[k], dist);
            d[j] = std::min(d[j], dist);
        }
    }
    return d;
}

} // namespace extremum

#endif // EXTREMUM_ROOTFIND_HPP

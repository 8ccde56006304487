#ifndef EXTREMUM_CLASSIFIER_HPP
#define EXTREMUM_CLASSIFIER_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "extremum/expr.hpp"
#include "extremum/interval.hpp"
#include "extremum/rootfind.hpp"

namespace extremum {

enum class Verdict { minimum, maximum, saddle, inflection, undecided };

inline std::string_view verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::minimum: return "minimum";
    case Verdict::maximum: return "maximum";
    case Verdict::saddle: return "saddle";
    case Verdict::inflection: return "inflection";
    case Verdict::undecided: return "undecided";
    }
    return "undecided";
}

struct ProbeConfig {
    double epsilon = 0.0;       // half-size of the probe cube
    std::size_t retry_limit = 4;
    double epsilon_floor = 0.0; // half the widest axis of the candidate enclosure
    // Upper end of the admissible band (D_k / 2). Unset: not checked.
    std::optional<double> epsilon_ceiling;
    // Tighten undecided face ranges (second-order Taylor enclosure, then
    // face bisection) before giving up on an attempt. Needs the gradient
    // system.
    bool refine_undecided = true;
};

/// Everything the verdict was derived from. `faces` is ordered
/// F1+, F1-, F2+, F2-, ... and n_intersect + n_greater + n_less == faces.size().
struct ClassificationEvidence {
    Interval reference;          // V_k: f over the candidate enclosure
    std::vector<Interval> faces; // F_j^+ / F_j^- on the final attempt
    std::size_t n_intersect = 0; // faces sharing a value with V_k
    std::size_t n_greater = 0;   // V_k entirely above the face range
    std::size_t n_less = 0;      // V_k entirely below the face range
    double epsilon_used = 0.0;
    std::size_t retries = 0;
    std::size_t attempts = 0;
    // Natural interval evaluations of f (V_k and the 2n faces, per attempt).
    std::size_t interval_evaluations = 0;
    // Evaluations spent refining undecided attempts (Taylor terms and face
    // pieces), counted separately.
    std::size_t refinement_evaluations = 0;
    bool refinement_used = false;
};

struct Classification {
    Verdict verdict = Verdict::undecided;
    ClassificationEvidence evidence;
};

/// The 2n thin boxes tiling the surface of the cube center +- epsilon. Box
/// 2j (2j+1) is pinned at center_j + epsilon (- epsilon) along axis j and
/// spans [center_i - epsilon, center_i + epsilon] on every other axis. All
/// edges are rounded outward.
inline std::vector<Box> build_probe_boxes(std::span<const double> center, double epsilon, std::size_t n)
{
    if (!(epsilon > 0) || !std::isfinite(epsilon)) {
        throw Error(Errc::non_positive_epsilon, "probe half-size must be positive and finite");
    }
    if (center.size() != n) {
        throw Error(Errc::dimension_mismatch, "probe centre has the wrong dimension");
    }
    for (double c : center) {
        if (!std::isfinite(c)) {
            throw Error(Errc::invalid_argument, "probe centre must be finite");
        }
    }

    std::vector<Interval> span(n);
    for (std::size_t i = 0; i < n; ++i) {
        span[i] = Interval(rounding::sub_down(center[i], epsilon), rounding::add_up(center[i], epsilon));
    }
    std::vector<Box> boxes;
    boxes.reserve(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (const double s : {epsilon, -epsilon}) {
            std::vector<Interval> c = span;
            c[j] = Interval(rounding::add_down(center[j], s), rounding::add_up(center[j], s));
            boxes.emplace_back(std::move(c));
        }
    }
    return boxes;
}

/// Decision table: all faces above -> minimum, all below -> maximum, faces
/// strictly on both sides -> saddle (inflection in one dimension).
inline Verdict decide(std::size_t n_less, std::size_t n_greater, std::size_t n)
{
    if (n_less == 2 * n) {
        return Verdict::minimum;
    }
    if (n_greater == 2 * n) {
        return Verdict::maximum;
    }
    if (n_less * n_greater != 0) {
        return n == 1 ? Verdict::inflection : Verdict::saddle;
    }
    return Verdict::undecided;
}

namespace detail {

inline void count_relations(ClassificationEvidence& ev)
{
    ev.n_intersect = ev.n_greater = ev.n_less = 0;
    for (const auto& face : ev.faces) {
        if (strictly_less(face, ev.reference)) {
            ++ev.n_greater;
        } else if (strictly_less(ev.reference, face)) {
            ++ev.n_less;
        } else {
            ++ev.n_intersect;
        }
    }
}

// Second-order enclosure around the probe centre c:
//   f(x) in f(c) + g(c).d + 1/2 d^T H(C) d,  d = x - c,
// valid for every x in the probe cube C (it holds every segment from c to x).
struct TaylorModel {
    Point center;
    Interval fc;
    std::vector<Interval> gc;
    std::vector<Interval> h; // n x n over the cube
    std::size_t evaluations = 0;

    TaylorModel(const GradientSystem& sys, std::span<const double> c, const std::vector<Box>& probes)
        : center(c.begin(), c.end())
    {
        const std::size_t n = sys.dim();
        const Box cbox = Box::from_point(center);
        Box cube = probes[0];
        for (const auto& p : probes) {
            cube = hull(cube, p);
        }
        fc = sys.f.eval_interval(cbox);
        gc.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            gc[i] = sys.grad[i].eval_interval(cbox);
        }
        h.resize(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                h[i * n + j] = h[j * n + i] = sys.hessian(i, j).eval_interval(cube);
            }
        }
        evaluations = 1 + n + n * (n + 1) / 2;
    }

    Interval enclose(const Box& x) const
    {
        const std::size_t n = center.size();
        std::vector<Interval> d(n);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = x[i] - Interval(center[i]);
        }
        Interval linear(0.0);
        Interval quad(0.0);
        for (std::size_t i = 0; i < n; ++i) {
            linear += gc[i] * d[i];
            quad += h[i * n + i] * sqr(d[i]);
            for (std::size_t k = i + 1; k < n; ++k) {
                quad += Interval(2.0) * h[i * n + k] * (d[i] * d[k]);
            }
        }
        return fc + linear + Interval(0.5) * quad;
    }
};

// Tries to show that f over `face` lies strictly above (or below) `ref` by
// bisecting the face. Returns the hull of the pieces on success. Gives up
// when a sample point lands on the wrong side or the piece budget runs out.
inline std::optional<Interval> bisect_face(const Expression& f, const TaylorModel& model, const Box& face,
                                           const Interval& ref, std::size_t budget, std::size_t& evals)
{
    const double fm = f.eval_real(midpoint(face));
    int side = 0;
    if (fm > ref.hi()) {
        side = 1;
    } else if (fm < ref.lo()) {
        side = -1;
    } else {
        return std::nullopt;
    }
    auto settled = [&](const Interval& r) { return side > 0 ? strictly_less(ref, r) : strictly_less(r, ref); };

    Interval acc = Interval::empty();
    std::vector<Box> work{face};
    std::size_t pieces = 0;
    while (!work.empty()) {
        if (++pieces > budget) {
            return std::nullopt;
        }
        Box b = std::move(work.back());
        work.pop_back();
        Interval r = f.eval_interval(b);
        const Interval t = intersect(r, model.enclose(b));
        evals += 2;
        if (!t.is_empty()) {
            r = t;
        }
        if (settled(r)) {
            acc = hull(acc, r);
            continue;
        }
        const double probe = f.eval_real(midpoint(b));
        if (side > 0 ? !(probe > ref.hi()) : !(probe < ref.lo())) {
            return std::nullopt;
        }
        const std::size_t axis = widest_axis(b);
        const Interval c = b[axis];
        const double cut = mid(c);
        if (!(cut > c.lo() && cut < c.hi())) {
            return std::nullopt;
        }
        Box upper = b;
        upper[axis] = Interval(cut, c.hi());
        b[axis] = Interval(c.lo(), cut);
        work.push_back(std::move(upper));
        work.push_back(std::move(b));
    }
    return acc;
}

// Tightens the face ranges of an undecided attempt: first the Taylor
// enclosure on each whole face, then bisection of faces that still overlap
// the reference. Every replacement still encloses f over the face.
inline std::size_t refine_faces(const GradientSystem& sys, std::span<const double> center,
                                const std::vector<Box>& probes, const Interval& ref, std::vector<Interval>& faces)
{
    const TaylorModel model(sys, center, probes);
    std::size_t evals = model.evaluations;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const Interval tighter = intersect(faces[p], model.enclose(probes[p]));
        if (!tighter.is_empty()) {
            faces[p] = tighter;
        }
    }
    constexpr std::size_t pieces_per_face = 512;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        if (strictly_less(faces[p], ref) || strictly_less(ref, faces[p])) {
            continue;
        }
        if (const auto r = bisect_face(sys.f, model, probes[p], ref, pieces_per_face, evals)) {
            const Interval tighter = intersect(faces[p], *r);
            if (!tighter.is_empty()) {
                faces[p] = tighter;
            }
        }
    }
    return evals;
}

inline void check_inside(const std::vector<Box>& probes, const Box& domain)
{
    for (const auto& p : probes) {
        if (!subset(p, domain)) {
            throw Error(Errc::probe_outside_domain, "probe surface leaves the domain");
        }
    }
}

inline Classification classify_impl(const Expression& f, const GradientSystem* sys, const Candidate& cand,
                                    const ProbeConfig& cfg, const Box& domain)
{
    const std::size_t n = f.dim();
    if (cand.enclosure.dim() != n || domain.dim() != n) {
        throw Error(Errc::dimension_mismatch, "candidate, domain and formula dimensions differ");
    }
    if (!(cfg.epsilon > 0) || !std::isfinite(cfg.epsilon)) {
        throw Error(Errc::non_positive_epsilon, "probe half-size must be positive and finite");
    }
    if (cfg.epsilon < cfg.epsilon_floor) {
        throw Error(Errc::epsilon_below_floor, "probe half-size is below half the enclosure width");
    }
    if (cfg.epsilon_ceiling && cfg.epsilon > *cfg.epsilon_ceiling) {
        throw Error(Errc::non_separated_candidate,
                    "probe half-size exceeds half the distance to the nearest other candidate");
    }

    const Point center = midpoint(cand.enclosure);
    Classification out;
    ClassificationEvidence& ev = out.evidence;
    double eps = cfg.epsilon;

    for (;;) {
        const std::vector<Box> probes = build_probe_boxes(center, eps, n);
        check_inside(probes, domain);

        ev.reference = f.eval_interval(cand.enclosure);
        ev.faces.clear();
        for (const auto& p : probes) {
            ev.faces.push_back(f.eval_interval(p));
        }
        ev.interval_evaluations += 1 + probes.size();
        ++ev.attempts;
        ev.epsilon_used = eps;
        count_relations(ev);
        out.verdict = decide(ev.n_less, ev.n_greater, n);

        if (out.verdict == Verdict::undecided && sys != nullptr && cfg.refine_undecided) {
            try {
                ev.refinement_evaluations += refine_faces(*sys, center, probes, ev.reference, ev.faces);
                ev.refinement_used = true;
                count_relations(ev);
                out.verdict = decide(ev.n_less, ev.n_greater, n);
            } catch (const Error&) {
                // Refinement is optional; keep the natural ranges.
            }
        }

        if (out.verdict != Verdict::undecided || ev.retries >= cfg.retry_limit) {
            break;
        }
        const double next = 0.5 * (eps + cfg.epsilon_floor);
        if (next < cfg.epsilon_floor || !(next < eps) || !(next > 0)) {
            break;
        }
        eps = next;
        ++ev.retries;
    }
    return out;
}

} // namespace detail

/// Classify one candidate with the probe-surface test using natural interval
/// evaluation of f only.
inline Classification classify_candidate(const Expression& f, const Candidate& cand, const ProbeConfig& cfg,
                                         const Box& domain)
{
    return detail::classify_impl(f, nullptr, cand, cfg, domain);
}

/// Same test; undecided attempts additionally get their face ranges
/// tightened (Taylor form, face bisection) when cfg.refine_undecided is set.
inline Classification classify_candidate(const GradientSystem& sys, const Candidate& cand, const ProbeConfig& cfg,
                                         const Box& domain)
{
    return detail::classify_impl(sys.f, &sys, cand, cfg, domain);
}

struct ClassifyOptions {
    std::size_t retry_limit = 4;
    std::optional<double> epsilon;             // applies to every candidate
    std::map<std::size_t, double> overrides;   // per candidate index, wins over `epsilon`
    bool refine_undecided = true;
};

/// Per-candidate result of classify_all: either a classification or the
/// error that prevented one.
struct ClassificationOutcome {
    std::optional<Classification> classification;
    std::optional<Errc> error;
    std::string message;
    double separation = 0.0;   // D_k
    double epsilon_floor = 0.0;
    double epsilon_start = 0.0;
    bool boundary_fallback = false; // D_k came from the domain faces (single candidate)

    bool ok() const { return classification.has_value(); }
};

namespace detail {

inline double margin_to_domain(std::span<const double> m, const Box& domain)
{
    double d = rounding::inf;
    for (std::size_t i = 0; i < m.size(); ++i) {
        d = std::min({d, rounding::sub_down(m[i], domain[i].lo()), rounding::sub_down(domain[i].hi(), m[i])});
    }
    return std::max(d, 0.0);
}

inline std::vector<ClassificationOutcome> classify_all_impl(const Expression& f, const GradientSystem* sys,
                                                            const std::vector<Candidate>& cands, const Box& domain,
                                                            const ClassifyOptions& opt)
{
    std::vector<ClassificationOutcome> out(cands.size());
    if (cands.empty()) {
        return out;
    }
    const std::vector<double> sep = separation_distances(cands, domain);

    for (std::size_t k = 0; k < cands.size(); ++k) {
        ClassificationOutcome& o = out[k];
        try {
            const Point m = midpoint(cands[k].enclosure);
            o.separation = sep[k];
            o.boundary_fallback = cands.size() == 1;
            o.epsilon_floor = rounding::mul_up(0.5, max_width(cands[k].enclosure));

            ProbeConfig cfg;
            cfg.retry_limit = opt.retry_limit;
            cfg.epsilon_floor = o.epsilon_floor;
            cfg.epsilon_ceiling = 0.5 * sep[k];
            cfg.refine_undecided = opt.refine_undecided;

            if (auto it = opt.overrides.find(k); it != opt.overrides.end()) {
                cfg.epsilon = it->second;
            } else if (opt.epsilon) {
                cfg.epsilon = *opt.epsilon;
            } else {
                // Largest admissible cube that stays inside the domain.
                const double margin = margin_to_domain(m, domain);
                cfg.epsilon = std::min(*cfg.epsilon_ceiling, rounding::next_down(margin));
                if (cfg.epsilon < cfg.epsilon_floor) {
                    if (*cfg.epsilon_ceiling < cfg.epsilon_floor) {
                        throw Error(Errc::non_separated_candidate,
                                    "candidate is too close to its neighbour for its enclosure width");
                    }
                    throw Error(Errc::probe_outside_domain, "candidate is too close to the domain boundary");
                }
            }
            o.epsilon_start = cfg.epsilon;
            o.classification = classify_impl(f, sys, cands[k], cfg, domain);
        } catch (const Error& e) {
            o.error = e.code();
            o.message = e.what();
        }
    }
    return out;
}

} // namespace detail

/// Classify every candidate. The default probe half-size is D_k / 2 (capped
/// so the probe cube stays inside the domain); failures are recorded per
/// candidate and never abort the batch. Output order matches the input.
inline std::vector<ClassificationOutcome> classify_all(const GradientSystem& sys, const std::vector<Candidate>& cands,
                                                       const Box& domain, const ClassifyOptions& opt = {})
{
    return detail::classify_all_impl(sys.f, &sys, cands, domain, opt);
}

inline std::vector<ClassificationOutcome> classify_all(const Expression& f, const std::vector<Candidate>& cands,
                                                       const Box& domain, const ClassifyOptions& opt = {})
{
    return detail::classify_all_impl(f, nullptr, cands, domain, opt);
}

} // namespace extremum

#endif // EXTREMUM_CLASSIFIER_HPP

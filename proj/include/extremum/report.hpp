#ifndef EXTREMUM_REPORT_HPP
#define EXTREMUM_REPORT_HPP

#include <chrono>
#include <cstddef>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "extremum/classifier.hpp"
#include "extremum/expr.hpp"
#include "extremum/hessian_baseline.hpp"
#include "extremum/problem.hpp"
#include "extremum/rootfind.hpp"

namespace extremum {

// Command-line overrides applied on top of the problem file.
struct RunOptions {
    std::optional<double> epsilon;
    std::optional<std::size_t> retries;
    bool baseline = true;
};

struct CandidateRecord {
    Candidate candidate;
    Point midpoint;
    ClassificationOutcome outcome;
    std::optional<HessianReport> baseline;
};

struct Counters {
    std::size_t interval_evaluations = 0;
    std::size_t refinement_evaluations = 0;
    std::size_t attempts = 0;
};

struct Timing {
    double solve_seconds = 0.0;
    double classify_seconds = 0.0;
    double baseline_seconds = 0.0;
};

struct Report {
    ProblemFile problem;
    ClassifyOptions classify;
    bool baseline_enabled = true;
    Completeness completeness = Completeness::complete;
    std::string diagnostic;
    std::size_t boxes_processed = 0;
    std::size_t unresolved_boxes = 0;
    std::vector<CandidateRecord> records; // lexicographic midpoint order
    Counters counters;
    Timing timing;
};

/// solve -> classify -> baseline for one problem.
inline Report analyze(const ProblemFile& problem, const RunOptions& run = {})
{
    using clock = std::chrono::steady_clock;
    auto seconds_since = [](clock::time_point t0) {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };

    Report rep;
    rep.problem = problem;
    rep.baseline_enabled = run.baseline;
    rep.classify.retry_limit = run.retries.value_or(problem.retry_limit);
    rep.classify.epsilon = run.epsilon ? run.epsilon : problem.epsilon;
    rep.classify.overrides = problem.epsilon_overrides;

    const GradientSystem sys = build_gradient_system(problem.expression());

    auto t0 = clock::now();
    SolveConfig scfg;
    scfg.tol_x = problem.tol_x;
    scfg.max_boxes = problem.max_boxes;
    scfg.use_newton_contraction = problem.newton;
    SolveResult solved = solve_stationary(sys, problem.domain, scfg);
    rep.timing.solve_seconds = seconds_since(t0);
    rep.completeness = solved.completeness;
    rep.diagnostic = solved.diagnostic;
    rep.boxes_processed = solved.boxes_processed;
    rep.unresolved_boxes = solved.unresolved.size();

    t0 = clock::now();
    std::vector<ClassificationOutcome> outcomes;
    if (solved.completeness == Completeness::complete) {
        outcomes = classify_all(sys, solved.candidates, problem.domain, rep.classify);
    } else {
        // Without every stationary point the separation bound is unknown.
        outcomes.resize(solved.candidates.size());
        for (auto& o : outcomes) {
            o.error = Errc::incomplete_candidate_set;
            o.message = "candidate set is truncated; classification skipped";
        }
    }
    rep.timing.classify_seconds = seconds_since(t0);

    t0 = clock::now();
    for (std::size_t k = 0; k < solved.candidates.size(); ++k) {
        CandidateRecord r;
        r.candidate = solved.candidates[k];
        r.midpoint = midpoint(r.candidate.enclosure);
        r.outcome = outcomes[k];
        if (r.outcome.classification) {
            const auto& ev = r.outcome.classification->evidence;
            rep.counters.interval_evaluations += ev.interval_evaluations;
            rep.counters.refinement_evaluations += ev.refinement_evaluations;
            rep.counters.attempts += ev.attempts;
        }
        if (run.baseline) {
            try {
                r.baseline = hessian_verdict(sys, r.midpoint, problem.zero_tol);
            } catch (const Error&) {
                r.baseline.reset();
            }
        }
        rep.records.push_back(std::move(r));
    }
    rep.timing.baseline_seconds = seconds_since(t0);
    return rep;
}

/// 0: every candidate decided; 2: something undecided or unclassifiable.
inline int exit_status(const Report& rep)
{
    for (const auto& r : rep.records) {
        if (!r.outcome.classification || r.outcome.classification->verdict == Verdict::undecided) {
            return 2;
        }
    }
    return rep.completeness == Completeness::complete ? 0 : 2;
}

namespace detail {

using nlohmann::ordered_json;

inline ordered_json interval_json(const Interval& x)
{
    return ordered_json::array({shortest_repr(x.lo()), shortest_repr(x.hi())});
}

inline ordered_json box_json(const Box& b)
{
    ordered_json a = ordered_json::array();
    for (const auto& c : b) {
        a.push_back(interval_json(c));
    }
    return a;
}

inline ordered_json reals_json(const std::vector<double>& v)
{
    ordered_json a = ordered_json::array();
    for (double x : v) {
        a.push_back(shortest_repr(x));
    }
    return a;
}

} // namespace detail

/// Structured report. Reals are shortest round-trip decimal strings; the
/// optional "timing" object is the only non-deterministic part.
inline nlohmann::ordered_json to_json(const Report& rep, bool include_timing = false)
{
    using detail::ordered_json;
    const ProblemFile& p = rep.problem;

    ordered_json overrides = ordered_json::object();
    for (const auto& [k, v] : rep.classify.overrides) {
        overrides[std::to_string(k + 1)] = shortest_repr(v);
    }

    ordered_json j;
    j["formula"] = p.formula;
    j["dimension"] = p.dimension;
    j["domain"] = detail::box_json(p.domain);
    j["norm"] = "infinity";
    j["separation_rule"] = rep.records.size() == 1 ? "domain-boundary-fallback" : "nearest-candidate";
    j["config"] = {
        {"tol_x", shortest_repr(p.tol_x)},
        {"max_boxes", p.max_boxes},
        {"newton", p.newton},
        {"retry_limit", rep.classify.retry_limit},
        {"zero_tol", shortest_repr(p.zero_tol)},
        {"epsilon", rep.classify.epsilon ? ordered_json(shortest_repr(*rep.classify.epsilon)) : ordered_json(nullptr)},
        {"epsilon_overrides", overrides},
        {"refine_undecided", rep.classify.refine_undecided},
        {"baseline", rep.baseline_enabled},
    };
    j["completeness"] = rep.completeness == Completeness::complete ? "complete" : "truncated";
    j["diagnostic"] = rep.diagnostic;
    j["boxes_processed"] = rep.boxes_processed;
    j["unresolved_boxes"] = rep.unresolved_boxes;

    ordered_json cands = ordered_json::array();
    for (std::size_t k = 0; k < rep.records.size(); ++k) {
        const CandidateRecord& r = rep.records[k];
        ordered_json c;
        c["index"] = k + 1;
        c["enclosure"] = detail::box_json(r.candidate.enclosure);
        c["midpoint"] = detail::reals_json(r.midpoint);
        c["status"] = r.candidate.status == Uniqueness::verified_unique ? "verified-unique" : "possible";
        c["value"] = detail::interval_json(r.candidate.value);
        c["separation"] = shortest_repr(r.outcome.separation);
        c["epsilon_floor"] = shortest_repr(r.outcome.epsilon_floor);
        if (r.outcome.classification) {
            const auto& cl = *r.outcome.classification;
            const auto& ev = cl.evidence;
            c["verdict"] = verdict_name(cl.verdict);
            c["error"] = nullptr;
            ordered_json faces = ordered_json::array();
            for (const auto& f : ev.faces) {
                faces.push_back(detail::interval_json(f));
            }
            c["evidence"] = {
                {"reference", detail::interval_json(ev.reference)},
                {"faces", faces},
                {"n_intersect", ev.n_intersect},
                {"n_greater", ev.n_greater},
                {"n_less", ev.n_less},
                {"epsilon_start", shortest_repr(r.outcome.epsilon_start)},
                {"epsilon_used", shortest_repr(ev.epsilon_used)},
                {"retries", ev.retries},
                {"attempts", ev.attempts},
                {"interval_evaluations", ev.interval_evaluations},
                {"refinement_evaluations", ev.refinement_evaluations},
                {"refinement_used", ev.refinement_used},
            };
        } else {
            c["verdict"] = "undecided";
            c["error"] = {{"code", errc_name(r.outcome.error.value_or(Errc::invalid_argument))},
                          {"message", r.outcome.message}};
            c["evidence"] = nullptr;
        }
        if (r.baseline) {
            const HessianReport& h = *r.baseline;
            ordered_json rows = ordered_json::array();
            for (std::size_t i = 0; i < h.dim; ++i) {
                std::vector<double> row(h.matrix.begin() + static_cast<std::ptrdiff_t>(i * h.dim),
                                        h.matrix.begin() + static_cast<std::ptrdiff_t>((i + 1) * h.dim));
                rows.push_back(detail::reals_json(row));
            }
            ordered_json b = {
                {"verdict", baseline_verdict_name(h.verdict)},
                {"eigen_signs", eigen_signs_name(h.eigen_signs)},
                {"matrix", rows},
                {"minors", detail::reals_json(h.minors)},
            };
            if (h.two_by_two) {
                b["two_by_two"] = {
                    {"f11", shortest_repr(h.two_by_two->f11)},
                    {"f22", shortest_repr(h.two_by_two->f22)},
                    {"f11_f22_minus_f12_sq", shortest_repr(h.two_by_two->discriminant)},
                    {"eigenvalues", detail::reals_json({h.two_by_two->eigenvalues[0], h.two_by_two->eigenvalues[1]})},
                };
            }
            c["baseline"] = b;
        } else {
            c["baseline"] = nullptr;
        }
        cands.push_back(std::move(c));
    }
    j["candidates"] = std::move(cands);
    j["counters"] = {
        {"interval_evaluations", rep.counters.interval_evaluations},
        {"refinement_evaluations", rep.counters.refinement_evaluations},
        {"attempts", rep.counters.attempts},
    };
    if (include_timing) {
        j["timing"] = {
            {"solve_seconds", rep.timing.solve_seconds},
            {"classify_seconds", rep.timing.classify_seconds},
            {"baseline_seconds", rep.timing.baseline_seconds},
        };
    }
    return j;
}

inline std::string format_table(const Report& rep, bool show_counters = false)
{
    std::ostringstream os;
    const ProblemFile& p = rep.problem;
    os << "formula:    " << p.formula << '\n';
    os << "domain:     " << p.domain << '\n';
    os << "candidates: " << rep.records.size() << " ("
       << (rep.completeness == Completeness::complete ? "complete" : "truncated") << ", "
       << rep.boxes_processed << " boxes)\n";
    if (!rep.diagnostic.empty()) {
        os << "note:       " << rep.diagnostic << '\n';
    }
    os << '\n';
    os << std::left << std::setw(4) << "#" << std::setw(34) << "midpoint" << std::setw(12) << "verdict"
       << std::setw(4) << "N0" << std::setw(4) << "N>" << std::setw(4) << "N<" << std::setw(14) << "epsilon"
       << std::setw(8) << "retries";
    if (rep.baseline_enabled) {
        os << "baseline";
    }
    os << '\n';
    for (std::size_t k = 0; k < rep.records.size(); ++k) {
        const CandidateRecord& r = rep.records[k];
        std::string mid = "(";
        for (std::size_t i = 0; i < r.midpoint.size(); ++i) {
            std::ostringstream v;
            v << std::setprecision(8) << r.midpoint[i];
            mid += (i ? ", " : "") + v.str();
        }
        mid += ")";
        os << std::setw(4) << (k + 1) << std::setw(34) << mid;
        if (r.outcome.classification) {
            const auto& cl = *r.outcome.classification;
            std::ostringstream e;
            e << std::setprecision(6) << cl.evidence.epsilon_used;
            os << std::setw(12) << verdict_name(cl.verdict) << std::setw(4) << cl.evidence.n_intersect << std::setw(4)
               << cl.evidence.n_greater << std::setw(4) << cl.evidence.n_less << std::setw(14) << e.str()
               << std::setw(8) << cl.evidence.retries;
        } else {
            os << std::setw(12) << "undecided" << std::setw(34)
               << ("[" + std::string(errc_name(r.outcome.error.value_or(Errc::invalid_argument))) + "]");
        }
        if (rep.baseline_enabled) {
            os << (r.baseline ? baseline_verdict_name(r.baseline->verdict) : "n/a");
        }
        os << '\n';
    }
    if (show_counters) {
        os << "\ninterval evaluations of f: " << rep.counters.interval_evaluations << " over "
           << rep.counters.attempts << " attempts\n";
        os << "refinement evaluations: " << rep.counters.refinement_evaluations << '\n';
        os << std::setprecision(4) << "time: solve " << rep.timing.solve_seconds << " s, classify "
           << rep.timing.classify_seconds << " s, baseline " << rep.timing.baseline_seconds << " s\n";
    }
    return os.str();
}

} // namespace extremum

#endif // EXTREMUM_REPORT_HPP

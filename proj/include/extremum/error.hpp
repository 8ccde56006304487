#ifndef EXTREMUM_ERROR_HPP
#define EXTREMUM_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace extremum {

enum class Errc {
    empty_operand,
    zero_in_divisor,
    domain_violation,
    unbounded_box,
    dimension_mismatch,
    syntax_error,
    unknown_variable,
    non_integer_exponent,
    budget_exhausted,
    non_positive_epsilon,
    epsilon_below_floor,
    probe_outside_domain,
    non_separated_candidate,
    incomplete_candidate_set,
    invalid_argument,
    io_error,
};

inline std::string_view errc_name(Errc c)
{
    switch (c) {
    case Errc::empty_operand: return "EmptyOperand";
    case Errc::zero_in_divisor: return "ZeroInDivisor";
    case Errc::domain_violation: return "DomainViolation";
    case Errc::unbounded_box: return "UnboundedBox";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::syntax_error: return "SyntaxError";
    case Errc::unknown_variable: return "UnknownVariable";
    case Errc::non_integer_exponent: return "NonIntegerExponent";
    case Errc::budget_exhausted: return "BudgetExhausted";
    case Errc::non_positive_epsilon: return "NonPositiveEpsilon";
    case Errc::epsilon_below_floor: return "EpsilonBelowFloor";
    case Errc::probe_outside_domain: return "ProbeOutsideDomain";
    case Errc::non_separated_candidate: return "NonSeparatedCandidate";
    case Errc::incomplete_candidate_set: return "IncompleteCandidateSet";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::io_error: return "IoError";
    }
    return "Unknown";
}

// Every failure in the library is reported through this exception type.
// `position` is set for parse errors (0-based offset into the input text).
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what, std::optional<std::size_t> position = std::nullopt)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), position_(position)
    {
    }

    Errc code() const noexcept { return code_; }
    std::optional<std::size_t> position() const noexcept { return position_; }

private:
    Errc code_;
    std::optional<std::size_t> position_;
};

} // namespace extremum

#endif // EXTREMUM_ERROR_HPP

#ifndef EXTREMUM_EXPR_HPP
#define EXTREMUM_EXPR_HPP

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "extremum/error.hpp"
#include "extremum/interval.hpp"

namespace extremum {

enum class Op : std::uint8_t { constant, variable, neg, sqr, exp, ln, sin, cos, add, sub, mul, div, pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// AST node. Constants keep both their nearest double (real evaluation) and
/// an enclosure of the exact literal (interval evaluation).
struct Node {
    Op op = Op::constant;
    double value = 0.0;
    Interval range;
    std::string literal;
    int index = 0; // variable index (0-based) or integer exponent of pow
    NodePtr lhs;
    NodePtr rhs;
};

// Shortest decimal string that parses back to the same double.
inline std::string shortest_repr(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace node {

inline NodePtr constant(const Interval& range, double value, std::string literal = {})
{
    auto n = std::make_shared<Node>();
    n->op = Op::constant;
    n->range = range;
    n->value = value;
    n->literal = std::move(literal);
    return n;
}

inline NodePtr constant(double exact) { return constant(Interval(exact), exact); }

inline NodePtr variable(int index)
{
    auto n = std::make_shared<Node>();
    n->op = Op::variable;
    n->index = index;
    return n;
}

inline NodePtr unary(Op op, NodePtr a)
{
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a);
    return n;
}

inline NodePtr binary(Op op, NodePtr a, NodePtr b)
{
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

inline NodePtr pow(NodePtr base, int k)
{
    auto n = std::make_shared<Node>();
    n->op = Op::pow;
    n->lhs = std::move(base);
    n->index = k;
    return n;
}

inline bool is_unary(Op op) { return op >= Op::neg && op <= Op::cos; }
inline bool is_binary(Op op) { return op >= Op::add && op <= Op::div; }

inline bool is_const(const NodePtr& n) { return n->op == Op::constant; }
inline bool is_const_value(const NodePtr& n, double v) { return is_const(n) && n->range.is_point() && n->range.lo() == v; }
inline bool is_zero(const NodePtr& n) { return is_const_value(n, 0.0); }
inline bool is_one(const NodePtr& n) { return is_const_value(n, 1.0); }

} // namespace node

// Simplifying constructors used by differentiation. Only syntactic,
// value-preserving rewrites; constants are folded only when the folded
// result is exactly representable.
namespace simplify {

namespace detail {

inline Interval apply(Op op, const Interval& a, const Interval& b, int k)
{
    switch (op) {
    case Op::neg: return -a;
    case Op::sqr: return sqr(a);
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::div: return a / b;
    case Op::pow: return pow_int(a, k);
    default: break;
    }
    return Interval::entire();
}

inline NodePtr try_fold(Op op, const NodePtr& a, const NodePtr& b = nullptr, int k = 0)
{
    if (!node::is_const(a) || (b && !node::is_const(b))) {
        return nullptr;
    }
    try {
        const Interval r = apply(op, a->range, b ? b->range : Interval(0.0), k);
        if (r.is_point()) {
            return node::constant(r.lo());
        }
    } catch (const Error&) {
    }
    return nullptr;
}

} // namespace detail

inline NodePtr neg(const NodePtr& a)
{
    if (a->op == Op::neg) {
        return a->lhs;
    }
    if (auto f = detail::try_fold(Op::neg, a)) {
        return f;
    }
    return node::unary(Op::neg, a);
}

inline NodePtr add(const NodePtr& a, const NodePtr& b)
{
    if (node::is_zero(a)) {
        return b;
    }
    if (node::is_zero(b)) {
        return a;
    }
    if (auto f = detail::try_fold(Op::add, a, b)) {
        return f;
    }
    if (b->op == Op::neg) {
        return node::binary(Op::sub, a, b->lhs);
    }
    return node::binary(Op::add, a, b);
}

inline NodePtr sub(const NodePtr& a, const NodePtr& b)
{
    if (node::is_zero(b)) {
        return a;
    }
    if (node::is_zero(a)) {
        return neg(b);
    }
    if (auto f = detail::try_fold(Op::sub, a, b)) {
        return f;
    }
    if (b->op == Op::neg) {
        return node::binary(Op::add, a, b->lhs);
    }
    return node::binary(Op::sub, a, b);
}

inline NodePtr mul(const NodePtr& a, const NodePtr& b)
{
    if (node::is_zero(a) || node::is_zero(b)) {
        return node::constant(0.0);
    }
    if (node::is_one(a)) {
        return b;
    }
    if (node::is_one(b)) {
        return a;
    }
    if (auto f = detail::try_fold(Op::mul, a, b)) {
        return f;
    }
    if (node::is_const(b) && !node::is_const(a)) {
        return mul(b, a);
    }
    // c1 * (c2 * u) -> (c1*c2) * u
    if (node::is_const(a) && b->op == Op::mul && node::is_const(b->lhs)) {
        if (auto c = detail::try_fold(Op::mul, a, b->lhs)) {
            return mul(c, b->rhs);
        }
    }
    return node::binary(Op::mul, a, b);
}

inline NodePtr div(const NodePtr& a, const NodePtr& b)
{
    if (node::is_one(b)) {
        return a;
    }
    if (node::is_zero(a) && !node::is_zero(b)) {
        return node::constant(0.0);
    }
    if (auto f = detail::try_fold(Op::div, a, b)) {
        return f;
    }
    return node::binary(Op::div, a, b);
}

inline NodePtr pow(const NodePtr& a, int k)
{
    if (k == 0) {
        return node::constant(1.0);
    }
    if (k == 1) {
        return a;
    }
    if (auto f = detail::try_fold(Op::pow, a, nullptr, k)) {
        return f;
    }
    return node::pow(a, k);
}

inline NodePtr fn(Op op, const NodePtr& a)
{
    if (op == Op::sqr) {
        if (auto f = detail::try_fold(Op::sqr, a)) {
            return f;
        }
    }
    return node::unary(op, a);
}

} // namespace simplify

namespace detail {

struct Instr {
    Op op;
    int index;
    double value;
    Interval range;
};

struct Tape {
    std::vector<Instr> code;
    std::size_t max_stack = 0;
};

inline void compile(const Node& n, Tape& tape, std::size_t& depth)
{
    switch (n.op) {
    case Op::constant:
    case Op::variable:
        tape.code.push_back({n.op, n.index, n.value, n.range});
        ++depth;
        break;
    case Op::pow:
        compile(*n.lhs, tape, depth);
        tape.code.push_back({n.op, n.index, 0.0, Interval()});
        break;
    default:
        compile(*n.lhs, tape, depth);
        if (n.rhs) {
            compile(*n.rhs, tape, depth);
            tape.code.push_back({n.op, 0, 0.0, Interval()});
            --depth;
        } else {
            tape.code.push_back({n.op, 0, 0.0, Interval()});
        }
        break;
    }
    tape.max_stack = std::max(tape.max_stack, depth);
}

} // namespace detail

/// Immutable formula f(x1..xn). Evaluation runs over a flattened postfix
/// program built once at construction.
class Expression {
public:
    Expression() : Expression(node::constant(0.0), 1) {}

    Expression(NodePtr root, std::size_t dim) : root_(std::move(root)), dim_(dim)
    {
        auto tape = std::make_shared<detail::Tape>();
        std::size_t depth = 0;
        detail::compile(*root_, *tape, depth);
        tape_ = std::move(tape);
    }

    std::size_t dim() const { return dim_; }
    const Node& root() const { return *root_; }
    const NodePtr& root_ptr() const { return root_; }

    /// Nearest-rounded evaluation. ln of a non-positive value, division by
    /// zero and 0^negative are reported as Errc::domain_violation.
    double eval_real(std::span<const double> x) const
    {
        check_dim(x.size());
        std::vector<double> st;
        st.reserve(tape_->max_stack);
        for (const auto& in : tape_->code) {
            switch (in.op) {
            case Op::constant: st.push_back(in.value); break;
            case Op::variable: st.push_back(x[static_cast<std::size_t>(in.index)]); break;
            case Op::neg: st.back() = -st.back(); break;
            case Op::sqr: st.back() = st.back() * st.back(); break;
            case Op::exp: st.back() = std::exp(st.back()); break;
            case Op::ln:
                if (!(st.back() > 0)) {
                    throw Error(Errc::domain_violation, "ln of a non-positive value");
                }
                st.back() = std::log(st.back());
                break;
            case Op::sin: st.back() = std::sin(st.back()); break;
            case Op::cos: st.back() = std::cos(st.back()); break;
            case Op::pow:
                if (in.index < 0 && st.back() == 0) {
                    throw Error(Errc::domain_violation, "zero raised to a negative power");
                }
                st.back() = std::pow(st.back(), in.index);
                break;
            default: {
                const double b = st.back();
                st.pop_back();
                double& a = st.back();
                switch (in.op) {
                case Op::add: a += b; break;
                case Op::sub: a -= b; break;
                case Op::mul: a *= b; break;
                case Op::div:
                    if (b == 0) {
                        throw Error(Errc::domain_violation, "division by zero");
                    }
                    a /= b;
                    break;
                default: break;
                }
            }
            }
        }
        return st.back();
    }

    /// Natural interval extension over a box: every real value of f on the
    /// box lies in the result.
    Interval eval_interval(const Box& box) const
    {
        check_dim(box.dim());
        std::vector<Interval> st;
        st.reserve(tape_->max_stack);
        for (const auto& in : tape_->code) {
            switch (in.op) {
            case Op::constant: st.push_back(in.range); break;
            case Op::variable: st.push_back(box[static_cast<std::size_t>(in.index)]); break;
            case Op::neg: st.back() = -st.back(); break;
            case Op::sqr: st.back() = sqr(st.back()); break;
            case Op::exp: st.back() = exp(st.back()); break;
            case Op::ln: st.back() = ln(st.back()); break;
            case Op::sin: st.back() = sin(st.back()); break;
            case Op::cos: st.back() = cos(st.back()); break;
            case Op::pow: st.back() = pow_int(st.back(), in.index); break;
            default: {
                const Interval b = st.back();
                st.pop_back();
                Interval& a = st.back();
                switch (in.op) {
                case Op::add: a = a + b; break;
                case Op::sub: a = a - b; break;
                case Op::mul: a = a * b; break;
                case Op::div: a = a / b; break;
                default: break;
                }
            }
            }
        }
        return st.back();
    }

private:
    void check_dim(std::size_t n) const
    {
        if (n != dim_) {
            throw Error(Errc::dimension_mismatch,
                        "expected " + std::to_string(dim_) + " coordinates, got " + std::to_string(n));
        }
    }

    NodePtr root_;
    std::size_t dim_;
    std::shared_ptr<const detail::Tape> tape_;
};

inline double eval_real(const Expression& e, std::span<const double> x) { return e.eval_real(x); }
inline Interval eval_interval(const Expression& e, const Box& b) { return e.eval_interval(b); }

namespace detail {

inline std::string_view function_name(Op op)
{
    switch (op) {
    case Op::neg: return "-";
    case Op::sqr: return "sqr";
    case Op::exp: return "exp";
    case Op::ln: return "ln";
    case Op::sin: return "sin";
    case Op::cos: return "cos";
    default: return "?";
    }
}

// 1: + -   2: * /   3: unary minus   4: ^   5: atoms and calls
inline int precedence(const Node& n)
{
    switch (n.op) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    case Op::constant: {
        const bool negative = n.literal.empty() ? std::signbit(n.value) : n.literal.front() == '-';
        return negative ? 3 : 5;
    }
    default: return 5;
    }
}

inline void print(const Node& n, std::string& out);

inline void print_wrapped(const Node& n, int min_prec, std::string& out)
{
    const bool parens = precedence(n) < min_prec;
    if (parens) {
        out += '(';
    }
    print(n, out);
    if (parens) {
        out += ')';
    }
}

inline void print(const Node& n, std::string& out)
{
    switch (n.op) {
    case Op::constant: out += n.literal.empty() ? shortest_repr(n.value) : n.literal; return;
    case Op::variable: out += 'x' + std::to_string(n.index + 1); return;
    case Op::neg:
        out += '-';
        print_wrapped(*n.lhs, 3, out);
        return;
    case Op::pow:
        print_wrapped(*n.lhs, 5, out);
        out += '^' + std::to_string(n.index);
        return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: {
        const int p = precedence(n);
        print_wrapped(*n.lhs, p, out);
        switch (n.op) {
        case Op::add: out += " + "; break;
        case Op::sub: out += " - "; break;
        case Op::mul: out += '*'; break;
        default: out += '/'; break;
        }
        print_wrapped(*n.rhs, p + 1, out);
        return;
    }
    default:
        out += function_name(n.op);
        out += '(';
        print(*n.lhs, out);
        out += ')';
        return;
    }
}

class Parser {
public:
    Parser(std::string_view text, std::size_t dim) : s_(text), dim_(dim) {}

    NodePtr parse()
    {
        skip();
        if (pos_ == s_.size()) {
            fail("empty formula");
        }
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) {
            fail(std::string("unexpected '") + s_[pos_] + "'");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg, Errc code = Errc::syntax_error) const { fail_at(pos_, msg, code); }

    [[noreturn]] void fail_at(std::size_t at, const std::string& msg, Errc code = Errc::syntax_error) const
    {
        throw Error(code, msg + " at offset " + std::to_string(at), at);
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'");
        }
    }

    NodePtr expr()
    {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = node::binary(Op::add, lhs, term());
            } else if (accept('-')) {
                lhs = node::binary(Op::sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term()
    {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = node::binary(Op::mul, lhs, unary());
            } else if (accept('/')) {
                lhs = node::binary(Op::div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary()
    {
        if (accept('-')) {
            return node::unary(Op::neg, unary());
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    // '^' binds tighter than unary minus and is right-associative; the
    // exponent must reduce to an integer constant.
    NodePtr power()
    {
        NodePtr base = primary();
        if (!accept('^')) {
            return base;
        }
        skip();
        const std::size_t at = pos_;
        const NodePtr e = unary();
        return node::pow(base, integer_exponent(e, at));
    }

    int integer_exponent(const NodePtr& e, std::size_t at) const
    {
        Interval v;
        try {
            v = Expression(e, 1).eval_interval(Box{Interval(0.0)});
        } catch (const Error&) {
            fail_at(at, "exponent is not a constant", Errc::non_integer_exponent);
        }
        if (has_variable(*e) || !v.is_point() || std::trunc(v.lo()) != v.lo() || std::fabs(v.lo()) > 1e6) {
            fail_at(at, "exponent must be an integer literal", Errc::non_integer_exponent);
        }
        return static_cast<int>(v.lo());
    }

    static bool has_variable(const Node& n)
    {
        if (n.op == Op::variable) {
            return true;
        }
        return (n.lhs && has_variable(*n.lhs)) || (n.rhs && has_variable(*n.rhs));
    }

    NodePtr primary()
    {
        skip();
        if (pos_ == s_.size()) {
            fail("unexpected end of formula");
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            return identifier();
        }
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        fail(std::string("unexpected '") + c + "'");
    }

    NodePtr number()
    {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t k = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
                ++k;
            }
            return k;
        };
        std::size_t count = digits();
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0) {
            fail_at(start, "malformed number");
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
                ++pos_;
            }
            if (digits() == 0) {
                fail_at(start, "malformed exponent in number");
            }
        }
        const std::string text(s_.substr(start, pos_ - start));
        const double nearest = std::strtod(text.c_str(), nullptr);
        if (!std::isfinite(nearest)) {
            fail_at(start, "number out of range");
        }
        return node::constant(Interval::from_decimal(text), nearest, text);
    }

    NodePtr identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = s_.substr(start, pos_ - start);

        static constexpr std::pair<std::string_view, Op> functions[] = {
            {"sin", Op::sin}, {"cos", Op::cos}, {"exp", Op::exp}, {"ln", Op::ln}, {"sqr", Op::sqr}};
        for (const auto& [fname, op] : functions) {
            if (name == fname) {
                expect('(');
                NodePtr arg = expr();
                expect(')');
                return node::unary(op, arg);
            }
        }

        int index = -1;
        if (name.size() == 1 && dim_ <= 3 && (name[0] == 'x' || name[0] == 'y' || name[0] == 'z')) {
            index = name[0] - 'x';
        } else if (name.size() > 1 && name[0] == 'x' && name[1] != '0'
                   && name.substr(1).find_first_not_of("0123456789") == std::string_view::npos && name.size() < 10) {
            index = std::stoi(std::string(name.substr(1))) - 1;
        }
        if (index < 0 || static_cast<std::size_t>(index) >= dim_) {
            fail_at(start, "unknown variable '" + std::string(name) + "'", Errc::unknown_variable);
        }
        return node::variable(index);
    }

    std::string_view s_;
    std::size_t dim_;
    std::size_t pos_ = 0;
};

inline NodePtr derivative(const NodePtr& e, int j)
{
    using namespace simplify;
    const Node& n = *e;
    switch (n.op) {
    case Op::constant: return node::constant(0.0);
    case Op::variable: return node::constant(n.index == j ? 1.0 : 0.0);
    case Op::neg: return neg(derivative(n.lhs, j));
    case Op::add: return add(derivative(n.lhs, j), derivative(n.rhs, j));
    case Op::sub: return sub(derivative(n.lhs, j), derivative(n.rhs, j));
    case Op::mul: return add(mul(derivative(n.lhs, j), n.rhs), mul(n.lhs, derivative(n.rhs, j)));
    case Op::div: {
        const NodePtr du = derivative(n.lhs, j);
        const NodePtr dv = derivative(n.rhs, j);
        if (node::is_zero(dv)) {
            return div(du, n.rhs);
        }
        return div(sub(mul(du, n.rhs), mul(n.lhs, dv)), pow(n.rhs, 2));
    }
    case Op::pow:
        return mul(mul(node::constant(static_cast<double>(n.index)), pow(n.lhs, n.index - 1)), derivative(n.lhs, j));
    case Op::sqr: return mul(mul(node::constant(2.0), n.lhs), derivative(n.lhs, j));
    case Op::exp: return mul(e, derivative(n.lhs, j));
    case Op::ln: return div(derivative(n.lhs, j), n.lhs);
    case Op::sin: return mul(fn(Op::cos, n.lhs), derivative(n.lhs, j));
    case Op::cos: return neg(mul(fn(Op::sin, n.lhs), derivative(n.lhs, j)));
    }
    return node::constant(0.0);
}

} // namespace detail

/// Formula grammar:
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := ('-' | '+') unary | power
///     power   := primary ('^' unary)?          exponent: integer constant
///     primary := number | variable | func '(' expr ')' | '(' expr ')'
///     func    := sin | cos | exp | ln | sqr
///     variable:= x1 .. xn  (x, y, z also accepted when n <= 3)
///
/// Errors carry the 0-based offset of the offending character.
inline Expression parse(std::string_view text, std::size_t dim)
{
    if (dim == 0) {
        throw Error(Errc::invalid_argument, "dimension must be at least 1");
    }
    return Expression(detail::Parser(text, dim).parse(), dim);
}

inline std::string to_string(const Expression& e)
{
    std::string out;
    detail::print(e.root(), out);
    return out;
}

/// Exact symbolic partial derivative with respect to variable j (0-based).
inline Expression differentiate(const Expression& e, std::size_t j)
{
    if (j >= e.dim()) {
        throw Error(Errc::invalid_argument, "derivative variable out of range");
    }
    return Expression(detail::derivative(e.root_ptr(), static_cast<int>(j)), e.dim());
}

/// f together with its gradient and Hessian. The Hessian is stored once per
/// unordered pair (i <= j), so hessian(i, j) and hessian(j, i) are the same
/// expression.
struct GradientSystem {
    Expression f;
    std::vector<Expression> grad;
    std::vector<Expression> hessian_upper;

    std::size_t dim() const { return f.dim(); }

    const Expression& hessian(std::size_t i, std::size_t j) const
    {
        if (i > j) {
            std::swap(i, j);
        }
        const std::size_t n = dim();
        return hessian_upper[i * n - i * (i - 1) / 2 + (j - i)];
    }
};

inline GradientSystem build_gradient_system(const Expression& f)
{
    GradientSystem sys;
    sys.f = f;
    const std::size_t n = f.dim();
    sys.grad.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        sys.grad.push_back(differentiate(f, j));
    }
    sys.hessian_upper.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            sys.hessian_upper.push_back(differentiate(sys.grad[i], j));
        }
    }
    return sys;
}

} // namespace extremum

#endif // EXTREMUM_EXPR_HPP

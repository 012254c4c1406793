#ifndef AERANGE_EXPR_HPP
#define AERANGE_EXPR_HPP

#include <cctype>
#include <charconv>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "interval.hpp"

namespace aerange
{

enum class Op
{
    Const,
    Var,
    Param,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    PowInt,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

// Var and Param nodes carry an index into the evaluation environment and the
// parameter table respectively; the name is kept for printing.
struct ExprNode
{
    Op op = Op::Const;
    double value = 0.0;
    std::size_t index = 0;
    int exponent = 0;
    std::string name;
    ExprPtr lhs;
    ExprPtr rhs;
};

class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": " + message),
          line_(line), column_(column)
    {
    }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// Raised when evaluation leaves a function's domain; the message names the
// offending subexpression.
class EvalError : public DomainError
{
public:
    using DomainError::DomainError;
};

class Expr
{
public:
    Expr() : root_(make_const(0.0)) {}
    explicit Expr(ExprPtr root) : root_(std::move(root)) {}

    const ExprNode& root() const { return *root_; }
    const ExprPtr& ptr() const { return root_; }

    static ExprPtr make_const(double v)
    {
        auto n = std::make_shared<ExprNode>();
        n->op = Op::Const;
        n->value = v;
        return n;
    }
    static ExprPtr make_var(std::size_t index, std::string name)
    {
        auto n = std::make_shared<ExprNode>();
        n->op = Op::Var;
        n->index = index;
        n->name = std::move(name);
        return n;
    }
    static ExprPtr make_param(std::size_t index, std::string name)
    {
        auto n = std::make_shared<ExprNode>();
        n->op = Op::Param;
        n->index = index;
        n->name = std::move(name);
        return n;
    }
    static ExprPtr make_unary(Op op, ExprPtr a, int exponent = 0)
    {
        auto n = std::make_shared<ExprNode>();
        n->op = op;
        n->lhs = std::move(a);
        n->exponent = exponent;
        return n;
    }
    static ExprPtr make_binary(Op op, ExprPtr a, ExprPtr b)
    {
        auto n = std::make_shared<ExprNode>();
        n->op = op;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        return n;
    }

private:
    ExprPtr root_;
};

inline const char* function_name(Op op)
{
    switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    default: return nullptr;
    }
}

// Fully parenthesized rendering; parsing it back yields the same tree.
inline void print(std::ostream& os, const ExprNode& n)
{
    switch (n.op) {
    case Op::Const: os << format_double(n.value); break;
    case Op::Var:
    case Op::Param: os << n.name; break;
    case Op::Neg:
        os << "(-";
        print(os, *n.lhs);
        os << ")";
        break;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
        const char sym = n.op == Op::Add ? '+' : n.op == Op::Sub ? '-' : n.op == Op::Mul ? '*' : '/';
        os << "(";
        print(os, *n.lhs);
        os << " " << sym << " ";
        print(os, *n.rhs);
        os << ")";
        break;
    }
    case Op::PowInt:
        os << "(";
        print(os, *n.lhs);
        os << "^" << n.exponent << ")";
        break;
    default:
        os << function_name(n.op) << "(";
        print(os, *n.lhs);
        os << ")";
        break;
    }
}

inline std::string to_string(const Expr& e)
{
    std::ostringstream os;
    print(os, e.root());
    return os.str();
}

inline bool structurally_equal(const ExprNode& a, const ExprNode& b)
{
    if (a.op != b.op) {
        return false;
    }
    switch (a.op) {
    case Op::Const: return a.value == b.value;
    case Op::Var:
    case Op::Param: return a.index == b.index && a.name == b.name;
    case Op::PowInt: return a.exponent == b.exponent && structurally_equal(*a.lhs, *b.lhs);
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
    default: return structurally_equal(*a.lhs, *b.lhs);
    }
}

inline bool structurally_equal(const Expr& a, const Expr& b)
{
    return structurally_equal(a.root(), b.root());
}

// Name resolution for the parser.
struct Identifier
{
    enum class Kind
    {
        Var,
        Param
    };
    Kind kind;
    std::size_t index;
};
using Resolver = std::function<std::optional<Identifier>(std::string_view)>;

namespace detail
{

class ExprParser
{
public:
    ExprParser(std::string_view text, const Resolver& resolve, std::size_t line, std::size_t column)
        : text_(text), resolve_(resolve), line_(line), column0_(column)
    {
    }

    ExprPtr parse()
    {
        ExprPtr e = parse_sum();
        skip_space();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t pos) const
    {
        throw ParseError(msg, line_, column0_ + pos);
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
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

    ExprPtr parse_sum()
    {
        ExprPtr lhs = parse_product();
        for (;;) {
            if (accept('+')) {
                lhs = Expr::make_binary(Op::Add, lhs, parse_product());
            } else if (accept('-')) {
                lhs = Expr::make_binary(Op::Sub, lhs, parse_product());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_product()
    {
        ExprPtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = Expr::make_binary(Op::Mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = Expr::make_binary(Op::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_unary()
    {
        if (accept('-')) {
            return Expr::make_unary(Op::Neg, parse_unary());
        }
        if (accept('+')) {
            return parse_unary();
        }
        return parse_power();
    }

    ExprPtr parse_power()
    {
        ExprPtr base = parse_primary();
        if (accept('^')) {
            skip_space();
            const std::size_t start = pos_;
            const bool negative = accept('-');
            skip_space();
            int n = 0;
            const char* first = text_.data() + pos_;
            const char* last = text_.data() + text_.size();
            auto [ptr, ec] = std::from_chars(first, last, n);
            if (ec != std::errc() || ptr == first) {
                fail_at("exponent must be an integer literal", start);
            }
            pos_ += static_cast<std::size_t>(ptr - first);
            if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
                fail_at("exponent must be an integer literal", start);
            }
            return Expr::make_unary(Op::PowInt, base, negative ? -n : n);
        }
        return base;
    }

    ExprPtr parse_primary()
    {
        skip_space();
        if (pos_ >= text_.size()) {
            fail("unexpected end of expression");
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view name = text_.substr(start, pos_ - start);
            skip_space();
            if (pos_ < text_.size() && text_[pos_] == '(') {
                const Op op = function_op(name);
                if (op == Op::Const) {
                    fail_at("unknown function '" + std::string(name) + "'", start);
                }
                ++pos_;
                ExprPtr arg = parse_sum();
                expect(')');
                return Expr::make_unary(op, arg);
            }
            const auto id = resolve_ ? resolve_(name) : std::nullopt;
            if (!id) {
                fail_at("undeclared identifier '" + std::string(name) + "'", start);
            }
            if (id->kind == Identifier::Kind::Var) {
                return Expr::make_var(id->index, std::string(name));
            }
            return Expr::make_param(id->index, std::string(name));
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    ExprPtr parse_number()
    {
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr == first) {
            fail("malformed number");
        }
        pos_ += static_cast<std::size_t>(ptr - first);
        return Expr::make_const(v);
    }

    static Op function_op(std::string_view name)
    {
        if (name == "sin") return Op::Sin;
        if (name == "cos") return Op::Cos;
        if (name == "exp") return Op::Exp;
        if (name == "log") return Op::Log;
        if (name == "sqrt") return Op::Sqrt;
        return Op::Const;
    }

    std::string_view text_;
    const Resolver& resolve_;
    std::size_t line_;
    std::size_t column0_;
    std::size_t pos_ = 0;
};

} // namespace detail

// `column` is the 1-based column of text[0] within its source line.
inline Expr parse_expression(std::string_view text, const Resolver& resolve, std::size_t line = 1,
                             std::size_t column = 1)
{
    return Expr(detail::ExprParser(text, resolve, line, column).parse());
}

// Convenience: variables resolved positionally from a list of names.
inline Expr parse_expression(std::string_view text, const std::vector<std::string>& vars,
                             const std::vector<std::string>& params = {})
{
    Resolver r = [&](std::string_view name) -> std::optional<Identifier> {
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (vars[i] == name) {
                return Identifier{Identifier::Kind::Var, i};
            }
        }
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (params[i] == name) {
                return Identifier{Identifier::Kind::Param, i};
            }
        }
        return std::nullopt;
    };
    return parse_expression(text, r);
}

// Structural evaluation in scalar type S. S must be constructible from
// double and provide the arithmetic and elementary functions.
template <class S>
S eval(const ExprNode& n, std::span<const S> env, std::span<const double> params)
{
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    switch (n.op) {
    case Op::Const: return S(n.value);
    case Op::Var:
        if (n.index >= env.size()) {
            throw std::out_of_range("unbound variable '" + n.name + "'");
        }
        return env[n.index];
    case Op::Param:
        if (n.index >= params.size()) {
            throw std::out_of_range("unbound parameter '" + n.name + "'");
        }
        return S(params[n.index]);
    default: break;
    }
    S a = eval(*n.lhs, env, params);
    try {
        switch (n.op) {
        case Op::Neg: return -a;
        case Op::Add: return a + eval(*n.rhs, env, params);
        case Op::Sub: return a - eval(*n.rhs, env, params);
        case Op::Mul: return a * eval(*n.rhs, env, params);
        case Op::Div: {
            S b = eval(*n.rhs, env, params);
            return a / b;
        }
        case Op::PowInt: return pow_int(a, n.exponent);
        case Op::Sin: return sin(a);
        case Op::Cos: return cos(a);
        case Op::Exp: return exp(a);
        case Op::Log: return log(a);
        case Op::Sqrt: return sqrt(a);
        default: break;
        }
    } catch (const EvalError&) {
        throw;
    } catch (const DomainError& e) {
        std::ostringstream os;
        print(os, n);
        throw EvalError(std::string(e.what()) + " in " + os.str());
    }
    throw std::logic_error("eval: unknown node");
}

template <class S>
S eval(const Expr& e, std::span<const S> env, std::span<const double> params = {})
{
    return eval<S>(e.root(), env, params);
}

template <class S>
std::vector<S> eval(std::span<const Expr> es, std::span<const S> env, std::span<const double> params = {})
{
    std::vector<S> out;
    out.reserve(es.size());
    for (const auto& e : es) {
        out.push_back(eval<S>(e.root(), env, params));
    }
    return out;
}

// Highest variable index referenced plus one.
inline std::size_t variable_extent(const ExprNode& n)
{
    switch (n.op) {
    case Op::Const:
    case Op::Param: return 0;
    case Op::Var: return n.index + 1;
    default: {
        std::size_t m = variable_extent(*n.lhs);
        if (n.rhs) {
            m = std::max(m, variable_extent(*n.rhs));
        }
        return m;
    }
    }
}

} // namespace aerange

#endif

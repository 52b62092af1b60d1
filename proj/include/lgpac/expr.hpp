#pragma once

// Small arithmetic expression AST shared by the network description language:
// constant definitions (functions of x) and stream bindings (functions of t,
// or of t and x). Supports evaluation, canonical printing and the symbolic
// time derivative needed to close stream bindings under differentiation.

#include <cmath>
#include <charconv>
#include <memory>
#include <stdexcept>
#include <string>

namespace lgpac {

struct AstNode;
using AstPtr = std::shared_ptr<const AstNode>;

struct AstNode {
    enum class Kind { Number, Variable, Negate, Binary, Call };
    Kind kind;
    double number = 0.0;
    std::string name;  // Variable: "x" or "t"; Call: function name
    char op = 0;       // Binary: one of + - * / ^
    AstPtr lhs, rhs;   // Negate/Call use lhs only
};

/// Shortest round-trip decimal form of a double (also used by the printers
/// and CSV writers, so output is deterministic across runs).
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline AstPtr ast_number(double v) {
    auto n = std::make_shared<AstNode>();
    n->kind = AstNode::Kind::Number;
    n->number = v;
    return n;
}

inline AstPtr ast_variable(std::string name) {
    auto n = std::make_shared<AstNode>();
    n->kind = AstNode::Kind::Variable;
    n->name = std::move(name);
    return n;
}

inline AstPtr ast_negate(AstPtr a) {
    if (a->kind == AstNode::Kind::Number) return ast_number(-a->number);
    auto n = std::make_shared<AstNode>();
    n->kind = AstNode::Kind::Negate;
    n->lhs = std::move(a);
    return n;
}

inline AstPtr ast_binary(char op, AstPtr a, AstPtr b) {
    auto is_num = [](const AstPtr& p, double v) {
        return p->kind == AstNode::Kind::Number && p->number == v;
    };
    if (a->kind == AstNode::Kind::Number && b->kind == AstNode::Kind::Number) {
        switch (op) {
            case '+': return ast_number(a->number + b->number);
            case '-': return ast_number(a->number - b->number);
            case '*': return ast_number(a->number * b->number);
            case '/': if (b->number != 0) return ast_number(a->number / b->number); break;
            case '^': return ast_number(std::pow(a->number, b->number));
        }
    }
    if (op == '+') {
        if (is_num(a, 0)) return b;
        if (is_num(b, 0)) return a;
    } else if (op == '-') {
        if (is_num(b, 0)) return a;
        if (is_num(a, 0)) return ast_negate(b);
    } else if (op == '*') {
        if (is_num(a, 0) || is_num(b, 0)) return ast_number(0);
        if (is_num(a, 1)) return b;
        if (is_num(b, 1)) return a;
    } else if (op == '/') {
        if (is_num(a, 0)) return ast_number(0);
        if (is_num(b, 1)) return a;
    } else if (op == '^') {
        if (is_num(b, 1)) return a;
    }
    auto n = std::make_shared<AstNode>();
    n->kind = AstNode::Kind::Binary;
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

inline AstPtr ast_call(std::string fn, AstPtr arg) {
    auto n = std::make_shared<AstNode>();
    n->kind = AstNode::Kind::Call;
    n->name = std::move(fn);
    n->lhs = std::move(arg);
    return n;
}

inline bool ast_is_known_function(const std::string& fn) {
    return fn == "sin" || fn == "cos" || fn == "exp" || fn == "log" ||
           fn == "atan" || fn == "sqrt";
}

inline double ast_eval(const AstPtr& e, double x, double t) {
    switch (e->kind) {
        case AstNode::Kind::Number: return e->number;
        case AstNode::Kind::Variable:
            if (e->name == "x") return x;
            if (e->name == "t") return t;
            throw std::logic_error("ast_eval: unknown variable " + e->name);
        case AstNode::Kind::Negate: return -ast_eval(e->lhs, x, t);
        case AstNode::Kind::Binary: {
            double a = ast_eval(e->lhs, x, t);
            double b = ast_eval(e->rhs, x, t);
            switch (e->op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                case '^': return std::pow(a, b);
            }
            throw std::logic_error("ast_eval: bad operator");
        }
        case AstNode::Kind::Call: {
            double a = ast_eval(e->lhs, x, t);
            if (e->name == "sin") return std::sin(a);
            if (e->name == "cos") return std::cos(a);
            if (e->name == "exp") return std::exp(a);
            if (e->name == "log") return std::log(a);
            if (e->name == "atan") return std::atan(a);
            if (e->name == "sqrt") return std::sqrt(a);
            throw std::logic_error("ast_eval: unknown function " + e->name);
        }
    }
    throw std::logic_error("ast_eval: bad node");
}

inline bool ast_uses(const AstPtr& e, char var) {
    switch (e->kind) {
        case AstNode::Kind::Number: return false;
        case AstNode::Kind::Variable: return e->name.size() == 1 && e->name[0] == var;
        case AstNode::Kind::Negate:
        case AstNode::Kind::Call: return ast_uses(e->lhs, var);
        case AstNode::Kind::Binary: return ast_uses(e->lhs, var) || ast_uses(e->rhs, var);
    }
    return false;
}

/// Symbolic d/dt; the spatial variable x is treated as a constant.
inline AstPtr ast_derivative_t(const AstPtr& e) {
    switch (e->kind) {
        case AstNode::Kind::Number: return ast_number(0);
        case AstNode::Kind::Variable: return ast_number(e->name == "t" ? 1 : 0);
        case AstNode::Kind::Negate: return ast_negate(ast_derivative_t(e->lhs));
        case AstNode::Kind::Binary: {
            AstPtr da = ast_derivative_t(e->lhs);
            AstPtr db = ast_derivative_t(e->rhs);
            switch (e->op) {
                case '+': return ast_binary('+', da, db);
                case '-': return ast_binary('-', da, db);
                case '*':
                    return ast_binary('+', ast_binary('*', da, e->rhs),
                                      ast_binary('*', e->lhs, db));
                case '/':
                    // (a/b)' = (a' b - a b') / b^2
                    return ast_binary(
                        '/',
                        ast_binary('-', ast_binary('*', da, e->rhs),
                                   ast_binary('*', e->lhs, db)),
                        ast_binary('^', e->rhs, ast_number(2)));
                case '^': {
                    // supported: constant exponent a^c, and constant base c^a
                    if (!ast_uses(e->rhs, 't')) {
                        // (a^c)' = c a^(c-1) a'
                        return ast_binary(
                            '*',
                            ast_binary('*', e->rhs,
                                       ast_binary('^', e->lhs,
                                                  ast_binary('-', e->rhs, ast_number(1)))),
                            da);
                    }
                    if (!ast_uses(e->lhs, 't')) {
                        // (c^a)' = log(c) c^a a'
                        return ast_binary('*',
                                          ast_binary('*', ast_call("log", e->lhs), e),
                                          db);
                    }
                    throw std::invalid_argument(
                        "ast_derivative_t: t^t-style powers are not differentiable here");
                }
            }
            throw std::logic_error("ast_derivative_t: bad operator");
        }
        case AstNode::Kind::Call: {
            AstPtr da = ast_derivative_t(e->lhs);
            AstPtr inner;
            if (e->name == "sin") inner = ast_call("cos", e->lhs);
            else if (e->name == "cos") inner = ast_negate(ast_call("sin", e->lhs));
            else if (e->name == "exp") inner = e;
            else if (e->name == "log") inner = ast_binary('/', ast_number(1), e->lhs);
            else if (e->name == "atan")
                inner = ast_binary('/', ast_number(1),
                                   ast_binary('+', ast_number(1),
                                              ast_binary('^', e->lhs, ast_number(2))));
            else if (e->name == "sqrt")
                inner = ast_binary('/', ast_number(1), ast_binary('*', ast_number(2), e));
            else
                throw std::logic_error("ast_derivative_t: unknown function " + e->name);
            return ast_binary('*', inner, da);
        }
    }
    throw std::logic_error("ast_derivative_t: bad node");
}

namespace detail {
inline int ast_precedence(const AstPtr& e) {
    switch (e->kind) {
        case AstNode::Kind::Binary: return (e->op == '+' || e->op == '-') ? 1 : (e->op == '^' ? 4 : 2);
        case AstNode::Kind::Negate: return 3;
        default: return 5;
    }
}

inline void ast_print_rec(const AstPtr& e, std::string& out, int parent_prec, bool rhs_of_nonassoc);
}  // namespace detail

/// Canonical text form; parses back to the same tree.
inline std::string ast_print(const AstPtr& e) {
    std::string out;
    detail::ast_print_rec(e, out, 0, false);
    return out;
}

namespace detail {
inline void ast_print_rec(const AstPtr& e, std::string& out, int parent_prec, bool rhs_of_nonassoc) {
    int prec = ast_precedence(e);
    bool parens = prec < parent_prec || (prec == parent_prec && rhs_of_nonassoc);
    if (parens) out += '(';
    switch (e->kind) {
        case AstNode::Kind::Number:
            if (e->number < 0) {
                out += '-';
                out += format_double(-e->number);
            } else {
                out += format_double(e->number);
            }
            break;
        case AstNode::Kind::Variable: out += e->name; break;
        case AstNode::Kind::Negate:
            out += '-';
            ast_print_rec(e->lhs, out, 3, true);
            break;
        case AstNode::Kind::Binary: {
            int prec_here = ast_precedence(e);
            bool tight = e->op == '^';
            // ^ is right-associative; - and / need parens on an equal-precedence rhs
            ast_print_rec(e->lhs, out, prec_here + (tight ? 1 : 0), false);
            if (!tight) out += ' ';
            out += e->op;
            if (!tight) out += ' ';
            ast_print_rec(e->rhs, out, prec_here, !tight);
            break;
        }
        case AstNode::Kind::Call:
            out += e->name;
            out += '(';
            ast_print_rec(e->lhs, out, 0, false);
            out += ')';
            break;
    }
    if (parens) out += ')';
}
}  // namespace detail

// negative Number literals print as -c and reparse as Negate(c), which folds
// back to the same Number; parenthesization above keeps everything else exact

}  // namespace lgpac

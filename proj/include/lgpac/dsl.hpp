#pragma once

// Textual network description language.
//
// Line-oriented statements, `#` comments, UTF-8. One statement per line
// except that `{ ... }` blocks may span lines:
//
//   grid [1, inf] step 0.25 upto 6        spatial domain and sample step
//   modulus m = exp2 3                    also: linear A [+ B], table { (x,y), ... },
//                                         network NAME
//   input k : rscalar                     proper input declaration
//   const c : xstream = 2^x/(x-1)         constants may be expressions of x
//   time t                                the stream carrying t
//   add s { a = u; b = v }
//   mul p { a = u; b = v }
//   integrator w : xstream { c = c0; u = p; v = t }
//   limit G { in = s; modulus = m }
//   wire u -> s.a                         alternative to inline port blocks
//   output s
//   bind k = 1                            bindings are expressions of t (and x)
//   simulate t_end = 10 samples = 501
//   precision tau = 8
//
// The parser never throws on malformed input: it reports spanned diagnostics
// and keeps going at the next statement.

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lgpac/network.hpp"

namespace lgpac {

struct Diagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::string message;
    std::string hint;
    int line = 1;  // 1-based
    int col = 1;   // 1-based
    int len = 1;
};

struct GridDecl {
    double lower = 0.0;
    bool unbounded = false;
    double upper = 1.0;  // ignored when unbounded
    bool step_form = true;
    double step = 1.0;
    double upto = 1.0;  // sampling extent; equals upper for bounded step grids
    std::vector<double> explicit_points;

    [[nodiscard]] GridPtr to_grid() const {
        if (step_form) {
            return unbounded ? make_unbounded_grid(lower, upto, step)
                             : make_uniform_grid(lower, upper, step);
        }
        return make_point_grid(explicit_points, lower,
                               unbounded ? std::optional<double>{} : std::optional<double>{upper});
    }
};

struct Directives {
    std::optional<double> t_end;
    std::optional<int> samples;
    std::optional<double> tau;
    std::optional<std::string> out_path;
};

struct DslDocument {
    GridDecl grid;
    Network network;
    std::vector<std::pair<std::string, AstPtr>> bindings;
    Directives directives;
};

struct ParseResult {
    std::optional<DslDocument> document;
    std::vector<Diagnostic> diagnostics;

    [[nodiscard]] bool ok() const {
        for (const auto& d : diagnostics)
            if (d.severity == Diagnostic::Severity::Error) return false;
        return true;
    }
};

namespace dsl_detail {

struct Token {
    enum class Type { Ident, Number, String, Punct, Newline, End };
    Type type = Type::End;
    std::string text;
    double num = 0.0;
    int line = 1, col = 1, len = 0;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

inline std::vector<Token> lex(std::string_view text, std::vector<Diagnostic>& diags) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto push = [&](Token::Type t, std::string s, double num, int l, int c) {
        Token tok;
        tok.type = t;
        tok.len = static_cast<int>(s.size());
        tok.text = std::move(s);
        tok.num = num;
        tok.line = l;
        tok.col = c;
        if (tok.len == 0) tok.len = 1;
        out.push_back(std::move(tok));
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            push(Token::Type::Newline, "\n", 0, line, col);
            ++i;
            ++line;
            col = 1;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            ++col;
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') { ++i; ++col; }
            continue;
        }
        int tl = line, tc = col;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j])) ++j;
            std::string s(text.substr(i, j - i));
            col += static_cast<int>(j - i);
            i = j;
            push(Token::Type::Ident, std::move(s), 0, tl, tc);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.')) ++j;
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
                    j = k;
                    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
                }
            }
            double v = 0;
            auto res = std::from_chars(text.data() + i, text.data() + j, v);
            if (res.ec != std::errc() || res.ptr != text.data() + j) {
                diags.push_back({Diagnostic::Severity::Error, "malformed number", "", tl, tc,
                                 static_cast<int>(j - i)});
                v = 0;
            }
            std::string s(text.substr(i, j - i));
            col += static_cast<int>(j - i);
            i = j;
            push(Token::Type::Number, std::move(s), v, tl, tc);
            continue;
        }
        if (c == '"') {
            std::size_t j = i + 1;
            while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
            if (j >= text.size() || text[j] != '"') {
                diags.push_back({Diagnostic::Severity::Error, "unterminated string", "", tl, tc, 1});
                std::string s(text.substr(i + 1, j - i - 1));
                col += static_cast<int>(j - i);
                i = j;
                push(Token::Type::String, std::move(s), 0, tl, tc);
                continue;
            }
            std::string s(text.substr(i + 1, j - i - 1));
            col += static_cast<int>(j - i + 1);
            i = j + 1;
            push(Token::Type::String, std::move(s), 0, tl, tc);
            continue;
        }
        if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            push(Token::Type::Punct, "->", 0, tl, tc);
            i += 2;
            col += 2;
            continue;
        }
        if (std::string_view("[]{}()=,;:^*/+-").find(c) != std::string_view::npos) {
            push(Token::Type::Punct, std::string(1, c), 0, tl, tc);
            ++i;
            ++col;
            continue;
        }
        diags.push_back({Diagnostic::Severity::Error,
                         std::string("unexpected character '") + c + "'", "", tl, tc, 1});
        ++i;
        ++col;
    }
    push(Token::Type::End, "", 0, line, col);
    return out;
}

struct SyntaxError {
    Diagnostic diag;
};

struct PendingRef {
    std::string module;  // empty for bind targets
    std::string port;
    std::string target;
    Diagnostic at;  // position of the reference (message filled on failure)
};

struct Parser {
    const std::vector<Token>& toks;
    std::size_t pos = 0;
    std::vector<Diagnostic>& diags;

    const Token& peek(std::size_t off = 0) const {
        std::size_t i = std::min(pos + off, toks.size() - 1);
        return toks[i];
    }
    const Token& advance() {
        const Token& t = toks[pos];
        if (pos + 1 < toks.size()) ++pos;
        return t;
    }
    bool at_end() const { return peek().type == Token::Type::End; }

    [[noreturn]] void fail(const Token& t, std::string msg, std::string hint = "") {
        throw SyntaxError{{Diagnostic::Severity::Error, std::move(msg), std::move(hint), t.line,
                           t.col, std::max(1, t.len)}};
    }

    void skip_newlines() {
        while (peek().type == Token::Type::Newline) advance();
    }

    bool take_punct(std::string_view p) {
        if (peek().type == Token::Type::Punct && peek().text == p) {
            advance();
            return true;
        }
        return false;
    }

    void expect_punct(std::string_view p) {
        if (!take_punct(p)) fail(peek(), "expected '" + std::string(p) + "'");
    }

    std::string expect_ident(std::string_view what) {
        if (peek().type != Token::Type::Ident)
            fail(peek(), "expected " + std::string(what));
        return advance().text;
    }

    double expect_number() {
        bool neg = take_punct("-");
        if (peek().type != Token::Type::Number) fail(peek(), "expected a number");
        double v = advance().num;
        return neg ? -v : v;
    }

    void expect_statement_end() {
        if (peek().type == Token::Type::Newline || peek().type == Token::Type::End) return;
        fail(peek(), "unexpected trailing tokens on this line");
    }

    // expression grammar, lowest precedence first
    AstPtr parse_expr() { return parse_additive(); }

    AstPtr parse_additive() {
        AstPtr lhs = parse_multiplicative();
        while (peek().type == Token::Type::Punct && (peek().text == "+" || peek().text == "-")) {
            char op = advance().text[0];
            lhs = ast_binary(op, lhs, parse_multiplicative());
        }
        return lhs;
    }

    AstPtr parse_multiplicative() {
        AstPtr lhs = parse_unary();
        while (peek().type == Token::Type::Punct && (peek().text == "*" || peek().text == "/")) {
            char op = advance().text[0];
            lhs = ast_binary(op, lhs, parse_unary());
        }
        return lhs;
    }

    AstPtr parse_unary() {
        if (take_punct("-")) return ast_negate(parse_unary());
        return parse_power();
    }

    AstPtr parse_power() {
        AstPtr base = parse_primary();
        if (peek().type == Token::Type::Punct && peek().text == "^") {
            advance();
            return ast_binary('^', base, parse_unary());
        }
        return base;
    }

    AstPtr parse_primary() {
        const Token& t = peek();
        if (t.type == Token::Type::Number) {
            advance();
            return ast_number(t.num);
        }
        if (t.type == Token::Type::Punct && t.text == "(") {
            advance();
            AstPtr e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (t.type == Token::Type::Ident) {
            std::string name = advance().text;
            if (peek().type == Token::Type::Punct && peek().text == "(") {
                if (!ast_is_known_function(name))
                    fail(t, "unknown function '" + name + "'",
                         "supported: sin cos exp log atan sqrt");
                advance();
                AstPtr arg = parse_expr();
                expect_punct(")");
                return ast_call(name, arg);
            }
            if (name == "x" || name == "t") return ast_variable(name);
            if (name == "pi") return ast_number(M_PI);
            if (name == "e") return ast_number(M_E);
            fail(t, "unknown name '" + name + "' in expression",
                 "expressions may use x, t, pi, e and function calls");
        }
        fail(t, "expected an expression");
    }
};

}  // namespace dsl_detail

/// Parse a network description. Never throws on bad input: either a document
/// (no error diagnostics) or a non-empty diagnostic list with source spans.
inline ParseResult parse(std::string_view text) {
    using namespace dsl_detail;
    ParseResult result;
    auto toks = lex(text, result.diagnostics);
    Parser p{toks, 0, result.diagnostics};

    DslDocument doc;
    bool grid_seen = false;
    std::vector<PendingRef> refs;
    std::vector<std::pair<std::string, Diagnostic>> bind_targets;
    std::set<std::string> declared;           // channel names (modules + inputs)
    std::set<std::string> declared_moduli;
    std::set<std::string> bound;

    auto declare = [&](const std::string& name, const Token& at) {
        if (!declared.insert(name).second)
            p.fail(at, "name '" + name + "' is already declared");
    };

    auto parse_port_block = [&](const char* module_name, ModuleKind kind,
                                std::vector<std::string>& inputs) {
        auto ports = module_port_names(kind);
        inputs.assign(ports.size(), "");
        if (!p.take_punct("{")) return;  // all ports left unconnected
        p.skip_newlines();
        std::string modulus_slot;
        while (!p.take_punct("}")) {
            const Token& pt = p.peek();
            std::string port = p.expect_ident("a port name");
            p.expect_punct("=");
            const Token& vt = p.peek();
            std::string src = p.expect_ident("a channel name");
            bool matched = false;
            for (std::size_t i = 0; i < ports.size(); ++i) {
                if (port == ports[i]) {
                    if (!inputs[i].empty())
                        p.fail(pt, "port '" + port + "' is already connected");
                    inputs[i] = src;
                    matched = true;
                    PendingRef r;
                    r.module = module_name;
                    r.port = port;
                    r.target = src;
                    r.at = {Diagnostic::Severity::Error, "", "", vt.line, vt.col, vt.len};
                    refs.push_back(std::move(r));
                    break;
                }
            }
            if (!matched) {
                if (kind == ModuleKind::LimitContinuous && port == "modulus") {
                    if (!modulus_slot.empty()) p.fail(pt, "modulus is already set");
                    modulus_slot = src;
                    PendingRef r;
                    r.module = module_name;
                    r.port = "modulus";
                    r.target = src;
                    r.at = {Diagnostic::Severity::Error, "", "", vt.line, vt.col, vt.len};
                    refs.push_back(std::move(r));
                } else {
                    p.fail(pt, std::string("module has no port '") + port + "'");
                }
            }
            p.skip_newlines();
            if (p.take_punct(";")) p.skip_newlines();
        }
        if (kind == ModuleKind::LimitContinuous) inputs.push_back(modulus_slot);
    };

    while (true) {
        p.skip_newlines();
        if (p.at_end()) break;
        std::size_t stmt_start = p.pos;
        try {
            const Token& kw_tok = p.peek();
            if (kw_tok.type != Token::Type::Ident)
                p.fail(kw_tok, "expected a statement keyword");
            std::string kw = p.advance().text;

            if (kw == "grid") {
                if (grid_seen) p.fail(kw_tok, "grid is already declared");
                grid_seen = true;
                GridDecl g;
                p.expect_punct("[");
                g.lower = p.expect_number();
                p.expect_punct(",");
                if (p.peek().type == Token::Type::Ident && p.peek().text == "inf") {
                    p.advance();
                    g.unbounded = true;
                } else {
                    g.upper = p.expect_number();
                }
                p.expect_punct("]");
                std::string form = p.expect_ident("'step' or 'points'");
                if (form == "step") {
                    g.step_form = true;
                    g.step = p.expect_number();
                    if (g.unbounded) {
                        std::string upto_kw = p.expect_ident("'upto'");
                        if (upto_kw != "upto") p.fail(kw_tok, "unbounded grids need 'upto K'");
                        g.upto = p.expect_number();
                    } else {
                        g.upto = g.upper;
                    }
                } else if (form == "points") {
                    g.step_form = false;
                    p.expect_punct("{");
                    g.explicit_points.push_back(p.expect_number());
                    while (p.take_punct(",")) g.explicit_points.push_back(p.expect_number());
                    p.expect_punct("}");
                } else {
                    p.fail(kw_tok, "expected 'step' or 'points' in the grid declaration");
                }
                try {
                    (void)g.to_grid();
                } catch (const std::invalid_argument& e) {
                    p.fail(kw_tok, std::string("invalid grid: ") + e.what());
                }
                doc.grid = std::move(g);
                p.expect_statement_end();
            } else if (kw == "input") {
                const Token& name_tok = p.peek();
                std::string name = p.expect_ident("an input name");
                p.expect_punct(":");
                const Token& kind_tok = p.peek();
                std::string kind_s = p.expect_ident("a channel kind");
                auto kind = channel_kind_from_string(kind_s);
                if (!kind)
                    p.fail(kind_tok, "unknown channel kind '" + kind_s + "'",
                           "one of: rscalar xscalar rstream xstream");
                declare(name, name_tok);
                doc.network.add_input(name, *kind);
                p.expect_statement_end();
            } else if (kw == "const") {
                const Token& name_tok = p.peek();
                std::string name = p.expect_ident("a constant name");
                p.expect_punct(":");
                const Token& kind_tok = p.peek();
                std::string kind_s = p.expect_ident("a channel kind");
                auto kind = channel_kind_from_string(kind_s);
                if (!kind) p.fail(kind_tok, "unknown channel kind '" + kind_s + "'");
                p.expect_punct("=");
                const Token& expr_tok = p.peek();
                AstPtr value = p.parse_expr();
                if (ast_uses(value, 't'))
                    p.fail(expr_tok, "constants must not depend on t");
                if (ast_uses(value, 'x') && !is_x_kind(*kind))
                    p.fail(expr_tok, "a real-kind constant must not depend on x");
                declare(name, name_tok);
                doc.network.add_constant(name, *kind, value);
                p.expect_statement_end();
            } else if (kw == "time") {
                const Token& name_tok = p.peek();
                std::string name = p.expect_ident("a channel name");
                declare(name, name_tok);
                doc.network.add_time(name);
                p.expect_statement_end();
            } else if (kw == "add" || kw == "mul") {
                const Token& name_tok = p.peek();
                std::string name = p.expect_ident("a module name");
                std::vector<std::string> inputs;
                parse_port_block(name.c_str(),
                                 kw == "add" ? ModuleKind::Adder : ModuleKind::Multiplier, inputs);
                declare(name, name_tok);
                if (kw == "add") doc.network.add_adder(name, inputs[0], inputs[1]);
                else doc.network.add_multiplier(name, inputs[0], inputs[1]);
                p.expect_statement_end();
            } else if (kw == "integrator") {
                const Token& name_tok = p.peek();
                std::string name = p.expect_ident("a module name");
                p.expect_punct(":");
                const Token& kind_tok = p.peek();
                std::string kind_s = p.expect_ident("a stream kind");
                auto kind = channel_kind_from_string(kind_s);
                if (!kind || !is_stream(*kind))
                    p.fail(kind_tok, "integrators declare 'rstream' or 'xstream'");
                std::vector<std::string> inputs;
                parse_port_block(name.c_str(), ModuleKind::Integrator, inputs);
                declare(name, name_tok);
                doc.network.add_integrator(name, *kind, inputs[0], inputs[1], inputs[2]);
                p.expect_statement_end();
            } else if (kw == "limit") {
                const Token& name_tok = p.peek();
                std::string name = p.expect_ident("a module name");
                std::vector<std::string> inputs;
                parse_port_block(name.c_str(), ModuleKind::LimitContinuous, inputs);
                declare(name, name_tok);
                // inputs = {in, modulus}
                doc.network.add_limit(name, inputs[0], inputs.size() > 1 ? inputs[1] : "");
                p.expect_statement_end();
            } else if (kw == "modulus") {
                const Token& name_tok = p.peek();
                std::string name = p.expect_ident("a modulus name");
                p.expect_punct("=");
                const Token& form_tok = p.peek();
                std::string form = p.expect_ident("a modulus form");
                if (!declared_moduli.insert(name).second)
                    p.fail(name_tok, "modulus '" + name + "' is already declared");
                try {
                    if (form == "exp2") {
                        doc.network.add_modulus(name, Modulus::exp2(p.expect_number()));
                    } else if (form == "linear") {
                        double scale = p.expect_number();
                        double offset = 0;
                        if (p.take_punct("+")) offset = p.expect_number();
                        else if (p.take_punct("-")) offset = -p.expect_number();
                        doc.network.add_modulus(name, Modulus::linear(scale, offset));
                    } else if (form == "table") {
                        p.expect_punct("{");
                        std::vector<std::pair<double, double>> pts;
                        do {
                            p.expect_punct("(");
                            double a = p.expect_number();
                            p.expect_punct(",");
                            double b = p.expect_number();
                            p.expect_punct(")");
                            pts.emplace_back(a, b);
                        } while (p.take_punct(","));
                        p.expect_punct("}");
                        doc.network.add_modulus(name, Modulus::tabulated(std::move(pts)));
                    } else if (form == "network") {
                        std::string ref = p.expect_ident("a network name");
                        doc.network.add_modulus(name, Modulus::from_named_network(ref));
                    } else {
                        p.fail(form_tok, "unknown modulus form '" + form + "'",
                               "one of: exp2 C, linear A [+ B], table { (tau, T), ... }, network NAME");
                    }
                } catch (const std::invalid_argument& e) {
                    p.fail(form_tok, std::string("invalid modulus: ") + e.what());
                }
                p.expect_statement_end();
            } else if (kw == "wire") {
                const Token& src_tok = p.peek();
                std::string src = p.expect_ident("a source channel");
                p.expect_punct("->");
                const Token& dst_tok = p.peek();
                std::string dst = p.expect_ident("a destination port (module.port)");
                auto dot = dst.rfind('.');
                if (dot == std::string::npos || dot == 0 || dot + 1 >= dst.size())
                    p.fail(dst_tok, "wire destination must look like module.port");
                std::string module = dst.substr(0, dot);
                std::string port = dst.substr(dot + 1);
                doc.network.wire(src, module, port);
                PendingRef r;
                r.module = module;
                r.port = "";  // marks a wire statement: module existence checked later
                r.target = src;
                r.at = {Diagnostic::Severity::Error, "", "", dst_tok.line, dst_tok.col, dst_tok.len};
                refs.push_back(std::move(r));
                PendingRef rs;
                rs.module = "";
                rs.port = "";
                rs.target = src;
                rs.at = {Diagnostic::Severity::Error, "", "", src_tok.line, src_tok.col, src_tok.len};
                refs.push_back(std::move(rs));
                p.expect_statement_end();
            } else if (kw == "output") {
                const Token& t = p.peek();
                std::string ch = p.expect_ident("a channel name");
                doc.network.mark_output(ch);
                PendingRef r;
                r.module = "";
                r.port = "";
                r.target = ch;
                r.at = {Diagnostic::Severity::Error, "", "", t.line, t.col, t.len};
                refs.push_back(std::move(r));
                p.expect_statement_end();
            } else if (kw == "bind") {
                const Token& t = p.peek();
                std::string name = p.expect_ident("an input name");
                p.expect_punct("=");
                AstPtr value = p.parse_expr();
                if (!bound.insert(name).second)
                    p.fail(t, "input '" + name + "' is bound twice");
                doc.bindings.emplace_back(name, value);
                bind_targets.emplace_back(
                    name, Diagnostic{Diagnostic::Severity::Error, "", "", t.line, t.col, t.len});
                p.expect_statement_end();
            } else if (kw == "simulate") {
                std::string field = p.expect_ident("'t_end'");
                if (field != "t_end") p.fail(kw_tok, "expected 't_end = NUMBER'");
                p.expect_punct("=");
                doc.directives.t_end = p.expect_number();
                if (p.peek().type == Token::Type::Ident && p.peek().text == "samples") {
                    p.advance();
                    p.expect_punct("=");
                    doc.directives.samples = static_cast<int>(p.expect_number());
                }
                p.expect_statement_end();
            } else if (kw == "precision") {
                std::string field = p.expect_ident("'tau'");
                if (field != "tau") p.fail(kw_tok, "expected 'tau = NUMBER'");
                p.expect_punct("=");
                doc.directives.tau = p.expect_number();
                p.expect_statement_end();
            } else if (kw == "trace_out") {
                if (p.peek().type != Token::Type::String)
                    p.fail(p.peek(), "expected a quoted path");
                doc.directives.out_path = p.advance().text;
                p.expect_statement_end();
            } else {
                p.fail(kw_tok, "unknown statement '" + kw + "'",
                       "statements: grid input const time add mul integrator limit modulus "
                       "wire output bind simulate precision trace_out");
            }
        } catch (SyntaxError& e) {
            result.diagnostics.push_back(std::move(e.diag));
            // resynchronize: skip to the next newline outside any block
            int depth = 0;
            if (p.pos == stmt_start) p.advance();
            while (!p.at_end()) {
                const Token& t = p.peek();
                if (t.type == Token::Type::Punct && (t.text == "{" || t.text == "(")) ++depth;
                if (t.type == Token::Type::Punct && (t.text == "}" || t.text == ")"))
                    depth = std::max(0, depth - 1);
                if (t.type == Token::Type::Newline && depth == 0) break;
                p.advance();
            }
        }
    }

    // name resolution across the whole document
    for (const auto& r : refs) {
        if (!r.module.empty() && r.port.empty()) {
            // wire statement: module must exist (ports are checked by validate)
            if (!doc.network.find_module(r.module)) {
                Diagnostic d = r.at;
                d.message = "unknown module '" + r.module + "'";
                result.diagnostics.push_back(std::move(d));
            }
            continue;
        }
        if (r.port == "modulus") {
            if (!declared_moduli.count(r.target)) {
                Diagnostic d = r.at;
                d.message = "unknown modulus '" + r.target + "'";
                result.diagnostics.push_back(std::move(d));
            }
            continue;
        }
        if (!declared.count(r.target)) {
            Diagnostic d = r.at;
            d.message = "unknown channel '" + r.target + "'";
            result.diagnostics.push_back(std::move(d));
        }
    }
    for (std::size_t bi = 0; bi < bind_targets.size(); ++bi) {
        const auto& [name, at] = bind_targets[bi];
        const InputDecl* in = doc.network.find_input(name);
        if (!in) {
            Diagnostic d = at;
            d.message = "bind target '" + name + "' is not a declared input";
            result.diagnostics.push_back(std::move(d));
            continue;
        }
        const AstPtr& e = doc.bindings[bi].second;
        bool uses_x = ast_uses(e, 'x');
        bool uses_t = ast_uses(e, 't');
        if (!is_stream(in->kind) && uses_t) {
            Diagnostic d = at;
            d.message = "binding for scalar input '" + name + "' must not depend on t";
            result.diagnostics.push_back(std::move(d));
        }
        if (!is_x_kind(in->kind) && uses_x) {
            Diagnostic d = at;
            d.message = "binding for real-kind input '" + name + "' must not depend on x";
            result.diagnostics.push_back(std::move(d));
        }
    }

    if (result.ok()) result.document = std::move(doc);
    return result;
}

namespace dsl_detail {

inline void print_modulus(std::string& out, const Modulus& m) {
    switch (m.rep()) {
        case Modulus::Rep::Exp2:
            out += "exp2 ";
            out += format_double(m.scale());
            break;
        case Modulus::Rep::Linear:
            out += "linear ";
            out += format_double(m.scale());
            if (m.offset() != 0) {
                out += m.offset() > 0 ? " + " : " - ";
                out += format_double(std::abs(m.offset()));
            }
            break;
        case Modulus::Rep::Tabulated: {
            out += "table { ";
            bool first = true;
            for (const auto& [a, b] : m.table()) {
                if (!first) out += ", ";
                first = false;
                out += "(" + format_double(a) + ", " + format_double(b) + ")";
            }
            out += " }";
            break;
        }
        case Modulus::Rep::NetworkGenerated:
            out += "network ";
            out += m.network_name();
            break;
        case Modulus::Rep::Derived:
            throw std::logic_error("print: derived moduli have no textual form");
    }
}

}  // namespace dsl_detail

/// Canonical text form of a document; parsing it back yields a structurally
/// identical document.
inline std::string print(const DslDocument& doc) {
    std::string out;
    const auto& g = doc.grid;
    out += "grid [" + format_double(g.lower) + ", ";
    out += g.unbounded ? "inf" : format_double(g.upper);
    out += "]";
    if (g.step_form) {
        out += " step " + format_double(g.step);
        if (g.unbounded) out += " upto " + format_double(g.upto);
    } else {
        out += " points { ";
        for (std::size_t i = 0; i < g.explicit_points.size(); ++i) {
            if (i) out += ", ";
            out += format_double(g.explicit_points[i]);
        }
        out += " }";
    }
    out += "\n";

    for (const auto& [name, m] : doc.network.moduli()) {
        out += "modulus " + name + " = ";
        dsl_detail::print_modulus(out, m);
        out += "\n";
    }
    for (const auto& in : doc.network.inputs())
        out += "input " + in.name + " : " + to_string(in.kind) + "\n";

    auto port_block = [&](const ModuleDecl& m) {
        auto ports = module_port_names(m.kind);
        std::string block;
        bool any = false;
        for (std::size_t i = 0; i < ports.size() && i < m.inputs.size(); ++i) {
            if (m.inputs[i].empty()) continue;
            if (any) block += "; ";
            block += std::string(ports[i]) + " = " + m.inputs[i];
            any = true;
        }
        if (m.kind == ModuleKind::LimitContinuous && !m.modulus.empty()) {
            if (any) block += "; ";
            block += "modulus = " + m.modulus;
            any = true;
        }
        return any ? " { " + block + " }" : std::string();
    };

    for (const auto& m : doc.network.modules()) {
        switch (m.kind) {
            case ModuleKind::Constant:
                out += "const " + m.name + " : " + to_string(*m.declared_kind) + " = " +
                       ast_print(m.value) + "\n";
                break;
            case ModuleKind::TimeSource: out += "time " + m.name + "\n"; break;
            case ModuleKind::Adder: out += "add " + m.name + port_block(m) + "\n"; break;
            case ModuleKind::Multiplier: out += "mul " + m.name + port_block(m) + "\n"; break;
            case ModuleKind::Integrator:
                out += "integrator " + m.name + " : " + to_string(*m.declared_kind) +
                       port_block(m) + "\n";
                break;
            case ModuleKind::LimitContinuous:
                out += "limit " + m.name + port_block(m) + "\n";
                break;
        }
    }
    for (const auto& w : doc.network.wires())
        out += "wire " + w.source + " -> " + w.module + "." + w.port + "\n";
    for (const auto& o : doc.network.outputs()) out += "output " + o + "\n";
    for (const auto& [name, e] : doc.bindings) out += "bind " + name + " = " + ast_print(e) + "\n";
    if (doc.directives.t_end) {
        out += "simulate t_end = " + format_double(*doc.directives.t_end);
        if (doc.directives.samples) out += " samples = " + format_double(*doc.directives.samples);
        out += "\n";
    }
    if (doc.directives.tau) out += "precision tau = " + format_double(*doc.directives.tau) + "\n";
    if (doc.directives.out_path) out += "trace_out \"" + *doc.directives.out_path + "\"\n";
    return out;
}

}  // namespace lgpac

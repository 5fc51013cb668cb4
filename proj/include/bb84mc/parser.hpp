#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bb84mc/ast.hpp"
#include "bb84mc/lexer.hpp"

namespace bb84mc {

namespace detail {

inline bool is_keyword(std::string_view word) {
    static constexpr std::string_view keywords[] = {"dtmc", "const", "int",   "double", "module",
                                                    "endmodule", "init", "label", "true", "false"};
    return std::find(std::begin(keywords), std::end(keywords), word) != std::end(keywords);
}

/// Recursive-descent parser over a token vector. Tracks the set of tokens
/// that would have been accepted at the current position so syntax errors
/// can name them.
class Parser {
public:
    explicit Parser(std::string_view src) : tokens_(tokenize(src)) {}

    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(index_ + ahead, tokens_.size() - 1)];
    }

    bool at(Tok kind) {
        if (peek().kind == kind) return true;
        expected_.insert(std::string(describe(kind)));
        return false;
    }

    bool at_keyword(std::string_view word) {
        if (peek().kind == Tok::Ident && peek().text == word) return true;
        expected_.insert("'" + std::string(word) + "'");
        return false;
    }

    Token take() {
        Token tok = peek();
        if (index_ < tokens_.size() - 1) ++index_;
        expected_.clear();
        return tok;
    }

    bool accept(Tok kind) {
        if (!at(kind)) return false;
        take();
        return true;
    }

    bool accept_keyword(std::string_view word) {
        if (!at_keyword(word)) return false;
        take();
        return true;
    }

    Token expect(Tok kind) {
        if (!at(kind)) fail();
        return take();
    }

    void expect_keyword(std::string_view word) {
        if (!at_keyword(word)) fail();
        take();
    }

    Token expect_identifier() {
        if (!at(Tok::Ident) || is_keyword(peek().text)) {
            expected_.insert("identifier");
            fail();
        }
        return take();
    }

    [[noreturn]] void fail() const {
        const Token& tok = peek();
        std::string found = tok.kind == Tok::End ? std::string("end of input") : "'" + tok.text + "'";
        std::string msg = "unexpected " + found;
        if (!expected_.empty()) {
            msg += ", expected one of:";
            for (const auto& e : expected_) msg += " " + e;
        }
        throw ModelError(ErrorKind::Syntax, tok.pos, msg);
    }

    ExprPtr expression() { return parse_or(); }

    // model := "dtmc" {const} {module} {labeldef}
    ModelAst model() {
        ModelAst ast;
        expect_keyword("dtmc");
        while (at_keyword("const")) ast.constants.push_back(constant());
        while (at_keyword("module")) ast.modules.push_back(module());
        while (at_keyword("label")) ast.labels.push_back(label());
        expect(Tok::End);
        return ast;
    }

private:
    ConstDecl constant() {
        ConstDecl decl;
        decl.pos = take().pos;
        if (accept_keyword("int")) {
            decl.kind = NumericKind::Int;
        } else if (accept_keyword("double")) {
            decl.kind = NumericKind::Double;
        } else {
            fail();
        }
        decl.name = expect_identifier().text;
        expect(Tok::Assign);
        bool negative = accept(Tok::Minus);
        if (at(Tok::Int)) {
            Token lit = take();
            std::int64_t v = negative ? -lit.int_value : lit.int_value;
            if (decl.kind == NumericKind::Int) {
                decl.value = v;
            } else {
                decl.value = static_cast<double>(v);
            }
        } else if (decl.kind == NumericKind::Double && at(Tok::Real)) {
            Token lit = take();
            decl.value = negative ? -lit.real_value : lit.real_value;
        } else {
            fail();
        }
        expect(Tok::Semi);
        return decl;
    }

    ModuleDecl module() {
        ModuleDecl mod;
        mod.pos = take().pos;
        mod.name = expect_identifier().text;
        // vardecl starts with IDENT ':'; a command starts with '['
        while (at(Tok::Ident) && !is_keyword(peek().text) && peek(1).kind == Tok::Colon) {
            mod.variables.push_back(variable());
        }
        while (at(Tok::LBracket)) mod.commands.push_back(command());
        expect_keyword("endmodule");
        return mod;
    }

    std::int64_t signed_int() {
        bool negative = accept(Tok::Minus);
        std::int64_t v = expect(Tok::Int).int_value;
        return negative ? -v : v;
    }

    VarDecl variable() {
        VarDecl var;
        Token name = expect_identifier();
        var.name = name.text;
        var.pos = name.pos;
        expect(Tok::Colon);
        expect(Tok::LBracket);
        var.low = signed_int();
        expect(Tok::DotDot);
        var.high = signed_int();
        expect(Tok::RBracket);
        expect_keyword("init");
        var.init = signed_int();
        expect(Tok::Semi);
        return var;
    }

    Command command() {
        Command cmd;
        cmd.pos = expect(Tok::LBracket).pos;
        if (!at(Tok::RBracket)) cmd.action = expect_identifier().text;
        expect(Tok::RBracket);
        cmd.guard = expression();
        expect(Tok::Arrow);
        cmd.updates.push_back(update());
        while (accept(Tok::Plus)) cmd.updates.push_back(update());
        expect(Tok::Semi);
        if (cmd.updates.size() > 1) {
            for (const auto& u : cmd.updates) {
                if (!u.probability) {
                    throw ModelError(ErrorKind::Syntax, u.pos,
                                     "every branch of a multi-branch command needs an explicit probability");
                }
            }
        }
        return cmd;
    }

    bool at_assignment() const {
        return peek().kind == Tok::LParen && peek(1).kind == Tok::Ident && peek(2).kind == Tok::Prime;
    }

    Update update() {
        Update upd;
        upd.pos = peek().pos;
        if (!at_assignment()) {
            upd.probability = expression();
            expect(Tok::Colon);
        }
        upd.assignments.push_back(assignment());
        while (accept(Tok::And)) upd.assignments.push_back(assignment());
        return upd;
    }

    Assignment assignment() {
        Assignment a;
        a.pos = expect(Tok::LParen).pos;
        a.variable = expect_identifier().text;
        expect(Tok::Prime);
        expect(Tok::Assign);
        a.value = expression();
        expect(Tok::RParen);
        return a;
    }

    LabelDef label() {
        LabelDef def;
        def.pos = take().pos;
        def.name = expect(Tok::String).text;
        expect(Tok::Assign);
        def.expr = expression();
        expect(Tok::Semi);
        return def;
    }

    ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourcePos pos) {
        return make_expr(Binary{op, std::move(lhs), std::move(rhs)}, pos);
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at(Tok::Or)) {
            SourcePos pos = take().pos;
            lhs = binary(BinaryOp::Or, lhs, parse_and(), pos);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_not();
        while (at(Tok::And)) {
            SourcePos pos = take().pos;
            lhs = binary(BinaryOp::And, lhs, parse_not(), pos);
        }
        return lhs;
    }

    ExprPtr parse_not() {
        if (at(Tok::Not)) {
            SourcePos pos = take().pos;
            return make_expr(Unary{UnaryOp::Not, parse_not()}, pos);
        }
        return parse_comparison();
    }

    ExprPtr parse_comparison() {
        ExprPtr lhs = parse_additive();
        static constexpr std::pair<Tok, BinaryOp> relops[] = {
            {Tok::Assign, BinaryOp::Eq}, {Tok::Ne, BinaryOp::Ne}, {Tok::Le, BinaryOp::Le},
            {Tok::Lt, BinaryOp::Lt},     {Tok::Ge, BinaryOp::Ge}, {Tok::Gt, BinaryOp::Gt},
        };
        for (auto [tok, op] : relops) {
            if (at(tok)) {
                SourcePos pos = take().pos;
                return binary(op, lhs, parse_additive(), pos);
            }
        }
        return lhs;
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        for (;;) {
            if (at(Tok::Plus)) {
                SourcePos pos = take().pos;
                lhs = binary(BinaryOp::Add, lhs, parse_multiplicative(), pos);
            } else if (at(Tok::Minus)) {
                SourcePos pos = take().pos;
                lhs = binary(BinaryOp::Sub, lhs, parse_multiplicative(), pos);
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            if (at(Tok::Star)) {
                SourcePos pos = take().pos;
                lhs = binary(BinaryOp::Mul, lhs, parse_unary(), pos);
            } else if (at(Tok::Slash)) {
                SourcePos pos = take().pos;
                lhs = binary(BinaryOp::Div, lhs, parse_unary(), pos);
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_unary() {
        if (at(Tok::Minus)) {
            SourcePos pos = take().pos;
            return make_expr(Unary{UnaryOp::Neg, parse_unary()}, pos);
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        if (at(Tok::Int)) {
            Token t = take();
            return make_expr(IntLit{t.int_value}, t.pos);
        }
        if (at(Tok::Real)) {
            Token t = take();
            return make_expr(RealLit{t.real_value}, t.pos);
        }
        if (at_keyword("true")) return make_expr(BoolLit{true}, take().pos);
        if (at_keyword("false")) return make_expr(BoolLit{false}, take().pos);
        if (at(Tok::LParen)) {
            take();
            ExprPtr inner = expression();
            expect(Tok::RParen);
            return inner;
        }
        Token id = expect_identifier();
        return make_expr(Ident{id.text}, id.pos);
    }

    std::vector<Token> tokens_;
    std::size_t index_ = 0;
    std::set<std::string> expected_;
};

inline void resolve_names(const ModelAst& ast) {
    enum class Sym { Constant, Variable, Module, Label };
    std::unordered_map<std::string, Sym> symbols;

    auto declare = [&](const std::string& name, Sym sym, SourcePos pos, std::string_view what) {
        if (!symbols.emplace(name, sym).second) {
            throw ModelError(ErrorKind::DuplicateDeclaration, pos,
                             std::string(what) + " '" + name + "' is already declared");
        }
    };

    for (const auto& c : ast.constants) declare(c.name, Sym::Constant, c.pos, "constant");
    for (const auto& m : ast.modules) {
        declare(m.name, Sym::Module, m.pos, "module");
        for (const auto& v : m.variables) declare(v.name, Sym::Variable, v.pos, "variable");
    }
    std::set<std::string> labels;
    for (const auto& l : ast.labels) {
        if (!labels.insert(l.name).second) {
            throw ModelError(ErrorKind::DuplicateDeclaration, l.pos, "label \"" + l.name + "\" is already declared");
        }
    }

    auto check_value = [&](const std::string& name, SourcePos pos) {
        auto it = symbols.find(name);
        if (it == symbols.end() || (it->second != Sym::Constant && it->second != Sym::Variable)) {
            throw ModelError(ErrorKind::UnknownIdentifier, pos, "unknown identifier '" + name + "'");
        }
    };

    for (const auto& m : ast.modules) {
        for (const auto& cmd : m.commands) {
            for_each_identifier(cmd.guard, check_value);
            for (const auto& upd : cmd.updates) {
                for_each_identifier(upd.probability, check_value);
                for (const auto& a : upd.assignments) {
                    auto it = symbols.find(a.variable);
                    if (it == symbols.end() || it->second != Sym::Variable) {
                        throw ModelError(ErrorKind::UnknownIdentifier, a.pos,
                                         "assignment to unknown variable '" + a.variable + "'");
                    }
                    for_each_identifier(a.value, check_value);
                }
            }
        }
    }
    for (const auto& l : ast.labels) for_each_identifier(l.expr, check_value);
}

}  // namespace detail

/// Parses a complete model file. Syntax errors carry line/column and the
/// set of tokens that would have been accepted; name resolution errors
/// (duplicates, unknown identifiers) are reported here as well.
inline ModelAst parse(std::string_view source) {
    detail::Parser parser(source);
    ModelAst ast = parser.model();
    detail::resolve_names(ast);
    return ast;
}

/// Parses a standalone expression in the model-language expression grammar.
inline ExprPtr parse_expression(std::string_view source) {
    detail::Parser parser(source);
    ExprPtr expr = parser.expression();
    parser.expect(Tok::End);
    return expr;
}

}  // namespace bb84mc

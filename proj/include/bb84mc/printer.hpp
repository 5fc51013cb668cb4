#pragma once

#include <charconv>
#include <string>
#include <variant>

#include "bb84mc/ast.hpp"

namespace bb84mc {

namespace detail {

inline int precedence(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return 1;
        case BinaryOp::And: return 2;
        case BinaryOp::Eq:
        case BinaryOp::Ne:
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return 4;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 5;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 6;
    }
    return 0;
}

constexpr int kNotPrecedence = 3;
constexpr int kNegPrecedence = 7;
constexpr int kAtomPrecedence = 8;

inline std::string_view spelling(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return "|";
        case BinaryOp::And: return "&";
        case BinaryOp::Eq: return "=";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
    }
    return "?";
}

inline int precedence_of(const Expr& e) {
    if (const auto* b = std::get_if<Binary>(&e.node)) return precedence(b->op);
    if (const auto* u = std::get_if<Unary>(&e.node)) return u->op == UnaryOp::Not ? kNotPrecedence : kNegPrecedence;
    return kAtomPrecedence;
}

}  // namespace detail

/// Shortest decimal text that reads back as exactly `value`, always
/// spelled as a decimal literal (never as an integer).
inline std::string format_real(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    std::string text(buf, ptr);
    if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
    return text;
}

inline std::string print(const ExprPtr& expr);

namespace detail {

inline std::string print_operand(const ExprPtr& child, int min_precedence) {
    std::string text = print(child);
    if (precedence_of(*child) < min_precedence) return "(" + text + ")";
    return text;
}

struct ExprPrinter {
    std::string operator()(const IntLit& lit) const { return std::to_string(lit.value); }
    std::string operator()(const RealLit& lit) const { return format_real(lit.value); }
    std::string operator()(const BoolLit& lit) const { return lit.value ? "true" : "false"; }
    std::string operator()(const Ident& id) const { return id.name; }
    std::string operator()(const Unary& un) const {
        if (un.op == UnaryOp::Not) return "!" + print_operand(un.operand, kNotPrecedence);
        return "-" + print_operand(un.operand, kNegPrecedence);
    }
    std::string operator()(const Binary& bin) const {
        int prec = precedence(bin.op);
        // Operators are left-associative; comparisons do not chain.
        bool comparison = prec == 4;
        std::string lhs = print_operand(bin.lhs, comparison ? prec + 1 : prec);
        std::string rhs = print_operand(bin.rhs, prec + 1);
        std::string op(spelling(bin.op));
        if (bin.op == BinaryOp::And || bin.op == BinaryOp::Or) op = " " + op + " ";
        return lhs + op + rhs;
    }
};

}  // namespace detail

/// Canonical text for an expression; reparses to a structurally equal tree.
inline std::string print(const ExprPtr& expr) {
    return std::visit(detail::ExprPrinter{}, expr->node);
}

inline std::string print(const Update& upd) {
    std::string out;
    if (upd.probability) out += print(upd.probability) + " : ";
    for (std::size_t k = 0; k < upd.assignments.size(); ++k) {
        if (k) out += " & ";
        out += "(" + upd.assignments[k].variable + "'=" + print(upd.assignments[k].value) + ")";
    }
    return out;
}

inline std::string print(const Command& cmd) {
    std::string out = "[" + cmd.action.value_or("") + "] " + print(cmd.guard) + " ->";
    for (std::size_t k = 0; k < cmd.updates.size(); ++k) {
        out += k ? "\n      + " : " ";
        out += print(cmd.updates[k]);
    }
    return out + ";";
}

/// Canonical model text: parse(print(ast)) is structurally equal to ast.
inline std::string print(const ModelAst& ast) {
    std::string out = "dtmc\n";
    if (!ast.constants.empty()) out += "\n";
    for (const auto& c : ast.constants) {
        out += "const ";
        out += c.kind == NumericKind::Int ? "int " : "double ";
        out += c.name + " = ";
        if (const auto* i = std::get_if<std::int64_t>(&c.value)) {
            out += std::to_string(*i);
        } else {
            out += format_real(std::get<double>(c.value));
        }
        out += ";\n";
    }
    for (const auto& m : ast.modules) {
        out += "\nmodule " + m.name + "\n";
        for (const auto& v : m.variables) {
            out += "  " + v.name + " : [" + std::to_string(v.low) + ".." + std::to_string(v.high) + "] init " +
                   std::to_string(v.init) + ";\n";
        }
        if (!m.variables.empty() && !m.commands.empty()) out += "\n";
        for (const auto& cmd : m.commands) out += "  " + print(cmd) + "\n";
        out += "endmodule\n";
    }
    if (!ast.labels.empty()) out += "\n";
    for (const auto& l : ast.labels) out += "label \"" + l.name + "\" = " + print(l.expr) + ";\n";
    return out;
}

}  // namespace bb84mc

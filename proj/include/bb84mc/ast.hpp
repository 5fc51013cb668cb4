#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bb84mc/diagnostics.hpp"

namespace bb84mc {

enum class UnaryOp { Neg, Not };

enum class BinaryOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct IntLit {
    std::int64_t value;
};
struct RealLit {
    double value;
};
struct BoolLit {
    bool value;
};
struct Ident {
    std::string name;
};
struct Unary {
    UnaryOp op;
    ExprPtr operand;
};
struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

/// Immutable expression tree node. Subtrees are shared, never mutated.
struct Expr {
    std::variant<IntLit, RealLit, BoolLit, Ident, Unary, Binary> node;
    SourcePos pos;
};

inline ExprPtr make_expr(decltype(Expr::node) node, SourcePos pos = {}) {
    return std::make_shared<const Expr>(Expr{std::move(node), pos});
}

enum class NumericKind { Int, Double };

struct ConstDecl {
    std::string name;
    NumericKind kind = NumericKind::Int;
    std::variant<std::int64_t, double> value;
    SourcePos pos;
};

struct VarDecl {
    std::string name;
    std::int64_t low = 0;
    std::int64_t high = 0;
    std::int64_t init = 0;
    SourcePos pos;
};

struct Assignment {
    std::string variable;
    ExprPtr value;
    SourcePos pos;
};

/// One probabilistic branch of a command. A missing probability means the
/// implicit weight 1 of a single-branch command.
struct Update {
    ExprPtr probability;
    std::vector<Assignment> assignments;
    SourcePos pos;
};

struct Command {
    std::optional<std::string> action;
    ExprPtr guard;
    std::vector<Update> updates;
    SourcePos pos;
};

struct ModuleDecl {
    std::string name;
    std::vector<VarDecl> variables;
    std::vector<Command> commands;
    SourcePos pos;
};

struct LabelDef {
    std::string name;
    ExprPtr expr;
    SourcePos pos;
};

enum class ModelKind { Dtmc };

struct ModelAst {
    ModelKind kind = ModelKind::Dtmc;
    std::vector<ConstDecl> constants;
    std::vector<ModuleDecl> modules;
    std::vector<LabelDef> labels;
};

// Structural equality ignores source positions so that a printed and
// reparsed tree compares equal to the original.

inline bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

namespace detail {

struct ExprNodeEqual {
    template <class L, class R>
    bool operator()(const L&, const R&) const {
        return false;
    }
    bool operator()(const IntLit& a, const IntLit& b) const { return a.value == b.value; }
    bool operator()(const RealLit& a, const RealLit& b) const { return a.value == b.value; }
    bool operator()(const BoolLit& a, const BoolLit& b) const { return a.value == b.value; }
    bool operator()(const Ident& a, const Ident& b) const { return a.name == b.name; }
    bool operator()(const Unary& a, const Unary& b) const {
        return a.op == b.op && structurally_equal(a.operand, b.operand);
    }
    bool operator()(const Binary& a, const Binary& b) const {
        return a.op == b.op && structurally_equal(a.lhs, b.lhs) && structurally_equal(a.rhs, b.rhs);
    }
};

template <class T, class Eq>
bool all_equal(const std::vector<T>& a, const std::vector<T>& b, Eq eq) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!eq(a[k], b[k])) return false;
    }
    return true;
}

}  // namespace detail

inline bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return std::visit(detail::ExprNodeEqual{}, a->node, b->node);
}

inline bool structurally_equal(const Update& a, const Update& b) {
    return structurally_equal(a.probability, b.probability) &&
           detail::all_equal(a.assignments, b.assignments, [](const Assignment& x, const Assignment& y) {
               return x.variable == y.variable && structurally_equal(x.value, y.value);
           });
}

inline bool structurally_equal(const Command& a, const Command& b) {
    return a.action == b.action && structurally_equal(a.guard, b.guard) &&
           detail::all_equal(a.updates, b.updates,
                             [](const Update& x, const Update& y) { return structurally_equal(x, y); });
}

inline bool structurally_equal(const ModuleDecl& a, const ModuleDecl& b) {
    auto same_var = [](const VarDecl& x, const VarDecl& y) {
        return x.name == y.name && x.low == y.low && x.high == y.high && x.init == y.init;
    };
    return a.name == b.name && detail::all_equal(a.variables, b.variables, same_var) &&
           detail::all_equal(a.commands, b.commands,
                             [](const Command& x, const Command& y) { return structurally_equal(x, y); });
}

inline bool structurally_equal(const ModelAst& a, const ModelAst& b) {
    auto same_const = [](const ConstDecl& x, const ConstDecl& y) {
        return x.name == y.name && x.kind == y.kind && x.value == y.value;
    };
    auto same_label = [](const LabelDef& x, const LabelDef& y) {
        return x.name == y.name && structurally_equal(x.expr, y.expr);
    };
    return a.kind == b.kind && detail::all_equal(a.constants, b.constants, same_const) &&
           detail::all_equal(a.modules, b.modules,
                             [](const ModuleDecl& x, const ModuleDecl& y) { return structurally_equal(x, y); }) &&
           detail::all_equal(a.labels, b.labels, same_label);
}

/// Calls fn(name, pos) for every identifier occurring in expr.
template <class Fn>
void for_each_identifier(const ExprPtr& expr, Fn&& fn) {
    if (!expr) return;
    if (const auto* id = std::get_if<Ident>(&expr->node)) {
        fn(id->name, expr->pos);
    } else if (const auto* un = std::get_if<Unary>(&expr->node)) {
        for_each_identifier(un->operand, fn);
    } else if (const auto* bin = std::get_if<Binary>(&expr->node)) {
        for_each_identifier(bin->lhs, fn);
        for_each_identifier(bin->rhs, fn);
    }
}

}  // namespace bb84mc

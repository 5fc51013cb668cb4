#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "bb84mc/dtmc.hpp"
#include "bb84mc/parser.hpp"
#include "bb84mc/printer.hpp"

namespace bb84mc {

/// A state formula: either a quoted label or a boolean expression over
/// model variables and integer constants.
struct StateFormula {
    std::variant<std::string, ExprPtr> value;
    SourcePos pos;

    static StateFormula always() { return {make_expr(BoolLit{true}), {}}; }
};

/// P=? [ F target ] or P=? [ constraint U target ]. Eventually is kept
/// distinct from Until so queries print back the way they were written;
/// it is evaluated as Until(true, target).
struct PropertyQuery {
    enum class Kind { Eventually, Until };

    Kind kind = Kind::Eventually;
    StateFormula constraint = StateFormula::always();
    StateFormula target;
};

namespace detail {

inline StateFormula parse_operand(Parser& p) {
    StateFormula f;
    f.pos = p.peek().pos;
    if (p.at(Tok::String)) {
        f.value = p.take().text;
    } else {
        f.value = p.expression();
    }
    return f;
}

}  // namespace detail

/// Parses `P=? [ F target ]` or `P=? [ constraint U target ]`. Inside the
/// brackets `F` and `U` are reserved words.
inline PropertyQuery parse_property(std::string_view text) {
    detail::Parser p(text);
    Token head = p.expect_identifier();
    if (head.text != "P") {
        throw ModelError(ErrorKind::Syntax, head.pos, "property must start with 'P=?'");
    }
    p.expect(Tok::Assign);
    p.expect(Tok::Question);
    p.expect(Tok::LBracket);

    PropertyQuery q;
    if (p.at(Tok::Ident) && p.peek().text == "F") {
        p.take();
        q.kind = PropertyQuery::Kind::Eventually;
        q.target = detail::parse_operand(p);
    } else {
        q.kind = PropertyQuery::Kind::Until;
        q.constraint = detail::parse_operand(p);
        if (!(p.at(Tok::Ident) && p.peek().text == "U")) {
            throw ModelError(ErrorKind::Syntax, p.peek().pos,
                             "expected 'U' after the path constraint, found '" + p.peek().text + "'");
        }
        p.take();
        q.target = detail::parse_operand(p);
    }
    p.expect(Tok::RBracket);
    p.expect(Tok::End);
    return q;
}

inline std::string print(const StateFormula& f) {
    if (const auto* label = std::get_if<std::string>(&f.value)) return "\"" + *label + "\"";
    const auto& expr = std::get<ExprPtr>(f.value);
    if (std::holds_alternative<BoolLit>(expr->node) || std::holds_alternative<Ident>(expr->node)) return print(expr);
    return "(" + print(expr) + ")";
}

inline std::string print(const PropertyQuery& q) {
    if (q.kind == PropertyQuery::Kind::Eventually) return "P=? [ F " + print(q.target) + " ]";
    return "P=? [ " + print(q.constraint) + " U " + print(q.target) + " ]";
}

/// Marks the states of `dtmc` satisfying a state formula. Throws
/// UNKNOWN_LABEL / UNKNOWN_IDENTIFIER / TYPE on resolution failure.
inline std::vector<bool> satisfying_states(const Dtmc& dtmc, const StateFormula& f) {
    std::vector<bool> mask(dtmc.state_count(), false);
    if (const auto* label = std::get_if<std::string>(&f.value)) {
        if (!dtmc.has_label(*label)) {
            throw ModelError(ErrorKind::UnknownLabel, f.pos, "unknown label \"" + *label + "\"");
        }
        for (std::size_t s : dtmc.label(*label)) mask[s] = true;
        return mask;
    }
    std::unordered_map<std::string, std::size_t> var_index;
    for (std::size_t k = 0; k < dtmc.variables().size(); ++k) var_index.emplace(dtmc.variables()[k].name, k);
    const std::unordered_map<std::string, double> no_doubles;
    const auto& expr = std::get<ExprPtr>(f.value);
    detail::TypeChecker types(var_index, dtmc.int_constants(), no_doubles);
    if (types.check(expr, detail::TypeChecker::Context::State) != ValueType::Bool) {
        throw ModelError(ErrorKind::Type, expr->pos, "state formula is not boolean");
    }
    CompiledExpr compiled = compile(expr, var_index, dtmc.int_constants());
    for (std::size_t s = 0; s < dtmc.state_count(); ++s) mask[s] = compiled.holds(dtmc.state(s));
    return mask;
}

/// Parses a property and checks that every label it references exists in
/// `dtmc` and every expression resolves against its variables.
inline PropertyQuery parse_property(std::string_view text, const Dtmc& dtmc) {
    PropertyQuery q = parse_property(text);
    satisfying_states(dtmc, q.constraint);
    satisfying_states(dtmc, q.target);
    return q;
}

}  // namespace bb84mc

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "bb84mc/ast.hpp"
#include "bb84mc/compiled_expr.hpp"
#include "bb84mc/printer.hpp"

namespace bb84mc {

/// Absolute tolerance on the sum of a command's branch probabilities.
inline constexpr double kProbabilitySumTolerance = 1e-9;

/// Upper bound on the number of valuations enumerated when checking one
/// pair of guards for overlap.
inline constexpr std::uint64_t kMaxOverlapValuations = std::uint64_t{1} << 24;

struct VariableInfo {
    std::string name;
    std::int64_t low = 0;
    std::int64_t high = 0;
    std::int64_t init = 0;
    std::size_t module = 0;
    SourcePos pos;
};

struct CompiledAssignment {
    std::size_t variable;
    CompiledExpr value;
};

struct CompiledUpdate {
    double probability = 1.0;
    std::vector<CompiledAssignment> assignments;
    SourcePos pos;
};

struct CompiledCommand {
    std::optional<std::string> action;
    CompiledExpr guard;
    std::vector<CompiledUpdate> updates;
    std::size_t module = 0;
    SourcePos pos;
};

struct CompiledModule {
    std::string name;
    std::vector<std::size_t> variables;
    std::vector<CompiledCommand> commands;
    std::set<std::string> alphabet;
};

struct CompiledLabel {
    std::string name;
    CompiledExpr expr;
};

/// A model that passed every static check, with constants folded and all
/// expressions lowered. Variables are in global declaration order.
struct ValidatedModel {
    ModelAst ast;
    std::vector<VariableInfo> variables;
    std::vector<CompiledModule> modules;
    std::vector<CompiledLabel> labels;
    std::unordered_map<std::string, std::int64_t> int_constants;
    std::unordered_map<std::string, double> double_constants;
    std::unordered_map<std::string, std::size_t> variable_index;
};

enum class ValueType { Int, Double, Bool };

namespace detail {

class TypeChecker {
public:
    enum class Context { State, Probability };

    TypeChecker(const std::unordered_map<std::string, std::size_t>& variables,
                const std::unordered_map<std::string, std::int64_t>& int_constants,
                const std::unordered_map<std::string, double>& double_constants)
        : variables_(variables), int_constants_(int_constants), double_constants_(double_constants) {}

    ValueType check(const ExprPtr& e, Context ctx) const {
        if (std::holds_alternative<IntLit>(e->node)) return ValueType::Int;
        if (std::holds_alternative<BoolLit>(e->node)) return ValueType::Bool;
        if (std::holds_alternative<RealLit>(e->node)) {
            if (ctx == Context::State) throw_decimal(e->pos);
            return ValueType::Double;
        }
        if (const auto* id = std::get_if<Ident>(&e->node)) {
            if (variables_.count(id->name)) {
                if (ctx == Context::Probability) {
                    throw ModelError(ErrorKind::Type, e->pos,
                                     "probability depends on state variable '" + id->name + "'");
                }
                return ValueType::Int;
            }
            if (int_constants_.count(id->name)) return ValueType::Int;
            if (!double_constants_.count(id->name)) {
                throw ModelError(ErrorKind::UnknownIdentifier, e->pos, "unknown identifier '" + id->name + "'");
            }
            if (ctx == Context::State) throw_decimal(e->pos);
            return ValueType::Double;
        }
        if (const auto* un = std::get_if<Unary>(&e->node)) {
            ValueType t = check(un->operand, ctx);
            if (un->op == UnaryOp::Not) {
                require(t == ValueType::Bool, un->operand->pos, "'!' needs a boolean operand");
                return ValueType::Bool;
            }
            require(t != ValueType::Bool, un->operand->pos, "'-' needs a numeric operand");
            return t;
        }
        const auto& bin = std::get<Binary>(e->node);
        ValueType lhs = check(bin.lhs, ctx);
        ValueType rhs = check(bin.rhs, ctx);
        switch (bin.op) {
            case BinaryOp::Or:
            case BinaryOp::And:
                require(lhs == ValueType::Bool && rhs == ValueType::Bool, e->pos, "'&'/'|' need boolean operands");
                return ValueType::Bool;
            case BinaryOp::Eq:
            case BinaryOp::Ne:
                require((lhs == ValueType::Bool) == (rhs == ValueType::Bool), e->pos,
                        "cannot compare a boolean with a number");
                return ValueType::Bool;
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge:
                require(lhs != ValueType::Bool && rhs != ValueType::Bool, e->pos, "ordering needs numeric operands");
                return ValueType::Bool;
            case BinaryOp::Div:
                if (ctx == Context::State) throw_decimal(e->pos);
                [[fallthrough]];
            case BinaryOp::Add:
            case BinaryOp::Sub:
            case BinaryOp::Mul:
                require(lhs != ValueType::Bool && rhs != ValueType::Bool, e->pos, "arithmetic needs numeric operands");
                if (bin.op == BinaryOp::Div || lhs == ValueType::Double || rhs == ValueType::Double) {
                    return ValueType::Double;
                }
                return ValueType::Int;
        }
        return ValueType::Bool;
    }

    double fold(const ExprPtr& e) const {
        if (const auto* i = std::get_if<IntLit>(&e->node)) return static_cast<double>(i->value);
        if (const auto* r = std::get_if<RealLit>(&e->node)) return r->value;
        if (const auto* id = std::get_if<Ident>(&e->node)) {
            if (auto it = int_constants_.find(id->name); it != int_constants_.end()) {
                return static_cast<double>(it->second);
            }
            return double_constants_.at(id->name);
        }
        if (const auto* un = std::get_if<Unary>(&e->node)) return -fold(un->operand);
        const auto& bin = std::get<Binary>(e->node);
        double lhs = fold(bin.lhs);
        double rhs = fold(bin.rhs);
        switch (bin.op) {
            case BinaryOp::Add: return lhs + rhs;
            case BinaryOp::Sub: return lhs - rhs;
            case BinaryOp::Mul: return lhs * rhs;
            case BinaryOp::Div: return lhs / rhs;
            default: return std::numeric_limits<double>::quiet_NaN();
        }
    }

private:
    static void require(bool ok, SourcePos pos, const char* msg) {
        if (!ok) throw ModelError(ErrorKind::Type, pos, msg);
    }

    [[noreturn]] static void throw_decimal(SourcePos pos) {
        throw ModelError(ErrorKind::Type, pos, "decimal values are only allowed in probabilities");
    }

    const std::unordered_map<std::string, std::size_t>& variables_;
    const std::unordered_map<std::string, std::int64_t>& int_constants_;
    const std::unordered_map<std::string, double>& double_constants_;
};

inline std::string describe_valuation(const std::vector<VariableInfo>& vars, const std::vector<std::size_t>& which,
                                      const std::vector<std::int32_t>& state) {
    std::string out;
    for (std::size_t k = 0; k < which.size(); ++k) {
        if (k) out += ", ";
        out += vars[which[k]].name + "=" + std::to_string(state[which[k]]);
    }
    return out.empty() ? std::string("(no variables)") : out;
}

/// Enumerates the box of every variable read by either guard; returns a
/// witness valuation if both hold somewhere.
inline std::optional<std::string> find_overlap(const ValidatedModel& model, const CompiledCommand& a,
                                               const CompiledCommand& b) {
    std::vector<std::size_t> vars = a.guard.variables();
    for (std::size_t v : b.guard.variables()) vars.push_back(v);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());

    std::uint64_t total = 1;
    for (std::size_t v : vars) {
        auto width = static_cast<std::uint64_t>(model.variables[v].high - model.variables[v].low + 1);
        if (total > kMaxOverlapValuations / width) {
            throw ModelError(ErrorKind::OverlappingGuards, b.pos,
                             "guard overlap check exceeds " + std::to_string(kMaxOverlapValuations) + " valuations");
        }
        total *= width;
    }

    std::vector<std::int32_t> state(model.variables.size());
    for (std::size_t k = 0; k < model.variables.size(); ++k) {
        state[k] = static_cast<std::int32_t>(model.variables[k].init);
    }
    for (std::size_t v : vars) state[v] = static_cast<std::int32_t>(model.variables[v].low);

    for (;;) {
        if (a.guard.holds(state) && b.guard.holds(state)) return describe_valuation(model.variables, vars, state);
        std::size_t k = 0;
        for (; k < vars.size(); ++k) {
            auto& slot = state[vars[k]];
            if (slot < model.variables[vars[k]].high) {
                ++slot;
                break;
            }
            slot = static_cast<std::int32_t>(model.variables[vars[k]].low);
        }
        if (k == vars.size()) return std::nullopt;
    }
}

}  // namespace detail

/// Checks every static invariant of a parsed model and lowers it for
/// exploration. Reports PROB_SUM, PROB_RANGE, OVERLAPPING_GUARDS, BOUNDS
/// (declaration level), TYPE and assignment errors.
inline ValidatedModel validate(const ModelAst& ast) {
    ValidatedModel model;
    model.ast = ast;

    for (const auto& c : ast.constants) {
        if (c.kind == NumericKind::Int) {
            model.int_constants.emplace(c.name, std::get<std::int64_t>(c.value));
        } else {
            model.double_constants.emplace(c.name, std::get<double>(c.value));
        }
    }

    for (std::size_t m = 0; m < ast.modules.size(); ++m) {
        CompiledModule mod;
        mod.name = ast.modules[m].name;
        for (const auto& v : ast.modules[m].variables) {
            if (v.low > v.high) {
                throw ModelError(ErrorKind::Bounds, v.pos, "variable '" + v.name + "' has an empty range");
            }
            if (v.init < v.low || v.init > v.high) {
                throw ModelError(ErrorKind::Bounds, v.pos,
                                 "initial value " + std::to_string(v.init) + " of '" + v.name + "' is outside [" +
                                     std::to_string(v.low) + ".." + std::to_string(v.high) + "]");
            }
            if (v.low < std::numeric_limits<std::int32_t>::min() || v.high > std::numeric_limits<std::int32_t>::max()) {
                throw ModelError(ErrorKind::Bounds, v.pos, "range of '" + v.name + "' exceeds 32-bit integers");
            }
            mod.variables.push_back(model.variables.size());
            model.variable_index.emplace(v.name, model.variables.size());
            model.variables.push_back({v.name, v.low, v.high, v.init, m, v.pos});
        }
        model.modules.push_back(std::move(mod));
    }

    detail::TypeChecker types(model.variable_index, model.int_constants, model.double_constants);
    using Ctx = detail::TypeChecker::Context;

    for (std::size_t m = 0; m < ast.modules.size(); ++m) {
        auto& mod = model.modules[m];
        for (const auto& cmd : ast.modules[m].commands) {
            CompiledCommand cc;
            cc.action = cmd.action;
            cc.module = m;
            cc.pos = cmd.pos;
            if (types.check(cmd.guard, Ctx::State) != ValueType::Bool) {
                throw ModelError(ErrorKind::Type, cmd.guard->pos, "guard is not a boolean expression");
            }
            cc.guard = compile(cmd.guard, model.variable_index, model.int_constants);

            double sum = 0.0;
            for (const auto& upd : cmd.updates) {
                CompiledUpdate cu;
                cu.pos = upd.pos;
                if (upd.probability) {
                    if (types.check(upd.probability, Ctx::Probability) == ValueType::Bool) {
                        throw ModelError(ErrorKind::Type, upd.probability->pos, "probability is not numeric");
                    }
                    cu.probability = types.fold(upd.probability);
                }
                if (!(cu.probability >= 0.0 && cu.probability <= 1.0)) {
                    std::ostringstream msg;
                    msg.precision(12);
                    msg << "branch probability " << cu.probability << " is outside [0,1]";
                    throw ModelError(ErrorKind::ProbRange, upd.pos, msg.str());
                }
                sum += cu.probability;

                std::set<std::string> assigned;
                for (const auto& a : upd.assignments) {
                    std::size_t var = model.variable_index.at(a.variable);
                    if (model.variables[var].module != m) {
                        throw ModelError(ErrorKind::ForeignAssignment, a.pos,
                                         "module '" + mod.name + "' cannot assign variable '" + a.variable +
                                             "' of module '" + model.modules[model.variables[var].module].name + "'");
                    }
                    if (!assigned.insert(a.variable).second) {
                        throw ModelError(ErrorKind::DuplicateAssignment, a.pos,
                                         "variable '" + a.variable + "' is assigned twice in one update");
                    }
                    if (types.check(a.value, Ctx::State) != ValueType::Int) {
                        throw ModelError(ErrorKind::Type, a.value->pos,
                                         "value assigned to '" + a.variable + "' is not an integer expression");
                    }
                    cu.assignments.push_back({var, compile(a.value, model.variable_index, model.int_constants)});
                }
                cc.updates.push_back(std::move(cu));
            }
            if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
                std::ostringstream msg;
                msg.precision(12);
                msg << "branch probabilities sum to " << sum << ", not 1";
                throw ModelError(ErrorKind::ProbSum, cmd.pos, msg.str());
            }
            if (cc.action) mod.alphabet.insert(*cc.action);
            mod.commands.push_back(std::move(cc));
        }

        for (std::size_t i = 0; i < mod.commands.size(); ++i) {
            for (std::size_t j = i + 1; j < mod.commands.size(); ++j) {
                const auto& a = mod.commands[i];
                const auto& b = mod.commands[j];
                if (a.action != b.action) continue;
                if (auto witness = detail::find_overlap(model, a, b)) {
                    std::string label = a.action ? "[" + *a.action + "]" : std::string("unlabeled");
                    throw ModelError(ErrorKind::OverlappingGuards, b.pos,
                                     label + " commands at lines " + std::to_string(a.pos.line) + " and " +
                                         std::to_string(b.pos.line) + " are both enabled at " + *witness);
                }
            }
        }
    }

    for (const auto& l : ast.labels) {
        if (types.check(l.expr, Ctx::State) != ValueType::Bool) {
            throw ModelError(ErrorKind::Type, l.expr->pos, "label \"" + l.name + "\" is not a boolean expression");
        }
        model.labels.push_back({l.name, compile(l.expr, model.variable_index, model.int_constants)});
    }
    return model;
}

}  // namespace bb84mc

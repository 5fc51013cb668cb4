#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bb84mc/ast.hpp"

namespace bb84mc {

/// Integer/boolean expression lowered to a postfix program over a state
/// vector. Booleans evaluate to 0 or 1.
class CompiledExpr {
public:
    enum class Op : std::uint8_t {
        Push,
        Load,
        Neg,
        Not,
        Add,
        Sub,
        Mul,
        Eq,
        Ne,
        Lt,
        Le,
        Gt,
        Ge,
        And,
        Or,
    };

    struct Instr {
        Op op;
        std::int64_t arg = 0;
    };

    CompiledExpr() = default;
    explicit CompiledExpr(std::vector<Instr> code) : code_(std::move(code)) {
        std::size_t depth = 0;
        for (const auto& ins : code_) {
            if (ins.op == Op::Push || ins.op == Op::Load) {
                max_depth_ = std::max(max_depth_, ++depth);
            } else if (ins.op != Op::Neg && ins.op != Op::Not) {
                --depth;
            }
        }
    }

    std::int64_t eval(std::span<const std::int32_t> state) const {
        constexpr std::size_t kInline = 32;
        std::int64_t inline_stack[kInline];
        std::vector<std::int64_t> heap_stack;
        std::int64_t* sp = inline_stack;
        if (max_depth_ > kInline) {
            heap_stack.resize(max_depth_);
            sp = heap_stack.data();
        }
        std::int64_t* const base = sp;
        for (const auto& ins : code_) {
            switch (ins.op) {
                case Op::Push: *sp++ = ins.arg; break;
                case Op::Load: *sp++ = state[static_cast<std::size_t>(ins.arg)]; break;
                case Op::Neg: sp[-1] = -sp[-1]; break;
                case Op::Not: sp[-1] = sp[-1] ? 0 : 1; break;
                default: {
                    std::int64_t rhs = *--sp;
                    std::int64_t& lhs = sp[-1];
                    switch (ins.op) {
                        case Op::Add: lhs = lhs + rhs; break;
                        case Op::Sub: lhs = lhs - rhs; break;
                        case Op::Mul: lhs = lhs * rhs; break;
                        case Op::Eq: lhs = lhs == rhs; break;
                        case Op::Ne: lhs = lhs != rhs; break;
                        case Op::Lt: lhs = lhs < rhs; break;
                        case Op::Le: lhs = lhs <= rhs; break;
                        case Op::Gt: lhs = lhs > rhs; break;
                        case Op::Ge: lhs = lhs >= rhs; break;
                        case Op::And: lhs = (lhs && rhs) ? 1 : 0; break;
                        case Op::Or: lhs = (lhs || rhs) ? 1 : 0; break;
                        default: break;
                    }
                }
            }
        }
        return sp > base ? sp[-1] : 0;
    }

    bool holds(std::span<const std::int32_t> state) const { return eval(state) != 0; }

    /// Indices of the state variables the expression reads, ascending.
    std::vector<std::size_t> variables() const {
        std::vector<std::size_t> vars;
        for (const auto& ins : code_) {
            if (ins.op == Op::Load) vars.push_back(static_cast<std::size_t>(ins.arg));
        }
        std::sort(vars.begin(), vars.end());
        vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
        return vars;
    }

    bool empty() const { return code_.empty(); }

private:
    std::vector<Instr> code_;
    std::size_t max_depth_ = 0;
};

/// Lowers an integer/boolean expression. Identifiers are looked up first as
/// state variables (by index), then as integer constants (inlined).
/// Type checking happens before lowering; this assumes a well-typed tree.
inline CompiledExpr compile(const ExprPtr& expr, const std::unordered_map<std::string, std::size_t>& var_index,
                            const std::unordered_map<std::string, std::int64_t>& int_consts) {
    using Op = CompiledExpr::Op;
    std::vector<CompiledExpr::Instr> code;
    auto emit = [&](auto&& self, const ExprPtr& e) -> void {
        if (const auto* lit = std::get_if<IntLit>(&e->node)) {
            code.push_back({Op::Push, lit->value});
        } else if (const auto* b = std::get_if<BoolLit>(&e->node)) {
            code.push_back({Op::Push, b->value ? 1 : 0});
        } else if (const auto* id = std::get_if<Ident>(&e->node)) {
            if (auto it = var_index.find(id->name); it != var_index.end()) {
                code.push_back({Op::Load, static_cast<std::int64_t>(it->second)});
            } else {
                code.push_back({Op::Push, int_consts.at(id->name)});
            }
        } else if (const auto* un = std::get_if<Unary>(&e->node)) {
            self(self, un->operand);
            code.push_back({un->op == UnaryOp::Neg ? Op::Neg : Op::Not});
        } else if (const auto* bin = std::get_if<Binary>(&e->node)) {
            self(self, bin->lhs);
            self(self, bin->rhs);
            Op op = Op::Add;
            switch (bin->op) {
                case BinaryOp::Or: op = Op::Or; break;
                case BinaryOp::And: op = Op::And; break;
                case BinaryOp::Eq: op = Op::Eq; break;
                case BinaryOp::Ne: op = Op::Ne; break;
                case BinaryOp::Lt: op = Op::Lt; break;
                case BinaryOp::Le: op = Op::Le; break;
                case BinaryOp::Gt: op = Op::Gt; break;
                case BinaryOp::Ge: op = Op::Ge; break;
                case BinaryOp::Add: op = Op::Add; break;
                case BinaryOp::Sub: op = Op::Sub; break;
                case BinaryOp::Mul: op = Op::Mul; break;
                case BinaryOp::Div: op = Op::Mul; break;  // rejected by the type checker
            }
            code.push_back({op});
        }
    };
    emit(emit, expr);
    return CompiledExpr(std::move(code));
}

}  // namespace bb84mc

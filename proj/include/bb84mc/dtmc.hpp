#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bb84mc/validate.hpp"

namespace bb84mc {

namespace detail {

struct StateHash {
    std::size_t operator()(const std::vector<std::int32_t>& v) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (std::int32_t x : v) {
            h ^= static_cast<std::uint32_t>(x);
            h *= 0x100000001b3ull;
        }
        return static_cast<std::size_t>(h);
    }
};

inline std::string describe(const std::vector<VariableInfo>& vars, std::span<const std::int32_t> values) {
    std::string out = "(";
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) out += ",";
        out += vars[k].name + "=" + std::to_string(values[k]);
    }
    return out + ")";
}

}  // namespace detail

struct Transition {
    std::size_t target;
    double probability;
};

/// Explicit discrete-time Markov chain. States are numbered in breadth-first
/// discovery order from the initial valuation; rows are sorted by target.
class Dtmc {
public:
    std::size_t state_count() const { return row_offsets_.size() - 1; }
    std::size_t transition_count() const { return transitions_.size(); }
    std::size_t initial() const { return 0; }

    std::span<const std::int32_t> state(std::size_t s) const {
        return {state_data_.data() + s * stride(), stride()};
    }

    std::span<const Transition> row(std::size_t s) const {
        return {transitions_.data() + row_offsets_[s], row_offsets_[s + 1] - row_offsets_[s]};
    }

    const std::vector<VariableInfo>& variables() const { return variables_; }
    const std::unordered_map<std::string, std::int64_t>& int_constants() const { return int_constants_; }

    bool has_label(const std::string& name) const { return labels_.count(name) != 0; }

    /// Sorted indices of the states satisfying a label.
    const std::vector<std::size_t>& label(const std::string& name) const { return labels_.at(name); }
    const std::map<std::string, std::vector<std::size_t>>& labels() const { return labels_; }

    /// States that had no enabled transition and received a self-loop.
    const std::vector<std::size_t>& deadlocks() const { return deadlocks_; }

    std::size_t stride() const { return variables_.size(); }

    std::string describe_state(std::size_t s) const { return detail::describe(variables_, state(s)); }

private:
    friend Dtmc build(const ValidatedModel& model);

    std::vector<VariableInfo> variables_;
    std::unordered_map<std::string, std::int64_t> int_constants_;
    std::vector<std::int32_t> state_data_;
    std::vector<std::size_t> row_offsets_{0};
    std::vector<Transition> transitions_;
    std::map<std::string, std::vector<std::size_t>> labels_;
    std::vector<std::size_t> deadlocks_;
};


/// Composes the modules by action-label synchronization and enumerates the
/// reachable state space breadth-first.
///
/// In each state exactly one transition group may be enabled: an unlabeled
/// command on its own, or an action label for which every module with that
/// label in its alphabet has exactly one enabled command (joint distribution
/// is the product of the participants' branches). No enabled group yields a
/// flagged deadlock with a probability-1 self-loop. Branches reaching the
/// same successor are merged; zero-probability branches are dropped.
inline Dtmc build(const ValidatedModel& model) {
    using State = std::vector<std::int32_t>;

    Dtmc dtmc;
    dtmc.variables_ = model.variables;
    dtmc.int_constants_ = model.int_constants;
    const std::size_t width = model.variables.size();

    std::set<std::string> action_set;
    for (const auto& m : model.modules) action_set.insert(m.alphabet.begin(), m.alphabet.end());
    const std::vector<std::string> actions(action_set.begin(), action_set.end());

    std::unordered_map<State, std::size_t, detail::StateHash> index;
    auto intern = [&](const State& s) -> std::size_t {
        auto [it, inserted] = index.emplace(s, index.size());
        if (inserted) dtmc.state_data_.insert(dtmc.state_data_.end(), s.begin(), s.end());
        return it->second;
    };

    State initial(width);
    for (std::size_t k = 0; k < width; ++k) initial[k] = static_cast<std::int32_t>(model.variables[k].init);
    intern(initial);

    std::vector<std::vector<const CompiledCommand*>> groups;
    std::vector<Transition> row;
    State current(width);
    State next(width);

    for (std::size_t s = 0; s < index.size(); ++s) {
        std::copy_n(dtmc.state_data_.begin() + static_cast<std::ptrdiff_t>(s * width), width, current.begin());
        groups.clear();

        for (const auto& m : model.modules) {
            for (const auto& cmd : m.commands) {
                if (!cmd.action && cmd.guard.holds(current)) groups.push_back({&cmd});
            }
        }
        for (const auto& action : actions) {
            std::vector<const CompiledCommand*> group;
            bool enabled = true;
            for (const auto& m : model.modules) {
                if (!m.alphabet.count(action)) continue;
                const CompiledCommand* chosen = nullptr;
                for (const auto& cmd : m.commands) {
                    if (cmd.action != action || !cmd.guard.holds(current)) continue;
                    if (chosen) {
                        throw ModelError(ErrorKind::Nondeterminism, cmd.pos,
                                         "module '" + m.name + "' has two enabled [" + action + "] commands in state " +
                                             detail::describe(model.variables, current));
                    }
                    chosen = &cmd;
                }
                if (!chosen) {
                    enabled = false;
                    break;
                }
                group.push_back(chosen);
            }
            if (enabled && !group.empty()) groups.push_back(std::move(group));
        }

        if (groups.size() > 1) {
            throw ModelError(ErrorKind::Nondeterminism, groups[1].front()->pos,
                             std::to_string(groups.size()) + " transition groups enabled in state " +
                                 detail::describe(model.variables, current));
        }

        row.clear();
        if (groups.empty()) {
            dtmc.deadlocks_.push_back(s);
            row.push_back({s, 1.0});
        } else {
            const auto& group = groups.front();
            std::vector<std::size_t> choice(group.size(), 0);
            for (;;) {
                double p = 1.0;
                for (std::size_t g = 0; g < group.size(); ++g) p *= group[g]->updates[choice[g]].probability;
                if (p > 0.0) {
                    next = current;
                    for (std::size_t g = 0; g < group.size(); ++g) {
                        const auto& upd = group[g]->updates[choice[g]];
                        for (const auto& a : upd.assignments) {
                            std::int64_t v = a.value.eval(current);
                            const auto& info = model.variables[a.variable];
                            if (v < info.low || v > info.high) {
                                throw ModelError(ErrorKind::Bounds, upd.pos,
                                                 "update sets '" + info.name + "' to " + std::to_string(v) +
                                                     " outside [" + std::to_string(info.low) + ".." +
                                                     std::to_string(info.high) + "] from state " +
                                                     detail::describe(model.variables, current));
                            }
                            next[a.variable] = static_cast<std::int32_t>(v);
                        }
                    }
                    std::size_t target = intern(next);
                    auto hit = std::find_if(row.begin(), row.end(), [&](const Transition& t) { return t.target == target; });
                    if (hit != row.end()) {
                        hit->probability += p;
                    } else {
                        row.push_back({target, p});
                    }
                }
                std::size_t g = 0;
                for (; g < group.size(); ++g) {
                    if (++choice[g] < group[g]->updates.size()) break;
                    choice[g] = 0;
                }
                if (g == group.size()) break;
            }
            std::sort(row.begin(), row.end(), [](const Transition& a, const Transition& b) { return a.target < b.target; });
        }
        dtmc.transitions_.insert(dtmc.transitions_.end(), row.begin(), row.end());
        dtmc.row_offsets_.push_back(dtmc.transitions_.size());
    }

    for (const auto& l : model.labels) {
        auto& members = dtmc.labels_[l.name];
        for (std::size_t s = 0; s < dtmc.state_count(); ++s) {
            if (l.expr.holds(dtmc.state(s))) members.push_back(s);
        }
    }
    return dtmc;
}

inline std::size_t state_count(const Dtmc& dtmc) { return dtmc.state_count(); }
inline std::size_t transition_count(const Dtmc& dtmc) { return dtmc.transition_count(); }

/// Plain-text dump for diffing: a header, one `src dst prob` line per
/// transition, then one line per label and the deadlock list.
inline void export_text(const Dtmc& dtmc, std::ostream& out) {
    auto flags = out.flags();
    auto precision = out.precision(17);
    out << "# states " << dtmc.state_count() << " transitions " << dtmc.transition_count() << " initial "
        << dtmc.initial() << "\n";
    out << "# variables";
    for (const auto& v : dtmc.variables()) out << " " << v.name;
    out << "\n";
    for (std::size_t s = 0; s < dtmc.state_count(); ++s) {
        for (const auto& t : dtmc.row(s)) out << s << " " << t.target << " " << t.probability << "\n";
    }
    for (const auto& [name, members] : dtmc.labels()) {
        out << "label \"" << name << "\":";
        for (std::size_t s : members) out << " " << s;
        out << "\n";
    }
    out << "deadlock:";
    for (std::size_t s : dtmc.deadlocks()) out << " " << s;
    out << "\n";
    out.precision(precision);
    out.flags(flags);
}

}  // namespace bb84mc

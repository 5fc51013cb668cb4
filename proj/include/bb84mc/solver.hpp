#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <sstream>
#include <vector>

#include "bb84mc/dtmc.hpp"
#include "bb84mc/property.hpp"

namespace bb84mc {

struct SolveOptions {
    double tolerance = 1e-12;
    std::size_t max_iterations = 1'000'000;
    /// Called after every Gauss-Seidel sweep with the current iterate.
    std::function<void(std::size_t sweep, std::span<const double> values)> on_sweep;
};

struct SolveReport {
    double probability = 0.0;
    std::size_t iterations = 0;
    double residual = 0.0;
    std::size_t prob0_count = 0;
    std::size_t prob1_count = 0;
    /// Per-state until-probabilities, indexed like the Dtmc's states.
    std::vector<double> values;
};

namespace detail {

/// Predecessor lists in CSR form.
struct Predecessors {
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> sources;

    explicit Predecessors(const Dtmc& dtmc) : offsets(dtmc.state_count() + 1, 0) {
        for (std::size_t s = 0; s < dtmc.state_count(); ++s) {
            for (const auto& t : dtmc.row(s)) ++offsets[t.target + 1];
        }
        for (std::size_t s = 0; s < dtmc.state_count(); ++s) offsets[s + 1] += offsets[s];
        sources.resize(offsets.back());
        std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
        for (std::size_t s = 0; s < dtmc.state_count(); ++s) {
            for (const auto& t : dtmc.row(s)) sources[fill[t.target]++] = s;
        }
    }

    std::span<const std::size_t> of(std::size_t s) const {
        return {sources.data() + offsets[s], offsets[s + 1] - offsets[s]};
    }
};

/// Backward closure of `seeds` through predecessors admitted by `through`.
inline std::vector<bool> backward_reach(const Predecessors& pred, const std::vector<bool>& seeds,
                                        const std::vector<bool>& through) {
    std::vector<bool> reached = seeds;
    std::deque<std::size_t> work;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        if (seeds[s]) work.push_back(s);
    }
    while (!work.empty()) {
        std::size_t s = work.front();
        work.pop_front();
        for (std::size_t p : pred.of(s)) {
            if (!reached[p] && through[p]) {
                reached[p] = true;
                work.push_back(p);
            }
        }
    }
    return reached;
}

inline std::vector<bool> prob0_mask(const Predecessors& pred, const std::vector<bool>& constraint,
                                    const std::vector<bool>& target) {
    std::vector<bool> can_reach = backward_reach(pred, target, constraint);
    can_reach.flip();
    return can_reach;
}

inline std::vector<bool> prob1_mask(const Predecessors& pred, const std::vector<bool>& constraint,
                                    const std::vector<bool>& target, const std::vector<bool>& no) {
    std::vector<bool> maybe_fail(constraint.size());
    for (std::size_t s = 0; s < constraint.size(); ++s) maybe_fail[s] = constraint[s] && !target[s];
    std::vector<bool> can_fail = backward_reach(pred, no, maybe_fail);
    can_fail.flip();
    return can_fail;
}

inline std::vector<std::size_t> indices(const std::vector<bool>& mask) {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < mask.size(); ++s) {
        if (mask[s]) out.push_back(s);
    }
    return out;
}

}  // namespace detail

/// States whose until-probability is exactly 0: those that cannot reach
/// the target along constraint states. Purely graph-based.
inline std::vector<std::size_t> prob0_states(const Dtmc& dtmc, const PropertyQuery& query) {
    detail::Predecessors pred(dtmc);
    return detail::indices(detail::prob0_mask(pred, satisfying_states(dtmc, query.constraint),
                                              satisfying_states(dtmc, query.target)));
}

/// States whose until-probability is exactly 1 (graph-based).
inline std::vector<std::size_t> prob1_states(const Dtmc& dtmc, const PropertyQuery& query) {
    detail::Predecessors pred(dtmc);
    auto constraint = satisfying_states(dtmc, query.constraint);
    auto target = satisfying_states(dtmc, query.target);
    auto no = detail::prob0_mask(pred, constraint, target);
    return detail::indices(detail::prob1_mask(pred, constraint, target, no));
}

/// Probability of `constraint U target` from the initial state.
///
/// Prob0 states are fixed at 0 and target states at 1; the remaining states
/// solve x = P x by Gauss-Seidel sweeps in state-index order, starting from
/// 0, until the largest per-sweep change drops below the tolerance. Each
/// update divides out the self-loop weight, so a state's value is the exact
/// fixpoint of its own equation given its neighbours.
inline SolveReport prob_until(const Dtmc& dtmc, const PropertyQuery& query, const SolveOptions& options = {}) {
    if (!(options.tolerance > 0.0)) {
        throw ModelError(ErrorKind::InvalidParameter, "solver tolerance must be positive");
    }
    const std::size_t n = dtmc.state_count();
    auto constraint = satisfying_states(dtmc, query.constraint);
    auto target = satisfying_states(dtmc, query.target);
    detail::Predecessors pred(dtmc);
    auto no = detail::prob0_mask(pred, constraint, target);
    auto yes = detail::prob1_mask(pred, constraint, target, no);

    SolveReport report;
    report.values.assign(n, 0.0);
    std::vector<std::size_t> maybe;
    for (std::size_t s = 0; s < n; ++s) {
        if (no[s]) {
            ++report.prob0_count;
        } else if (target[s]) {
            report.values[s] = 1.0;
        } else {
            maybe.push_back(s);
        }
        if (yes[s]) ++report.prob1_count;
    }

    while (!maybe.empty()) {
        if (report.iterations >= options.max_iterations) {
            std::ostringstream msg;
            msg << "no convergence after " << report.iterations << " sweeps, residual " << report.residual;
            throw ModelError(ErrorKind::NoConvergence, msg.str());
        }
        double residual = 0.0;
        for (std::size_t s : maybe) {
            double sum = 0.0;
            double self = 0.0;
            for (const auto& t : dtmc.row(s)) {
                if (t.target == s) {
                    self += t.probability;
                } else {
                    sum += t.probability * report.values[t.target];
                }
            }
            double updated = sum / (1.0 - self);
            residual = std::max(residual, std::abs(updated - report.values[s]));
            report.values[s] = updated;
        }
        ++report.iterations;
        report.residual = residual;
        if (options.on_sweep) options.on_sweep(report.iterations, report.values);
        if (residual < options.tolerance) break;
    }

    report.probability = report.values[dtmc.initial()];
    return report;
}

}  // namespace bb84mc

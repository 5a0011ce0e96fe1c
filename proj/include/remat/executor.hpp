// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "remat/errors.hpp"
#include "remat/policy_table.hpp"
#include "remat/trace.hpp"
#include "remat/types.hpp"

namespace remat {

/// Host-supplied chain computation.
///
/// `forward` evaluates the core at one position and returns its internal
/// state without the input hidden state (the executor keeps that alongside
/// when needed). `forward` must be deterministic: recomputation has to
/// regenerate identical states. Positions run 1..t.
template <class T>
concept ChainTape = requires(T& tape, int pos, const typename T::hidden_type& h,
                             const typename T::core_type& core,
                             const typename T::input_type& x,
                             typename T::output_type out,
                             const typename T::grad_output_type& g_out,
                             const typename T::grad_hidden_type& g_h,
                             typename T::grad_input_type g_in) {
    { tape.initial_hidden() } -> std::convertible_to<typename T::hidden_type>;
    { tape.get_input(pos) } -> std::convertible_to<typename T::input_type>;
    { tape.forward(x, h) } -> std::convertible_to<typename T::core_type>;
    { tape.next_hidden(core) } -> std::convertible_to<typename T::hidden_type>;
    { tape.output(core) } -> std::convertible_to<typename T::output_type>;
    { tape.set_output_and_get_grad_output(pos, std::move(out)) }
        -> std::convertible_to<typename T::grad_output_type>;
    { tape.backward(core, x, h, g_out, g_h) }
        -> std::convertible_to<std::pair<typename T::grad_input_type, typename T::grad_hidden_type>>;
    tape.set_grad_input(pos, std::move(g_in));
};

struct ExecuteOptions {
    /// Compare every recomputed hidden state against the first one produced
    /// at that position; needs `tape.checksum(hidden) -> uint64_t`.
    bool verify_determinism = false;
    bool record_events = true;
};

/// LIFO store of checkpoints with occupancy accounting.
template <class Hidden, class Core>
class CheckpointStack {
public:
    struct Entry {
        int pos;
        PushKind kind;
        int charge;
        std::optional<Hidden> hidden;        ///< hidden entries
        std::optional<Core> core;            ///< internal entries
        std::optional<Hidden> input_hidden;  ///< internal entries, unless deduplicated
    };

    explicit CheckpointStack(MemoryBudget capacity) : capacity_(capacity.units()) {}

    void push_hidden(int pos, Hidden h, int charge) {
        admit(pos, charge);
        entries_.push_back(Entry{pos, PushKind::hidden, charge, std::move(h), std::nullopt, std::nullopt});
    }

    void push_internal(int pos, Core core, std::optional<Hidden> input_hidden, int charge) {
        admit(pos, charge);
        entries_.push_back(
            Entry{pos, PushKind::internal, charge, std::nullopt, std::move(core), std::move(input_hidden)});
    }

    void pop() {
        if (entries_.empty()) throw std::logic_error("CheckpointStack: pop on empty stack");
        occupancy_ -= entries_.back().charge;
        entries_.pop_back();
    }

    const Entry& top() const { return entries_.back(); }
    /// Entry directly below the top.
    const Entry& below_top() const { return entries_.at(entries_.size() - 2); }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    int occupancy() const noexcept { return occupancy_; }
    int peak() const noexcept { return peak_; }
    int capacity() const noexcept { return capacity_; }

private:
    void admit(int pos, int charge) {
        if (!entries_.empty() && pos <= entries_.back().pos) {
            throw std::logic_error("CheckpointStack: positions must increase towards the top");
        }
        if (occupancy_ + charge > capacity_) {
            throw std::logic_error("CheckpointStack: capacity exceeded at position " + std::to_string(pos));
        }
        occupancy_ += charge;
        peak_ = std::max(peak_, occupancy_);
    }

    int capacity_;
    int occupancy_ = 0;
    int peak_ = 0;
    std::vector<Entry> entries_;
};

namespace detail {

template <ChainTape Tape>
class PolicyExecutor {
public:
    using Hidden = typename Tape::hidden_type;
    using Core = typename Tape::core_type;
    using GradHidden = typename Tape::grad_hidden_type;

    PolicyExecutor(const PolicyTable& policy, Tape& tape, int t, MemoryBudget budget,
                   const ExecuteOptions& opts, ExecutionTrace& trace)
        : policy_(policy), tape_(tape), t_(t), budget_(budget), opts_(opts), trace_(trace),
          stack_(budget) {
        if (t < 0) throw ConfigError("sequence length must be >= 0");
        if (!policy.covers(t, budget.units())) {
            throw ConfigError("policy does not cover t=" + std::to_string(t) +
                              ", m=" + std::to_string(budget.units()));
        }
        if constexpr (requires { tape.length(); }) {
            if (static_cast<long long>(tape.length()) < t) throw ConfigError("tape is shorter than t");
        }
        if (opts.verify_determinism) {
            if constexpr (requires(Tape& tp, const Hidden& h) { { tp.checksum(h) } -> std::convertible_to<std::uint64_t>; }) {
                checksums_.assign(static_cast<std::size_t>(t) + 1, std::nullopt);
            } else {
                throw ConfigError("determinism checking requires tape.checksum(hidden)");
            }
        }
    }

    GradHidden run(GradHidden grad_last_hidden) {
        trace_ = ExecutionTrace{};
        stack_.push_hidden(0, tape_.initial_hidden(), 1);
        GradHidden g = solve(t_, budget_.units(), 0, std::move(grad_last_hidden));
        stack_.pop();
        trace_.peak_memory_units = stack_.peak();
        if (trace_.backward_ops != t_) throw std::logic_error("executor: backward count mismatch");
        return g;
    }

private:
    void record(EventKind kind, int pos, bool dedup = false) {
        if (opts_.record_events) trace_.events.push_back(Event{kind, pos, dedup});
    }

    Hidden entry_hidden(const typename CheckpointStack<Hidden, Core>::Entry& e) {
        if (e.kind == PushKind::hidden) return *e.hidden;
        return tape_.next_hidden(*e.core);
    }

    /// Forwards positions s+1 .. s+steps from the checkpoint on top (at s).
    void forward_from_entry(int s, int steps) {
        const auto& top = stack_.top();
        if (top.pos != s) throw std::logic_error("executor: subsequence entry is not on top");
        work_input_ = entry_hidden(top);
        for (int i = 1; i <= steps; ++i) {
            if (i > 1) work_input_ = tape_.next_hidden(*work_core_);
            const int pos = s + i;
            work_core_ = tape_.forward(tape_.get_input(pos), *work_input_);
            work_pos_ = pos;
            ++trace_.forward_ops;
            record(EventKind::forward, pos);
            if (opts_.verify_determinism) verify(pos);
        }
    }

    void verify(int pos) {
        if constexpr (requires(Tape& tp, const Hidden& h) { tp.checksum(h); }) {
            const std::uint64_t sum = tape_.checksum(tape_.next_hidden(*work_core_));
            auto& slot = checksums_[static_cast<std::size_t>(pos)];
            if (!slot) {
                slot = sum;
            } else if (*slot != sum) {
                throw IntegrityError("recomputed state at position " + std::to_string(pos) +
                                     " differs from the original; the tape is not deterministic");
            }
        }
    }

    GradHidden backward_at(int pos, const Core& core, const Hidden& input_hidden, const GradHidden& g) {
        auto grad_out = tape_.set_output_and_get_grad_output(pos, tape_.output(core));
        auto [grad_in, grad_prev] = tape_.backward(core, tape_.get_input(pos), input_hidden, grad_out, g);
        tape_.set_grad_input(pos, std::move(grad_in));
        ++trace_.backward_ops;
        record(EventKind::backward, pos);
        return std::move(grad_prev);
    }

    GradHidden backward_working(int pos, const GradHidden& g) {
        if (work_pos_ != pos) throw std::logic_error("executor: working core is not at the frontier");
        GradHidden out = backward_at(pos, *work_core_, *work_input_, g);
        work_core_.reset();
        work_input_.reset();
        work_pos_ = -1;
        return out;
    }

    GradHidden backward_stored(int pos, const GradHidden& g) {
        const auto& top = stack_.top();
        if (top.pos != pos || top.kind != PushKind::internal) {
            throw std::logic_error("executor: expected an internal state on top");
        }
        GradHidden out = top.input_hidden ? backward_at(pos, *top.core, *top.input_hidden, g)
                                          : backward_at(pos, *top.core, entry_hidden(stack_.below_top()), g);
        stack_.pop();
        record(EventKind::pop, pos);
        return out;
    }

    GradHidden solve(int t, int m, int s, GradHidden g) {
        if (t == 0) return g;
        if (t == 1) {
            forward_from_entry(s, 1);
            return backward_working(s + 1, g);
        }
        const int y = policy_.split(t, m);
        if (y == 0) {
            for (int k = t; k >= 1; --k) {
                forward_from_entry(s, k);
                g = backward_working(s + k, g);
            }
            return g;
        }
        forward_from_entry(s, y);
        if (policy_.kind(t, m) == PushKind::hidden) {
            stack_.push_hidden(s + y, tape_.next_hidden(*work_core_), 1);
            record(EventKind::push_hidden, s + y);
            g = solve(t - y, m - 1, s + y, std::move(g));
            stack_.pop();
            record(EventKind::pop, s + y);
            return solve(y, m, s, std::move(g));
        }
        const int charge = policy_.internal_charge(y);
        const bool dedup = policy_.internal_push_deduplicated(y);
        stack_.push_internal(s + y, *work_core_, dedup ? std::nullopt : std::optional<Hidden>(*work_input_),
                             charge);
        record(EventKind::push_internal, s + y, dedup);
        g = solve(t - y, m - charge, s + y, std::move(g));
        g = backward_stored(s + y, g);
        return solve(y - 1, m, s, std::move(g));
    }

    const PolicyTable& policy_;
    Tape& tape_;
    int t_;
    MemoryBudget budget_;
    ExecuteOptions opts_;
    ExecutionTrace& trace_;
    CheckpointStack<Hidden, Core> stack_;
    std::optional<Hidden> work_input_;
    std::optional<Core> work_core_;
    int work_pos_ = -1;
    std::vector<std::optional<std::uint64_t>> checksums_;
};

}  // namespace detail

/// Runs `policy` over positions 1..t of `tape` within `budget`.
///
/// Returns the gradient with respect to the initial hidden state. The
/// initial hidden state occupies one unit of the budget for the whole run.
template <ChainTape Tape>
typename Tape::grad_hidden_type execute(const PolicyTable& policy, Tape& tape, int t, MemoryBudget budget,
                                        typename Tape::grad_hidden_type grad_last_hidden,
                                        const ExecuteOptions& opts = {}, ExecutionTrace* trace = nullptr) {
    ExecutionTrace local;
    ExecutionTrace& out = trace ? *trace : local;
    detail::PolicyExecutor<Tape> ex(policy, tape, t, budget, opts, out);
    return ex.run(std::move(grad_last_hidden));
}

template <ChainTape Tape>
typename Tape::grad_hidden_type execute_hsm(const PolicyTable& policy, Tape& tape, int t, MemoryBudget budget,
                                            typename Tape::grad_hidden_type grad_last_hidden,
                                            const ExecuteOptions& opts = {}, ExecutionTrace* trace = nullptr) {
    if (policy.algorithm() != Algorithm::hsm) throw ConfigError("execute_hsm needs an HSM policy");
    return execute(policy, tape, t, budget, std::move(grad_last_hidden), opts, trace);
}

template <ChainTape Tape>
typename Tape::grad_hidden_type execute_ism(const PolicyTable& policy, Tape& tape, int t, MemoryBudget budget,
                                            typename Tape::grad_hidden_type grad_last_hidden,
                                            const ExecuteOptions& opts = {}, ExecutionTrace* trace = nullptr) {
    if (policy.algorithm() != Algorithm::ism) throw ConfigError("execute_ism needs an ISM policy");
    return execute(policy, tape, t, budget, std::move(grad_last_hidden), opts, trace);
}

/// Mixed-policy execution; `model` must match the model the policy was solved with.
template <ChainTape Tape>
typename Tape::grad_hidden_type execute_msm(const PolicyTable& policy, Tape& tape, int t, MemoryBudget budget,
                                            const CostModel& model,
                                            typename Tape::grad_hidden_type grad_last_hidden,
                                            const ExecuteOptions& opts = {}, ExecutionTrace* trace = nullptr) {
    if (!is_mixed(policy.algorithm())) throw ConfigError("execute_msm needs an MSM policy");
    if (!policy.cost_model()->same_memory(model)) {
        throw ConfigError("cost model does not match the policy (alpha/beta differ)");
    }
    return execute(policy, tape, t, budget, std::move(grad_last_hidden), opts, trace);
}

/// Tape whose states are their own positions. Every call checks that the
/// executor feeds the right state, so a dry run also validates the
/// control path.
struct PositionTape {
    using hidden_type = int;
    using core_type = int;
    using input_type = int;
    using output_type = int;
    using grad_output_type = int;
    using grad_input_type = int;
    using grad_hidden_type = int;

    int initial_hidden() const { return 0; }
    int get_input(int pos) const { return pos; }
    int forward(int input, int hidden) const {
        if (hidden != input - 1) throw std::logic_error("dry run: forward from the wrong state");
        return input;
    }
    int next_hidden(int core) const { return core; }
    int output(int core) const { return core; }
    int set_output_and_get_grad_output(int, int) const { return 0; }
    std::pair<int, int> backward(int core, int input, int hidden, int, int grad_hidden) const {
        if (core != input || hidden != input - 1 || grad_hidden != input) {
            throw std::logic_error("dry run: backward out of order");
        }
        return {0, input - 1};
    }
    void set_grad_input(int, int) const {}
    std::uint64_t checksum(int hidden) const { return static_cast<std::uint64_t>(hidden); }
};

/// Dry run of `policy` without a real computation; same control path as execute().
inline ExecutionTrace trace_execution(const PolicyTable& policy, int t, MemoryBudget budget,
                                      std::optional<CostModel> model = std::nullopt,
                                      bool record_events = true) {
    if (model && is_mixed(policy.algorithm()) && !policy.cost_model()->same_memory(*model)) {
        throw ConfigError("cost model does not match the policy (alpha/beta differ)");
    }
    PositionTape tape;
    ExecutionTrace trace;
    ExecuteOptions opts;
    opts.record_events = record_events;
    const int g = execute(policy, tape, t, budget, t, opts, &trace);
    if (g != 0) throw std::logic_error("dry run: gradient did not reach the initial state");
    return trace;
}

}  // namespace remat

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "remat/errors.hpp"
#include "remat/replay.hpp"
#include "remat/trace.hpp"
#include "remat/types.hpp"

namespace remat {

/// Forward count and memory of a fixed (non-optimised) strategy.
/// Memory is in hidden-state units and includes the initial hidden state.
struct StrategyReport {
    std::string name;
    int t = 0;
    std::int64_t total_forwards = 0;
    double memory_units = 0.0;
    double forwards_per_step = 0.0;
};

namespace detail {

inline void require_length(int t) {
    if (t < 1) throw ConfigError("sequence length must be >= 1");
}

inline StrategyReport report(std::string name, int t, std::int64_t forwards, double memory) {
    return StrategyReport{std::move(name), t, forwards, memory,
                          static_cast<double>(forwards) / static_cast<double>(t)};
}

inline int ceil_sqrt(int t) {
    int r = static_cast<int>(std::sqrt(static_cast<double>(t)));
    while (r * r < t) ++r;
    while (r > 1 && (r - 1) * (r - 1) >= t) --r;
    return r;
}

inline void chen_recursive_events(std::vector<Event>& ev, int s, int len, int k) {
    if (len == 1) {
        ev.push_back({EventKind::forward, s + 1});
        ev.push_back({EventKind::backward, s + 1});
        return;
    }
    if (len <= k) {
        for (int p = s + 1; p <= s + len; ++p) {
            ev.push_back({EventKind::forward, p});
            if (p < s + len) ev.push_back({EventKind::push_hidden, p});
        }
        ev.push_back({EventKind::backward, s + len});
        for (int p = s + len - 1; p > s; --p) {
            ev.push_back({EventKind::pop, p});
            ev.push_back({EventKind::forward, p});
            ev.push_back({EventKind::backward, p});
        }
        return;
    }
    const int parts = k + 1;
    std::vector<int> start(parts + 1, s);
    for (int i = 0; i < parts; ++i) {
        const int size = len / parts + (i < len % parts ? 1 : 0);
        start[i + 1] = start[i] + size;
    }
    for (int p = s + 1; p <= start[parts - 1]; ++p) {
        ev.push_back({EventKind::forward, p});
        for (int i = 1; i < parts; ++i) {
            if (start[i] == p) ev.push_back({EventKind::push_hidden, p});
        }
    }
    for (int i = parts - 1; i >= 0; --i) {
        chen_recursive_events(ev, start[i], start[i + 1] - start[i], k);
        if (i > 0) ev.push_back({EventKind::pop, start[i]});
    }
}

}  // namespace detail

/// Recompute from the initial state before every backward step.
inline StrategyReport naive_quadratic(int t) {
    detail::require_length(t);
    return detail::report("naive_quadratic", t, static_cast<std::int64_t>(t) * (t + 1) / 2, 1.0);
}

/// Keep the hidden state at every position; one recompute per backward
/// step except the last.
inline StrategyReport store_all_hidden(int t) {
    detail::require_length(t);
    return detail::report("store_all_hidden", t, 2 * static_cast<std::int64_t>(t) - 1, t);
}

/// Chen's sqrt(t) schedule as events.
///
/// Segments of ceil(sqrt t) positions (the last one shorter). One full pass
/// stores the hidden state at every segment boundary and the internal
/// states of the last segment; each earlier segment is re-forwarded once
/// from its boundary, keeping its internal states. Internal states are
/// stored without their input hidden state (it is the entry below).
inline std::vector<Event> chen_sqrt_schedule(int t) {
    detail::require_length(t);
    const int len = detail::ceil_sqrt(t);
    const int segments = (t + len - 1) / len;
    const int last_start = (segments - 1) * len + 1;
    std::vector<Event> ev;

    for (int p = 1; p <= t; ++p) {
        ev.push_back({EventKind::forward, p});
        if (p < last_start && p % len == 0) ev.push_back({EventKind::push_hidden, p});
        if (p >= last_start && p < t) ev.push_back({EventKind::push_internal, p, true});
    }
    ev.push_back({EventKind::backward, t});
    for (int p = t - 1; p >= last_start; --p) {
        ev.push_back({EventKind::backward, p});
        ev.push_back({EventKind::pop, p});
    }
    for (int seg = segments - 1; seg >= 1; --seg) {
        const int a = (seg - 1) * len + 1;
        const int b = seg * len;
        ev.push_back({EventKind::pop, b});
        for (int p = a; p <= b; ++p) {
            ev.push_back({EventKind::forward, p});
            if (p < b) ev.push_back({EventKind::push_internal, p, true});
        }
        ev.push_back({EventKind::backward, b});
        for (int p = b - 1; p >= a; --p) {
            ev.push_back({EventKind::backward, p});
            ev.push_back({EventKind::pop, p});
        }
    }
    return ev;
}

/// Chen's sqrt(t) strategy. Memory follows the usual accounting: one
/// hidden state per segment (the initial state included) plus a full
/// segment of internal states at beta units each, i.e. sqrt(t)(1 + beta)
/// when t is a perfect square.
inline StrategyReport chen_sqrt(int t, const CostModel& model) {
    const auto ev = chen_sqrt_schedule(t);
    CostModel dedup_model{std::max(model.alpha, model.beta), model.beta, model.backward_ratio};
    const auto r = replay_schedule(ev, t, Algorithm::msm_dedup, dedup_model);
    const int len = detail::ceil_sqrt(t);
    const int segments = (t + len - 1) / len;
    return detail::report("chen_sqrt", t, r.forward_ops,
                          static_cast<double>(segments) + static_cast<double>(len) * model.beta);
}

/// Chen's recursive schedule: k stored boundaries split a segment into
/// k + 1 near-equal parts, the last part first; segments of length <= k
/// keep every hidden state. Hidden states only.
inline std::vector<Event> chen_recursive_schedule(int t, int k) {
    detail::require_length(t);
    if (k < 1) throw ConfigError("chen_recursive: k must be >= 1");
    std::vector<Event> ev;
    detail::chen_recursive_events(ev, 0, t, k);
    return ev;
}

inline StrategyReport chen_recursive(int t, int k) {
    const auto ev = chen_recursive_schedule(t, k);
    const auto r = replay_schedule(ev, t, Algorithm::hsm, CostModel{});
    return detail::report("chen_recursive_k" + std::to_string(k), t, r.forward_ops, r.peak_memory_units);
}

}  // namespace remat

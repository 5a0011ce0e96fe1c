// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace remat {

enum class EventKind : std::uint8_t { push_hidden, push_internal, pop, forward, backward };

inline std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::push_hidden: return "push_hidden";
        case EventKind::push_internal: return "push_internal";
        case EventKind::pop: return "pop";
        case EventKind::forward: return "forward";
        case EventKind::backward: return "backward";
    }
    return "?";
}

/// One step of a schedule. Positions are 1-origin; position 0 is the
/// initial hidden state. `dedup` marks an internal push stored without its
/// input hidden state.
struct Event {
    EventKind kind;
    int pos;
    bool dedup = false;
    friend bool operator==(const Event&, const Event&) = default;
};

/// Summary of one execution. Memory is in hidden-state units (slots for
/// ISM) and includes the initial hidden state; the working core is excluded.
struct ExecutionTrace {
    std::int64_t forward_ops = 0;
    std::int64_t backward_ops = 0;
    int peak_memory_units = 0;
    std::vector<Event> events;
};

/// True when every pop removes the most recent unmatched push.
inline bool properly_nested(const std::vector<Event>& events) {
    std::vector<int> open;
    for (const auto& e : events) {
        if (e.kind == EventKind::push_hidden || e.kind == EventKind::push_internal) {
            open.push_back(e.pos);
        } else if (e.kind == EventKind::pop) {
            if (open.empty() || open.back() != e.pos) return false;
            open.pop_back();
        }
    }
    return open.empty();
}

/// `index,event,pos,dedup` rows.
inline std::string events_to_csv(const std::vector<Event>& events) {
    std::string out = "index,event,pos,dedup\n";
    std::size_t i = 0;
    for (const auto& e : events) {
        out += std::to_string(i++);
        out += ',';
        out += to_string(e.kind);
        out += ',';
        out += std::to_string(e.pos);
        out += e.dedup ? ",1\n" : ",0\n";
    }
    return out;
}

}  // namespace remat

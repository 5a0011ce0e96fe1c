// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "remat/errors.hpp"
#include "remat/trace.hpp"
#include "remat/types.hpp"

namespace remat {

struct ReplayResult {
    std::int64_t forward_ops = 0;
    int peak_memory_units = 0;
};

/// Replays an event list on the abstract checkpoint machine and checks
/// that it is a legal, complete schedule for t positions.
///
/// Written independently of the executor: forwards must read the working
/// core or the top of the stack, pushes must copy the working core, each
/// backward needs the internal state at the frontier, pops are LIFO. The
/// initial hidden state starts on the stack with one unit. Throws
/// ValidationError describing the first illegal event.
inline ReplayResult replay_schedule(const std::vector<Event>& events, int t, Algorithm cls,
                                    const CostModel& model) {
    struct Entry {
        int pos;
        PushKind kind;
        int charge;
    };
    std::vector<Entry> stack{{0, PushKind::hidden, 1}};
    int occupancy = 1;
    int frontier = t;
    int core = 0;
    ReplayResult r{0, 1};

    auto bad = [](std::size_t i, const std::string& what) {
        throw ValidationError("event " + std::to_string(i) + ": " + what);
    };

    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& e = events[i];
        switch (e.kind) {
            case EventKind::forward:
                if (e.pos < 1 || e.pos > frontier) bad(i, "forward past the frontier");
                if (!(core >= 1 && core == e.pos - 1) && stack.back().pos != e.pos - 1) {
                    bad(i, "input hidden state is neither in the core nor on top of the stack");
                }
                core = e.pos;
                ++r.forward_ops;
                break;
            case EventKind::push_hidden:
            case EventKind::push_internal: {
                const bool internal = e.kind == EventKind::push_internal;
                if (core != e.pos || core == 0) bad(i, "push of a state not in the working core");
                if (e.pos <= stack.back().pos) bad(i, "push below the top of the stack");
                if (internal && cls == Algorithm::hsm) bad(i, "internal push in a hidden-only schedule");
                if (!internal && cls == Algorithm::ism) bad(i, "hidden push in an internal-only schedule");
                int charge = 1;
                if (internal && cls != Algorithm::ism) {
                    charge = model.alpha;
                    if (e.dedup) {
                        if (stack.back().pos != e.pos - 1) bad(i, "deduplicated push without its input below");
                        charge = model.beta;
                    }
                }
                stack.push_back({e.pos, internal ? PushKind::internal : PushKind::hidden, charge});
                occupancy += charge;
                r.peak_memory_units = std::max(r.peak_memory_units, occupancy);
                break;
            }
            case EventKind::pop:
                if (stack.size() < 2 || stack.back().pos != e.pos) bad(i, "pop does not match the top");
                occupancy -= stack.back().charge;
                stack.pop_back();
                break;
            case EventKind::backward:
                if (e.pos != frontier || frontier == 0) bad(i, "backward out of order");
                if (core == e.pos) {
                    core = 0;
                } else if (!(stack.back().kind == PushKind::internal && stack.back().pos == e.pos)) {
                    bad(i, "no internal state available for backward");
                }
                --frontier;
                break;
        }
    }
    if (frontier != 0) throw ValidationError("schedule ends before every position is backpropagated");
    if (stack.size() != 1) throw ValidationError("schedule leaves checkpoints on the stack");
    return r;
}

}  // namespace remat

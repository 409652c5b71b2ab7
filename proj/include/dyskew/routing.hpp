#pragma once

#include "dyskew/core.hpp"
#include "dyskew/state_machine.hpp"

#include <map>
#include <string_view>
#include <vector>

namespace dyskew {

enum class StrategyKind {
    LocalOnly,
    StaticRoundRobin,
    Adaptive,
};

constexpr std::string_view to_string(StrategyKind k) {
    switch (k) {
    case StrategyKind::LocalOnly: return "local_only";
    case StrategyKind::StaticRoundRobin: return "static_round_robin";
    case StrategyKind::Adaptive: return "adaptive";
    }
    return "unknown";
}

enum class Selector {
    RoundRobin,
    LeastLoaded,
};

constexpr std::string_view to_string(Selector s) {
    switch (s) {
    case Selector::RoundRobin: return "round_robin";
    case Selector::LeastLoaded: return "least_loaded";
    }
    return "unknown";
}

// How destinations are chosen while distributing. LocalOnly ignores selector
// and self_skip entirely.
struct RoutingStrategy {
    StrategyKind kind = StrategyKind::Adaptive;
    Selector selector = Selector::RoundRobin;
    bool self_skip = false;

    friend constexpr bool operator==(const RoutingStrategy&, const RoutingStrategy&) = default;
};

// Round-robin position, owned by one link instance. The index is reduced
// modulo the candidate count on every use, so it stays valid when the
// candidate set changes size.
struct RoutingCursor {
    std::size_t next_index = 0;
};

// Destinations a distributing instance may route to, in canonical order.
// With self_skip the local instance is excluded unless it is the only one.
inline std::vector<InstanceId> candidate_set(InstanceId self, const std::vector<InstanceId>& all,
                                             bool self_skip) {
    if (std::find(all.begin(), all.end(), self) == all.end()) {
        throw ContractViolation("candidate_set: self " + to_string(self) + " not in instance list");
    }
    if (!self_skip) {
        return all;
    }
    std::vector<InstanceId> out;
    out.reserve(all.size() - 1);
    for (InstanceId id : all) {
        if (id != self) {
            out.push_back(id);
        }
    }
    if (out.empty()) {
        out.push_back(self);
    }
    return out;
}

inline InstanceId route_round_robin(RoutingCursor& cursor, const std::vector<InstanceId>& candidates) {
    if (candidates.empty()) {
        throw ContractViolation("route_round_robin: empty candidate set");
    }
    const std::size_t index = cursor.next_index % candidates.size();
    cursor.next_index = (index + 1) % candidates.size();
    return candidates[index];
}

// Candidate with the smallest pending queue cost; ties go to the earliest
// candidate in canonical order (the input order).
inline InstanceId route_least_loaded(const std::vector<InstanceId>& candidates,
                                     const std::map<InstanceId, SimTime>& queue_cost) {
    if (candidates.empty()) {
        throw ContractViolation("route_least_loaded: empty candidate set");
    }
    const InstanceId* best = nullptr;
    SimTime best_cost{0};
    for (const InstanceId& id : candidates) {
        auto it = queue_cost.find(id);
        if (it == queue_cost.end()) {
            throw ContractViolation("route_least_loaded: no queue cost for " + to_string(id));
        }
        if (best == nullptr || it->second < best_cost) {
            best = &id;
            best_cost = it->second;
        }
    }
    return *best;
}

// Top-level per-row destination decision.
//   LocalOnly                      -> self, always
//   StaticRoundRobin               -> round-robin over all instances, link state ignored
//   Adaptive, distributing state   -> selector over the candidate set
//   Adaptive, non-distributing     -> self
inline InstanceId route(LinkState state, const RoutingStrategy& strategy, InstanceId self,
                        const std::vector<InstanceId>& all, RoutingCursor& cursor,
                        const std::map<InstanceId, SimTime>& queue_cost) {
    switch (strategy.kind) {
    case StrategyKind::LocalOnly:
        return self;
    case StrategyKind::StaticRoundRobin:
        return route_round_robin(cursor, all);
    case StrategyKind::Adaptive:
        break;
    }
    if (!is_distributing(state)) {
        return self;
    }
    const std::vector<InstanceId> candidates = candidate_set(self, all, strategy.self_skip);
    if (strategy.selector == Selector::LeastLoaded) {
        return route_least_loaded(candidates, queue_cost);
    }
    return route_round_robin(cursor, candidates);
}

} // namespace dyskew

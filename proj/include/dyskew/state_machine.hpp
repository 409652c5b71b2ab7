#pragma once

#include "dyskew/core.hpp"

#include <array>
#include <string_view>

namespace dyskew {

// Per-link-instance state machine. Links progress from a policy-determined
// starting state through at most one deciding and one draining phase into an
// absorbing terminal state; no configuration in scope loops back.
enum class LinkState {
    Initial,
    DecidingLocal,
    DecidingDistributed,
    DrainingToDistributed,
    TerminalLocal,
    TerminalDistributed,
    TerminalDisabled,
};

inline constexpr std::array<LinkState, 7> all_link_states = {
    LinkState::Initial,
    LinkState::DecidingLocal,
    LinkState::DecidingDistributed,
    LinkState::DrainingToDistributed,
    LinkState::TerminalLocal,
    LinkState::TerminalDistributed,
    LinkState::TerminalDisabled,
};

constexpr std::string_view to_string(LinkState s) {
    switch (s) {
    case LinkState::Initial: return "initial";
    case LinkState::DecidingLocal: return "deciding_local";
    case LinkState::DecidingDistributed: return "deciding_distributed";
    case LinkState::DrainingToDistributed: return "draining_to_distributed";
    case LinkState::TerminalLocal: return "terminal_local";
    case LinkState::TerminalDistributed: return "terminal_distributed";
    case LinkState::TerminalDisabled: return "terminal_disabled";
    }
    return "unknown";
}

constexpr bool is_terminal(LinkState s) {
    return s == LinkState::TerminalLocal || s == LinkState::TerminalDistributed ||
           s == LinkState::TerminalDisabled;
}

enum class PolicyKind {
    NeverDistribute,
    DistributeLate,
    DistributeEarly,
};

constexpr std::string_view to_string(PolicyKind k) {
    switch (k) {
    case PolicyKind::NeverDistribute: return "never_distribute";
    case PolicyKind::DistributeLate: return "distribute_late";
    case PolicyKind::DistributeEarly: return "distribute_early";
    }
    return "unknown";
}

// Consumer-declared preference governing whether and when redistribution is
// permitted. `self_skip` forces remote-only destinations while distributing;
// `guard_enabled` arms the row-size guard.
struct RedistributionPolicy {
    PolicyKind kind = PolicyKind::DistributeLate;
    bool self_skip = false;
    bool guard_enabled = true;

    friend constexpr bool operator==(const RedistributionPolicy&,
                                     const RedistributionPolicy&) = default;
};

// Inputs for one transition step, produced by the link evaluation at a batch
// boundary. skew_confirmed and guard_triggered are mutually exclusive by
// construction upstream (a skew signal suppresses the guard).
struct StepSignals {
    bool skew_confirmed = false;
    bool guard_triggered = false;
    bool drain_complete = false;
};

// Starting state per policy: Never runs locked-local, Late observes before
// committing, Early distributes from the first row but can still be shut
// off by the guard.
constexpr LinkState initial_state(const RedistributionPolicy& policy) {
    switch (policy.kind) {
    case PolicyKind::NeverDistribute: return LinkState::TerminalLocal;
    case PolicyKind::DistributeLate: return LinkState::DecidingLocal;
    case PolicyKind::DistributeEarly: return LinkState::DecidingDistributed;
    }
    return LinkState::TerminalLocal;
}

// Transition table. Unlisted (state, signal) combinations are no-ops, and
// terminal states absorb everything.
constexpr LinkState step(LinkState state, const RedistributionPolicy& policy, StepSignals signals) {
    const bool guard = signals.guard_triggered && policy.guard_enabled;
    switch (state) {
    case LinkState::DecidingLocal:
        if (signals.skew_confirmed) {
            return LinkState::DrainingToDistributed;
        }
        if (guard) {
            return LinkState::TerminalLocal;
        }
        return state;
    case LinkState::DecidingDistributed:
        if (signals.skew_confirmed) {
            return LinkState::TerminalDistributed;
        }
        if (guard) {
            return LinkState::TerminalDisabled;
        }
        return state;
    case LinkState::DrainingToDistributed:
        if (signals.drain_complete) {
            return LinkState::TerminalDistributed;
        }
        return state;
    default:
        return state;
    }
}

// True for every state in which freshly produced rows are routed through the
// candidate set rather than pinned to self. Draining counts: the in-flight
// batch finishes locally, but new batches already go remote.
constexpr bool is_distributing(LinkState state) {
    return state == LinkState::DecidingDistributed ||
           state == LinkState::DrainingToDistributed ||
           state == LinkState::TerminalDistributed;
}

} // namespace dyskew

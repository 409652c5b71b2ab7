#pragma once

#include "dyskew/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dyskew {

// Cost model for moving a row to a remote instance. Local delivery is free
// and instant. A remote transfer takes
//
//     per_row_overhead + round_half_up(payload_bytes * per_byte_cost)
//
// of virtual time, and transfers from one sender serialize on that sender's
// uplink: the worker keeps processing (sends never block compute), but a
// transfer starts only when the previous one from the same instance has
// finished. That contention is what makes shipping heavy rows expensive;
// with a zero-cost model the uplink never queues and delivery is instant.
struct NetworkModel {
    SimTime per_row_overhead{0};
    double per_byte_cost = 0.0; // virtual ms per byte

    std::vector<std::string> validate() const {
        std::vector<std::string> issues;
        if (per_row_overhead.ms < 0) {
            issues.push_back("network.per_row_overhead_ms must be >= 0");
        }
        if (per_byte_cost < 0.0) {
            issues.push_back("network.per_byte_cost must be >= 0");
        }
        return issues;
    }
};

inline SimTime remote_delay(std::uint64_t payload_bytes, const NetworkModel& model) {
    return model.per_row_overhead + scale_time(static_cast<double>(payload_bytes), model.per_byte_cost);
}

} // namespace dyskew

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyskew {

// Thrown when an operation's precondition is violated by the caller.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Virtual time in integer milliseconds. Integer so that identical runs are
// bit-reproducible; there is no floating-point anywhere on the clock path.
struct SimTime {
    std::int64_t ms = 0;

    friend constexpr auto operator<=>(SimTime, SimTime) = default;
    friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.ms + b.ms}; }
    friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime{a.ms - b.ms}; }
    constexpr SimTime& operator+=(SimTime o) {
        ms += o.ms;
        return *this;
    }
    constexpr SimTime& operator-=(SimTime o) {
        ms -= o.ms;
        return *this;
    }
};

// Round half up, for the few places where a rational factor meets the integer
// clock (network cost, worker load factors).
inline SimTime scale_time(double value, double factor) {
    return SimTime{static_cast<std::int64_t>(std::floor(value * factor + 0.5))};
}

// One link instance: interpreter `interpreter_index` on node `node_index`.
// Canonical ordering (used for every tie-break in the project) is
// lexicographic on (node_index, interpreter_index).
struct InstanceId {
    int node_index = 0;
    int interpreter_index = 0;

    friend constexpr auto operator<=>(InstanceId, InstanceId) = default;
};

inline std::string to_string(InstanceId id) {
    return std::to_string(id.node_index) + ":" + std::to_string(id.interpreter_index);
}

// Unit of work. Cost is the processing time on a load-factor-1.0 worker;
// both cost and payload are fixed at generation time.
struct Row {
    std::uint64_t row_id = 0;
    std::uint64_t payload_bytes = 0;
    SimTime cost_units{0};

    friend constexpr bool operator==(const Row&, const Row&) = default;
};

struct Batch {
    std::vector<Row> rows;
    InstanceId origin;
};

// Rows per batch. Collapses when individual rows are very large, which is
// exactly the signal the row-size guard watches.
inline int batch_density(const Batch& batch) {
    if (batch.rows.empty()) {
        throw ContractViolation("batch_density: batch must be non-empty");
    }
    return static_cast<int>(batch.rows.size());
}

// Producer-side batch chopping: a batch closes at `max_rows` rows or at
// `max_bytes` of payload, whichever binds first. A single oversized row
// still forms a singleton batch.
struct BatchLimits {
    int max_rows = 1024;
    std::uint64_t max_bytes = 16ull * 1024 * 1024;
};

inline std::vector<Batch> build_batches(const std::vector<Row>& rows, InstanceId origin,
                                        const BatchLimits& limits) {
    std::vector<Batch> out;
    Batch current{{}, origin};
    std::uint64_t current_bytes = 0;
    for (const Row& row : rows) {
        const bool row_fits = current.rows.empty() ||
                              (static_cast<int>(current.rows.size()) < limits.max_rows &&
                               current_bytes + row.payload_bytes <= limits.max_bytes);
        if (!row_fits) {
            out.push_back(std::move(current));
            current = Batch{{}, origin};
            current_bytes = 0;
        }
        current.rows.push_back(row);
        current_bytes += row.payload_bytes;
    }
    if (!current.rows.empty()) {
        out.push_back(std::move(current));
    }
    return out;
}

// One (timestamp, cumulative sync time) sample of an instance's consumer.
struct SyncSample {
    SimTime at{0};
    SimTime total{0};

    friend constexpr bool operator==(const SyncSample&, const SyncSample&) = default;
};

// Cross-instance observable state at one virtual instant: what a link
// instance is allowed to see about its siblings when deciding whether it is
// skewed. Holds exactly one record per live link instance, self included,
// in canonical instance order.
struct SiblingSnapshot {
    struct InstanceRecord {
        InstanceId id;
        std::uint64_t row_count = 0;
        std::vector<SyncSample> sync_series;
        SimTime last_activity{0};
    };

    InstanceId self_id;
    SimTime now{0};
    std::vector<InstanceRecord> records;

    const InstanceRecord* find(InstanceId id) const {
        auto it = std::find_if(records.begin(), records.end(),
                               [&](const InstanceRecord& r) { return r.id == id; });
        return it == records.end() ? nullptr : &*it;
    }

    const InstanceRecord& record_of(InstanceId id) const {
        const InstanceRecord* rec = find(id);
        if (rec == nullptr) {
            throw ContractViolation("snapshot does not contain instance " + to_string(id));
        }
        return *rec;
    }
};

// Arithmetic mean of sibling row counts, or nullopt when `self` has no
// siblings. Sibling counts are summed in record order (canonical), so the
// result is identical across evaluations.
inline std::optional<double> sibling_average_rows(const SiblingSnapshot& snapshot, InstanceId self) {
    snapshot.record_of(self); // contract: self must be present
    double sum = 0.0;
    std::size_t sibling_count = 0;
    for (const auto& rec : snapshot.records) {
        if (rec.id == self) {
            continue;
        }
        sum += static_cast<double>(rec.row_count);
        ++sibling_count;
    }
    if (sibling_count == 0) {
        return std::nullopt;
    }
    return sum / static_cast<double>(sibling_count);
}

// Per-instance counters accumulated over one run.
struct MetricsRecord {
    InstanceId instance;
    std::uint64_t rows_processed = 0;
    SimTime sync_time_total{0};
    SimTime idle_time_total{0};
    std::uint64_t rows_sent_remote = 0;
    std::uint64_t bytes_sent_remote = 0;

    friend constexpr bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

} // namespace dyskew

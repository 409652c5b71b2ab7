#pragma once

#include "dyskew/config.hpp"
#include "dyskew/core.hpp"
#include "dyskew/network.hpp"
#include "dyskew/routing.hpp"
#include "dyskew/skew_models.hpp"
#include "dyskew/state_machine.hpp"
#include "dyskew/workload.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <vector>

namespace dyskew {

enum class EventKind {
    RowArrival,
    RowComplete,
    BatchBoundary,
    ModelTick,
};

struct TransitionLogEntry {
    SimTime at{0};
    InstanceId instance;
    LinkState from = LinkState::Initial;
    LinkState to = LinkState::Initial;

    friend constexpr bool operator==(const TransitionLogEntry&, const TransitionLogEntry&) = default;
};

// Everything measured about one run. Embeds the fully resolved scenario so a
// report is re-runnable on its own.
struct RunReport {
    SimTime makespan{0};
    std::vector<MetricsRecord> instances;
    std::uint64_t rows_redistributed_total = 0;
    std::uint64_t bytes_redistributed_total = 0;
    std::vector<TransitionLogEntry> transition_log;
    ScenarioConfig config_echo;
    std::uint64_t seed = 0;
};

// Output of one link evaluation tick.
struct LinkEvaluation {
    StrikeCounter counter;
    LinkState state = LinkState::Initial;
    bool transitioned = false;
    bool raw_verdict = false;
    bool guard_triggered = false;
};

// One skew-model tick for a producer-side link instance: raw model verdict,
// N-strikes update, row-size guard, then the state-machine step. The guard is
// suppressed by any skew signal (raw or confirmed), so skew_confirmed and
// guard_triggered can never be asserted together. Density is absent on ticks
// with no batch to dispatch, which disarms the guard for that tick.
inline LinkEvaluation evaluate_link(const SiblingSnapshot& snapshot, ModelChoice choice,
                                    const ModelParams& params, StrikeCounter counter,
                                    LinkState state, const RedistributionPolicy& policy,
                                    std::optional<int> next_batch_density, bool drain_complete) {
    LinkEvaluation out;
    out.raw_verdict = evaluate_model(choice, snapshot, params);
    out.counter = strike_update(counter, out.raw_verdict, params.strikes_n);
    const bool skewed_now = out.raw_verdict || out.counter.confirmed;
    out.guard_triggered = policy.guard_enabled && next_batch_density.has_value() &&
                          row_size_guard_triggered(*next_batch_density, skewed_now, params);
    const StepSignals signals{out.counter.confirmed, out.guard_triggered, drain_complete};
    out.state = step(state, policy, signals);
    out.transitioned = out.state != state;
    return out;
}

// Deterministic discrete-event engine for one producer->consumer link stage.
//
// Each instance is both a producer (a pre-generated list of batches) and a
// consumer (a FIFO worker). A producer dispatches one batch per boundary:
// the skew model is evaluated, the state machine steps, and every row of the
// batch is routed under the resulting state. Rows kept locally enqueue
// instantly; remote rows serialize on the sender's uplink and arrive after
// the network delay. The next boundary fires once the dispatched batch's
// locally kept rows have completed (immediately, if it kept none), and one
// final model tick runs after the last batch so a draining link can commit.
//
// Events are processed in (time, sequence) order with a globally unique
// sequence, so identical configs replay identically, bit for bit.
class Simulation {
public:
    // Test/observability hook, called with each tick's snapshot.
    using SnapshotObserver = std::function<void(const SiblingSnapshot&)>;

    explicit Simulation(const ScenarioConfig& config, SnapshotObserver observer = nullptr)
        : cfg_(resolved(config)), observer_(std::move(observer)) {}

    RunReport run() {
        setup();
        while (!events_.empty()) {
            const Event ev = events_.top();
            events_.pop();
            switch (ev.kind) {
            case EventKind::BatchBoundary:
            case EventKind::ModelTick:
                on_tick(ev.instance, ev.time);
                break;
            case EventKind::RowArrival:
                on_arrival(ev.instance, ev.row, ev.time);
                break;
            case EventKind::RowComplete:
                on_complete(ev.instance, ev.time);
                break;
            }
        }
        return finish();
    }

private:
    struct QueuedRow {
        Row row;
        SimTime effective_cost{0};
        bool paces_boundary = false; // locally kept row of the latest batch
    };

    struct Event {
        SimTime time{0};
        std::uint64_t sequence = 0;
        EventKind kind = EventKind::ModelTick;
        std::size_t instance = 0;
        QueuedRow row;
    };

    struct EventAfter {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) {
                return b.time < a.time;
            }
            return b.sequence < a.sequence;
        }
    };

    struct InstanceState {
        InstanceId id;
        double load_factor = 1.0;
        // consumer side
        std::deque<QueuedRow> queue;
        std::optional<QueuedRow> in_service;
        std::uint64_t rows_processed = 0;
        SimTime sync_total{0};
        SimTime last_activity{0};
        SimTime last_complete{0};
        std::vector<SyncSample> sync_series;
        // producer side
        std::vector<Batch> batches;
        std::size_t next_batch = 0;
        int boundary_rows_outstanding = 0;
        bool final_tick_emitted = false;
        SimTime uplink_free{0};
        LinkState state = LinkState::Initial;
        StrikeCounter strikes;
        RoutingCursor cursor;
        std::uint64_t rows_sent_remote = 0;
        std::uint64_t bytes_sent_remote = 0;
    };

    void setup() {
        ids_ = cfg_.instance_ids();
        const auto rows = generate(cfg_.workload, cfg_.instance_count());
        total_rows_ = 0;
        instances_.clear();
        instances_.reserve(ids_.size());
        for (std::size_t i = 0; i < ids_.size(); ++i) {
            InstanceState st;
            st.id = ids_[i];
            st.load_factor = cfg_.load_factors[i];
            st.batches = build_batches(rows[i], st.id, cfg_.batch);
            st.state = initial_state(cfg_.policy);
            st.cursor.next_index = i;
            total_rows_ += rows[i].size();
            pending_cost_[st.id] = SimTime{0};
            instances_.push_back(std::move(st));
        }
        makespan_ = SimTime{0};
        max_effective_cost_ = SimTime{0};
        sequence_ = 0;
        transitions_.clear();
        for (std::size_t i = 0; i < instances_.size(); ++i) {
            if (!instances_[i].batches.empty()) {
                push_event(SimTime{0}, EventKind::BatchBoundary, i);
            }
        }
    }

    void push_event(SimTime at, EventKind kind, std::size_t instance) {
        events_.push(Event{at, sequence_++, kind, instance, QueuedRow{}});
    }

    void push_event(SimTime at, EventKind kind, std::size_t instance, QueuedRow row) {
        events_.push(Event{at, sequence_++, kind, instance, std::move(row)});
    }

    SimTime effective_cost(const Row& row, const InstanceState& dest) const {
        return scale_time(static_cast<double>(row.cost_units.ms), dest.load_factor);
    }

    SiblingSnapshot snapshot_of(std::size_t self, SimTime now) const {
        SiblingSnapshot snap;
        snap.self_id = instances_[self].id;
        snap.now = now;
        snap.records.reserve(instances_.size());
        for (const auto& st : instances_) {
            snap.records.push_back(SiblingSnapshot::InstanceRecord{
                st.id, st.rows_processed, st.sync_series, st.last_activity});
        }
        return snap;
    }

    void on_tick(std::size_t i, SimTime now) {
        InstanceState& st = instances_[i];
        const bool has_batch = st.next_batch < st.batches.size();
        std::optional<int> density;
        if (has_batch) {
            density = batch_density(st.batches[st.next_batch]);
        }
        const SiblingSnapshot snapshot = snapshot_of(i, now);
        if (observer_) {
            observer_(snapshot);
        }
        const bool draining = st.state == LinkState::DrainingToDistributed;
        const LinkEvaluation eval =
            evaluate_link(snapshot, cfg_.model.choice, cfg_.model.params, st.strikes, st.state,
                          cfg_.policy, density, draining);
        st.strikes = eval.counter;
        if (eval.transitioned) {
            transitions_.push_back(TransitionLogEntry{now, st.id, st.state, eval.state});
            st.state = eval.state;
        }
        if (!has_batch) {
            // Final ticks: keep ticking only while a drain is still pending.
            if (st.state == LinkState::DrainingToDistributed) {
                push_event(now, EventKind::ModelTick, i);
            }
            return;
        }
        dispatch_batch(i, now);
    }

    void dispatch_batch(std::size_t i, SimTime now) {
        InstanceState& st = instances_[i];
        const Batch& batch = st.batches[st.next_batch];
        st.next_batch += 1;
        int kept_local = 0;
        for (const Row& row : batch.rows) {
            const InstanceId dest =
                route(st.state, cfg_.strategy, st.id, ids_, st.cursor, pending_cost_);
            if (dest == st.id) {
                kept_local += 1;
                deliver_local(i, row, now);
            } else {
                send_remote(i, dest, row, now);
            }
        }
        st.boundary_rows_outstanding = kept_local;
        if (kept_local == 0) {
            schedule_next_producer_event(i, now);
        }
    }

    void schedule_next_producer_event(std::size_t i, SimTime now) {
        InstanceState& st = instances_[i];
        if (st.next_batch < st.batches.size()) {
            push_event(now, EventKind::BatchBoundary, i);
        } else if (!st.final_tick_emitted) {
            st.final_tick_emitted = true;
            push_event(now, EventKind::ModelTick, i);
        }
    }

    std::size_t index_of(InstanceId id) const {
        return static_cast<std::size_t>(id.node_index) *
                   static_cast<std::size_t>(cfg_.interpreters_per_node) +
               static_cast<std::size_t>(id.interpreter_index);
    }

    void deliver_local(std::size_t i, const Row& row, SimTime now) {
        InstanceState& st = instances_[i];
        QueuedRow qrow{row, effective_cost(row, st), true};
        pending_cost_[st.id] += qrow.effective_cost;
        st.last_activity = now;
        st.queue.push_back(std::move(qrow));
        try_start(i, now);
    }

    void send_remote(std::size_t i, InstanceId dest, const Row& row, SimTime now) {
        InstanceState& sender = instances_[i];
        const std::size_t d = index_of(dest);
        InstanceState& receiver = instances_[d];
        const SimTime delay = remote_delay(row.payload_bytes, cfg_.network);
        const SimTime start = std::max(now, sender.uplink_free);
        const SimTime arrival = start + delay;
        sender.uplink_free = arrival;
        sender.rows_sent_remote += 1;
        sender.bytes_sent_remote += row.payload_bytes;
        QueuedRow qrow{row, effective_cost(row, receiver), false};
        pending_cost_[dest] += qrow.effective_cost;
        push_event(arrival, EventKind::RowArrival, d, std::move(qrow));
    }

    void on_arrival(std::size_t i, QueuedRow row, SimTime now) {
        InstanceState& st = instances_[i];
        st.last_activity = now;
        st.queue.push_back(std::move(row));
        try_start(i, now);
    }

    void try_start(std::size_t i, SimTime now) {
        InstanceState& st = instances_[i];
        if (st.in_service.has_value() || st.queue.empty()) {
            return;
        }
        st.in_service = std::move(st.queue.front());
        st.queue.pop_front();
        push_event(now + st.in_service->effective_cost, EventKind::RowComplete, i);
    }

    void on_complete(std::size_t i, SimTime now) {
        InstanceState& st = instances_[i];
        if (!st.in_service.has_value()) {
            throw std::logic_error("internal: completion with no row in service");
        }
        const QueuedRow done = std::move(*st.in_service);
        st.in_service.reset();
        st.rows_processed += 1;
        st.sync_total += done.effective_cost;
        st.last_activity = now;
        st.last_complete = now;
        pending_cost_[st.id] -= done.effective_cost;
        max_effective_cost_ = std::max(max_effective_cost_, done.effective_cost);
        makespan_ = std::max(makespan_, now);
        append_sync_sample(st, now);
        if (done.paces_boundary) {
            st.boundary_rows_outstanding -= 1;
            if (st.boundary_rows_outstanding == 0) {
                schedule_next_producer_event(i, now);
            }
        }
        try_start(i, now);
    }

    void append_sync_sample(InstanceState& st, SimTime now) {
        if (!st.sync_series.empty() && st.sync_series.back().at == now) {
            st.sync_series.back().total = st.sync_total;
            return;
        }
        st.sync_series.push_back(SyncSample{now, st.sync_total});
        const auto cap = static_cast<std::size_t>(std::max(cfg_.model.params.slope_window, 2));
        if (st.sync_series.size() > cap) {
            st.sync_series.erase(st.sync_series.begin());
        }
    }

    RunReport finish() {
        std::uint64_t processed = 0;
        for (const auto& st : instances_) {
            processed += st.rows_processed;
            if (!st.queue.empty() || st.in_service.has_value()) {
                throw std::logic_error("internal: rows left unprocessed at end of run");
            }
        }
        if (processed != total_rows_) {
            throw std::logic_error("internal: row conservation violated");
        }
        check_makespan_bounds();

        RunReport report;
        report.makespan = makespan_;
        report.seed = cfg_.seed;
        report.config_echo = cfg_;
        for (const auto& st : instances_) {
            MetricsRecord rec;
            rec.instance = st.id;
            rec.rows_processed = st.rows_processed;
            rec.sync_time_total = st.sync_total;
            rec.idle_time_total = makespan_ - st.sync_total;
            rec.rows_sent_remote = st.rows_sent_remote;
            rec.bytes_sent_remote = st.bytes_sent_remote;
            report.instances.push_back(rec);
            report.rows_redistributed_total += st.rows_sent_remote;
            report.bytes_redistributed_total += st.bytes_sent_remote;
        }
        report.transition_log = transitions_;
        return report;
    }

    void check_makespan_bounds() {
        if (makespan_ < max_effective_cost_) {
            throw std::logic_error("internal: makespan below largest single row cost");
        }
        const bool uniform = std::all_of(cfg_.load_factors.begin(), cfg_.load_factors.end(),
                                         [&](double f) { return f == cfg_.load_factors.front(); });
        if (uniform && !instances_.empty()) {
            std::int64_t total_work = 0;
            for (const auto& st : instances_) {
                total_work += st.sync_total.ms;
            }
            const auto n = static_cast<std::int64_t>(instances_.size());
            const std::int64_t floor_bound = (total_work + n - 1) / n;
            if (makespan_.ms < floor_bound) {
                throw std::logic_error("internal: makespan below work-conservation bound");
            }
        }
    }

    ScenarioConfig cfg_;
    SnapshotObserver observer_;
    std::vector<InstanceId> ids_;
    std::vector<InstanceState> instances_;
    std::map<InstanceId, SimTime> pending_cost_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
    std::vector<TransitionLogEntry> transitions_;
    std::uint64_t sequence_ = 0;
    std::uint64_t total_rows_ = 0;
    SimTime makespan_{0};
    SimTime max_effective_cost_{0};
};

inline RunReport run_scenario(const ScenarioConfig& config) {
    return Simulation(config).run();
}

} // namespace dyskew

#include "dyskew/prng.hpp"
#include "dyskew/simulator.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

using namespace dyskew;

namespace {

// The four-rows / four-interpreters scenario: one minute per row, all rows
// landing on the first interpreter, free network.
ScenarioConfig motivating_config() {
    ScenarioConfig cfg;
    cfg.nodes = 1;
    cfg.interpreters_per_node = 4;
    cfg.workload.total_rows = 4;
    cfg.workload.placement = {PlacementKind::SingleHot, 1.0, 1.0};
    cfg.workload.cost = {CostDistKind::Constant, 60000};
    cfg.workload.payload.bytes = 100;
    cfg.policy.guard_enabled = false; // a 4-row batch is below any density threshold
    cfg.seed = 7;
    return cfg;
}

ScenarioConfig with_policy(ScenarioConfig cfg, PolicyKind kind, StrategyKind strategy) {
    cfg.policy.kind = kind;
    cfg.strategy.kind = strategy;
    return cfg;
}

SiblingSnapshot idle_sibling_snapshot(SimTime now, SimTime sibling_activity) {
    SiblingSnapshot snap;
    snap.self_id = InstanceId{0, 0};
    snap.now = now;
    snap.records = {{InstanceId{0, 0}, 10, {}, now},
                    {InstanceId{0, 1}, 0, {}, sibling_activity}};
    return snap;
}

} // namespace

TEST_CASE("remote delay adds the per-byte cost to the per-row overhead") {
    NetworkModel model;
    model.per_row_overhead = SimTime{1};
    model.per_byte_cost = 0.001;
    CHECK(remote_delay(0, model) == SimTime{1});
    CHECK(remote_delay(1000000, model) == SimTime{1001});
    model.per_byte_cost = 0.0;
    CHECK(remote_delay(123456789, model) == SimTime{1});
}

TEST_CASE("motivating scenario: local pile-up takes four minutes, spreading takes one") {
    const auto base = motivating_config();

    const RunReport never =
        run_scenario(with_policy(base, PolicyKind::NeverDistribute, StrategyKind::Adaptive));
    CHECK(never.makespan == SimTime{240000});
    CHECK(never.bytes_redistributed_total == 0);
    CHECK(never.transition_log.empty());

    const RunReport static_rr =
        run_scenario(with_policy(base, PolicyKind::NeverDistribute, StrategyKind::StaticRoundRobin));
    CHECK(static_rr.makespan == SimTime{60000});
    CHECK(static_rr.rows_redistributed_total == 3);

    const RunReport early =
        run_scenario(with_policy(base, PolicyKind::DistributeEarly, StrategyKind::Adaptive));
    CHECK(early.makespan == SimTime{60000});
    CHECK(early.rows_redistributed_total == 3);
}

TEST_CASE("an empty workload finishes instantly with empty logs") {
    ScenarioConfig cfg;
    cfg.nodes = 2;
    cfg.interpreters_per_node = 2;
    cfg.workload.total_rows = 0;
    const RunReport report = run_scenario(cfg);
    CHECK(report.makespan == SimTime{0});
    CHECK(report.transition_log.empty());
    CHECK(report.rows_redistributed_total == 0);
    for (const auto& rec : report.instances) {
        CHECK(rec.rows_processed == 0);
        CHECK(rec.sync_time_total == SimTime{0});
    }
}

TEST_CASE("evaluate_link walks deciding-local into draining after n strikes") {
    ModelParams params; // idle_period 100, strikes 3
    RedistributionPolicy late{PolicyKind::DistributeLate};
    StrikeCounter counter;
    LinkState state = LinkState::DecidingLocal;

    for (int tick = 1; tick <= 2; ++tick) {
        const auto eval =
            evaluate_link(idle_sibling_snapshot(SimTime{1000 * tick}, SimTime{0}),
                          ModelChoice::IdleTime, params, counter, state, late, 100, false);
        counter = eval.counter;
        state = eval.state;
        CHECK(state == LinkState::DecidingLocal);
        CHECK(counter.consecutive_positives == tick);
    }
    const auto third = evaluate_link(idle_sibling_snapshot(SimTime{3000}, SimTime{0}),
                                     ModelChoice::IdleTime, params, counter, state, late, 100,
                                     false);
    CHECK(third.counter.confirmed);
    CHECK(third.state == LinkState::DrainingToDistributed);
    CHECK(third.transitioned);

    const auto drained = evaluate_link(idle_sibling_snapshot(SimTime{4000}, SimTime{0}),
                                       ModelChoice::IdleTime, params, third.counter, third.state,
                                       late, 100, true);
    CHECK(drained.state == LinkState::TerminalDistributed);
}

TEST_CASE("evaluate_link lets the guard disable an eager link before confirmation") {
    ModelParams params;
    RedistributionPolicy early{PolicyKind::DistributeEarly};
    // Nobody is idle: not skewed, and density 5 is below the threshold of 10.
    const auto eval = evaluate_link(idle_sibling_snapshot(SimTime{50}, SimTime{50}),
                                    ModelChoice::IdleTime, params, StrikeCounter{},
                                    LinkState::DecidingDistributed, early, 5, false);
    CHECK(eval.guard_triggered);
    CHECK(eval.state == LinkState::TerminalDisabled);

    SECTION("without a batch there is no density and no guard") {
        const auto tick = evaluate_link(idle_sibling_snapshot(SimTime{50}, SimTime{50}),
                                        ModelChoice::IdleTime, params, StrikeCounter{},
                                        LinkState::DecidingDistributed, early, std::nullopt, false);
        CHECK(!tick.guard_triggered);
        CHECK(tick.state == LinkState::DecidingDistributed);
    }

    SECTION("never-distribute links ignore every tick") {
        const auto tick = evaluate_link(idle_sibling_snapshot(SimTime{5000}, SimTime{0}),
                                        ModelChoice::IdleTime, params, StrikeCounter{},
                                        LinkState::TerminalLocal,
                                        RedistributionPolicy{PolicyKind::NeverDistribute}, 5,
                                        false);
        CHECK(tick.state == LinkState::TerminalLocal);
        CHECK(!tick.transitioned);
    }
}

TEST_CASE("guard and confirmed skew are never asserted together") {
    SplitMix64 rng(404);
    ModelParams params;
    params.strikes_n = 1;
    for (int trial = 0; trial < 500; ++trial) {
        const SimTime now{static_cast<std::int64_t>(rng.next_below(2000))};
        const SimTime sibling{static_cast<std::int64_t>(rng.next_below(2000))};
        const auto density = static_cast<int>(1 + rng.next_below(20));
        StrikeCounter counter{static_cast<int>(rng.next_below(3)), rng.next_below(2) == 0};
        const auto eval = evaluate_link(
            idle_sibling_snapshot(now, std::min(sibling, now)), ModelChoice::IdleTime, params,
            counter, LinkState::DecidingDistributed, RedistributionPolicy{PolicyKind::DistributeEarly},
            density, false);
        CHECK(!(eval.guard_triggered && eval.counter.confirmed));
        CHECK(!(eval.guard_triggered && eval.raw_verdict));
    }
}

TEST_CASE("snapshots expose processed counts, sync series and last activity") {
    SECTION("at the first boundary every count is zero") {
        ScenarioConfig cfg;
        cfg.nodes = 1;
        cfg.interpreters_per_node = 2;
        cfg.workload.total_rows = 6;
        cfg.workload.cost = {CostDistKind::Constant, 100};
        bool saw_first = false;
        Simulation sim(cfg, [&](const SiblingSnapshot& snap) {
            if (snap.now == SimTime{0} && !saw_first) {
                saw_first = true;
                for (const auto& rec : snap.records) {
                    CHECK(rec.row_count == 0);
                    CHECK(rec.sync_series.empty());
                }
            }
        });
        sim.run();
        CHECK(saw_first);
    }

    SECTION("ten 100ms rows put the sync endpoint at 1000ms") {
        ScenarioConfig cfg;
        cfg.nodes = 1;
        cfg.interpreters_per_node = 2;
        cfg.workload.total_rows = 10;
        cfg.workload.placement = {PlacementKind::SingleHot, 1.0, 1.0};
        cfg.workload.cost = {CostDistKind::Constant, 100};
        cfg.policy.kind = PolicyKind::NeverDistribute;
        cfg.batch.max_rows = 1;
        std::optional<SiblingSnapshot> last;
        Simulation sim(cfg, [&](const SiblingSnapshot& snap) { last = snap; });
        const RunReport report = sim.run();
        CHECK(report.makespan == SimTime{1000});
        REQUIRE(last.has_value());
        CHECK(last->now == SimTime{1000});
        const auto& self = last->record_of(InstanceId{0, 0});
        CHECK(self.row_count == 10);
        REQUIRE(!self.sync_series.empty());
        CHECK(self.sync_series.back() == SyncSample{SimTime{1000}, SimTime{1000}});
        CHECK(self.last_activity == SimTime{1000});
    }

    SECTION("an instance that received a row at t=500 and nothing since reports 500") {
        ScenarioConfig cfg;
        cfg.nodes = 1;
        cfg.interpreters_per_node = 2;
        cfg.workload.total_rows = 3;
        cfg.workload.placement = {PlacementKind::SingleHot, 1.0, 1.0};
        cfg.workload.cost = {CostDistKind::Constant, 250};
        cfg.strategy.kind = StrategyKind::StaticRoundRobin;
        cfg.policy.kind = PolicyKind::NeverDistribute;
        cfg.batch.max_rows = 1;
        cfg.network.per_row_overhead = SimTime{250};
        bool checked = false;
        Simulation sim(cfg, [&](const SiblingSnapshot& snap) {
            if (snap.now == SimTime{500}) {
                checked = true;
                CHECK(snap.record_of(InstanceId{0, 1}).last_activity == SimTime{500});
                CHECK(snap.record_of(InstanceId{0, 1}).row_count == 0);
            }
        });
        sim.run();
        CHECK(checked);
    }
}

TEST_CASE("distribute-late detects a hot instance and commits to distributing") {
    ScenarioConfig cfg;
    cfg.nodes = 1;
    cfg.interpreters_per_node = 4;
    cfg.workload.total_rows = 400;
    cfg.workload.placement = {PlacementKind::SingleHot, 1.0, 1.0};
    cfg.workload.cost = {CostDistKind::Constant, 20};
    cfg.policy.kind = PolicyKind::DistributeLate;
    cfg.policy.guard_enabled = false;
    cfg.batch.max_rows = 10;
    cfg.seed = 3;

    const RunReport late = run_scenario(cfg);
    const RunReport never =
        run_scenario(with_policy(cfg, PolicyKind::NeverDistribute, StrategyKind::Adaptive));

    CHECK(never.makespan == SimTime{400 * 20});
    CHECK(late.makespan < never.makespan);
    CHECK(late.rows_redistributed_total > 0);

    // The hot link walks deciding -> draining -> distributed, in order.
    std::vector<LinkState> walked;
    for (const auto& tr : late.transition_log) {
        if (tr.instance == InstanceId{0, 0}) {
            walked.push_back(tr.to);
        }
    }
    REQUIRE(walked.size() == 2);
    CHECK(walked[0] == LinkState::DrainingToDistributed);
    CHECK(walked[1] == LinkState::TerminalDistributed);
    for (std::size_t i = 1; i < late.transition_log.size(); ++i) {
        CHECK(late.transition_log[i - 1].at <= late.transition_log[i].at);
    }
}

TEST_CASE("the density guard shuts eager redistribution off for heavy rows") {
    ScenarioConfig cfg;
    cfg.nodes = 1;
    cfg.interpreters_per_node = 4;
    cfg.workload = heavy_row_preset(500, 1);
    cfg.workload.total_rows = 12;
    cfg.policy.kind = PolicyKind::DistributeEarly;
    cfg.network.per_row_overhead = SimTime{1};

    const RunReport guarded = run_scenario(cfg);
    CHECK(guarded.bytes_redistributed_total == 0);
    bool disabled = false;
    for (const auto& tr : guarded.transition_log) {
        disabled = disabled || tr.to == LinkState::TerminalDisabled;
    }
    CHECK(disabled);

    SECTION("with the guard off the same scenario ships bytes") {
        cfg.policy.guard_enabled = false;
        const RunReport unguarded = run_scenario(cfg);
        CHECK(unguarded.bytes_redistributed_total > 0);
    }
}

TEST_CASE("conservation and lower bounds hold across random scenarios") {
    SplitMix64 rng(606);
    for (int trial = 0; trial < 40; ++trial) {
        ScenarioConfig cfg;
        cfg.nodes = 1 + static_cast<int>(rng.next_below(3));
        cfg.interpreters_per_node = 1 + static_cast<int>(rng.next_below(3));
        cfg.workload.total_rows = rng.next_below(300);
        const int kind = static_cast<int>(rng.next_below(3));
        if (kind == 1) {
            cfg.workload.placement = {PlacementKind::SingleHot, 0.1 + 0.9 * rng.next_unit(), 1.0};
        } else if (kind == 2) {
            cfg.workload.placement = {PlacementKind::Zipf, 1.0, 0.2 + 1.5 * rng.next_unit()};
        }
        cfg.workload.cost = {CostDistKind::Uniform, 0, 1, 40};
        cfg.policy.kind = static_cast<PolicyKind>(rng.next_below(3));
        cfg.policy.guard_enabled = rng.next_below(2) == 0;
        cfg.policy.self_skip = rng.next_below(4) == 0;
        cfg.batch.max_rows = 1 + static_cast<int>(rng.next_below(64));
        cfg.network.per_row_overhead = SimTime{static_cast<std::int64_t>(rng.next_below(3))};
        cfg.seed = rng.next();

        const RunReport report = run_scenario(cfg);
        const auto generated = generate(resolved(cfg).workload, cfg.instance_count());
        std::uint64_t processed = 0;
        std::int64_t total_work = 0;
        for (std::size_t i = 0; i < report.instances.size(); ++i) {
            const auto& rec = report.instances[i];
            processed += rec.rows_processed;
            total_work += rec.sync_time_total.ms;
            CHECK(rec.idle_time_total.ms >= 0);
            // an instance can only send rows it routed, i.e. rows it produced
            CHECK(rec.rows_sent_remote <= generated[i].size());
        }
        CHECK(processed == cfg.workload.total_rows);
        const auto n = static_cast<std::int64_t>(report.instances.size());
        CHECK(report.makespan.ms >= (total_work + n - 1) / n);
        if (cfg.policy.kind == PolicyKind::NeverDistribute &&
            cfg.strategy.kind == StrategyKind::Adaptive) {
            CHECK(report.bytes_redistributed_total == 0);
        }
    }
}

TEST_CASE("identical scenarios observe identical snapshots at identical times") {
    ScenarioConfig cfg;
    cfg.nodes = 2;
    cfg.interpreters_per_node = 2;
    cfg.workload.total_rows = 200;
    cfg.workload.placement = {PlacementKind::Zipf, 1.0, 1.1};
    cfg.workload.cost = {CostDistKind::Uniform, 0, 5, 50};
    cfg.policy.kind = PolicyKind::DistributeLate;
    cfg.batch.max_rows = 16;
    cfg.seed = 99;

    const auto digest = [&]() {
        std::vector<std::string> out;
        Simulation sim(cfg, [&](const SiblingSnapshot& snap) {
            std::string line = std::to_string(snap.now.ms) + "@" + to_string(snap.self_id);
            for (const auto& rec : snap.records) {
                line += "|" + std::to_string(rec.row_count) + ":" +
                        std::to_string(rec.last_activity.ms) + ":" +
                        std::to_string(rec.sync_series.size());
            }
            out.push_back(std::move(line));
        });
        sim.run();
        return out;
    };
    CHECK(digest() == digest());
}

TEST_CASE("free redistribution never hurts: early <= late <= never") {
    SplitMix64 rng(808);
    for (int trial = 0; trial < 20; ++trial) {
        ScenarioConfig cfg;
        cfg.nodes = 1 + static_cast<int>(rng.next_below(4));
        cfg.interpreters_per_node = 1 + static_cast<int>(rng.next_below(4));
        cfg.workload.total_rows = rng.next_below(600);
        const int kind = static_cast<int>(rng.next_below(3));
        if (kind == 1) {
            cfg.workload.placement = {PlacementKind::SingleHot, 0.25 + 0.75 * rng.next_unit(), 1.0};
        } else if (kind == 2) {
            cfg.workload.placement = {PlacementKind::Zipf, 1.0, 0.5 + 1.5 * rng.next_unit()};
        }
        cfg.workload.cost = {CostDistKind::Constant,
                             static_cast<std::int64_t>(10 + rng.next_below(100))};
        cfg.policy.guard_enabled = false;
        cfg.batch.max_rows = 8 + static_cast<int>(rng.next_below(57));
        cfg.seed = rng.next();

        const auto never =
            run_scenario(with_policy(cfg, PolicyKind::NeverDistribute, StrategyKind::Adaptive));
        const auto late =
            run_scenario(with_policy(cfg, PolicyKind::DistributeLate, StrategyKind::Adaptive));
        const auto early =
            run_scenario(with_policy(cfg, PolicyKind::DistributeEarly, StrategyKind::Adaptive));
        CHECK(early.makespan <= late.makespan);
        CHECK(late.makespan <= never.makespan);
    }
}

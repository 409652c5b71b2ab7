#include "dyskew/experiment.hpp"
#include "dyskew/report.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace dyskew;

namespace {

ScenarioConfig motivating_config() {
    ScenarioConfig cfg;
    cfg.nodes = 1;
    cfg.interpreters_per_node = 4;
    cfg.workload.total_rows = 4;
    cfg.workload.placement = {PlacementKind::SingleHot, 1.0, 1.0};
    cfg.workload.cost = {CostDistKind::Constant, 60000};
    cfg.workload.payload.bytes = 100;
    cfg.policy.guard_enabled = false;
    cfg.seed = 7;
    return cfg;
}

ScenarioConfig skewed_config() {
    ScenarioConfig cfg;
    cfg.nodes = 2;
    cfg.interpreters_per_node = 2;
    cfg.workload.total_rows = 300;
    cfg.workload.placement = {PlacementKind::Zipf, 1.0, 1.4};
    cfg.workload.cost = {CostDistKind::Constant, 25};
    cfg.policy.kind = PolicyKind::DistributeLate;
    cfg.policy.guard_enabled = false;
    cfg.batch.max_rows = 16;
    cfg.seed = 21;
    return cfg;
}

} // namespace

TEST_CASE("run reports round-trip through JSON exactly") {
    const RunReport report = run_scenario(skewed_config());
    const std::string text = report_to_json_text(report);
    const RunReport parsed = report_from_json_text(text);
    CHECK(report_to_json_text(parsed) == text);
    CHECK(parsed.makespan == report.makespan);
    CHECK(parsed.instances == report.instances);
    CHECK(parsed.transition_log == report.transition_log);
}

TEST_CASE("identical scenarios serialize to byte-identical reports") {
    const std::string first = report_to_json_text(run_scenario(skewed_config()));
    const std::string second = report_to_json_text(run_scenario(skewed_config()));
    CHECK(first == second);
}

TEST_CASE("instance metrics round-trip through CSV") {
    const RunReport report = run_scenario(skewed_config());
    const std::string csv = report_to_csv(report);
    CHECK(instance_metrics_from_csv(csv) == report.instances);
}

TEST_CASE("a report embeds a re-runnable config") {
    const RunReport report = run_scenario(skewed_config());
    const auto parsed = report_from_json_text(report_to_json_text(report));
    const RunReport rerun = run_scenario(parsed.config_echo);
    CHECK(report_to_json_text(rerun) == report_to_json_text(report));
}

TEST_CASE("compare runs the same workload under every mode") {
    const CompareResult result =
        run_compare(motivating_config(), {"never", "static_rr", "early"});
    REQUIRE(result.entries.size() == 3);
    CHECK(result.baseline == "never");
    CHECK(result.entries[0].report.makespan == SimTime{240000});
    CHECK(result.entries[1].report.makespan == SimTime{60000});
    CHECK(result.entries[2].report.makespan == SimTime{60000});
    CHECK(result.entries[0].improvement_pct == 0.0);
    CHECK(result.entries[1].improvement_pct == 75.0);
    CHECK(result.entries[2].improvement_pct == 75.0);

    SECTION("a single policy is a usage error") {
        CHECK_THROWS_AS(run_compare(motivating_config(), {"never"}), ValidationError);
    }

    SECTION("an unknown policy lists the valid names") {
        try {
            run_compare(motivating_config(), {"never", "sometimes"});
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("static_rr") != std::string::npos);
        }
    }

    SECTION("the CSV rendering parses back") {
        const std::string csv = compare_to_csv(result);
        CHECK(csv.find("never,240000") != std::string::npos);
        CHECK(csv.find("early,60000") != std::string::npos);
    }
}

TEST_CASE("sweep emits one row per node count and mode") {
    const SweepResult result = run_sweep(skewed_config(), {2, 4});
    REQUIRE(result.entries.size() == 6); // never, static_rr, late at each count
    CHECK(result.entries[0].nodes == 2);
    CHECK(result.entries[0].mode == "never");
    CHECK(result.entries[3].nodes == 4);
    for (const auto& entry : result.entries) {
        if (entry.mode == "never") {
            CHECK(entry.improvement_vs_never_pct == 0.0);
        }
    }

    SECTION("sweep CSV round-trips") {
        const std::string csv = sweep_to_csv(result);
        CHECK(sweep_entries_from_csv(csv) == result.entries);
    }

    SECTION("a single count degenerates to a comparison") {
        const SweepResult one = run_sweep(skewed_config(), {4});
        CHECK(one.entries.size() == 3);
    }

    SECTION("empty or invalid node counts are rejected") {
        CHECK_THROWS_AS(run_sweep(skewed_config(), {}), ValidationError);
        CHECK_THROWS_AS(run_sweep(skewed_config(), {0}), ValidationError);
    }
}

TEST_CASE("human-readable tables render without blowing up") {
    std::ostringstream out;
    const auto compare = run_compare(motivating_config(), {"never", "early"});
    print_compare_table(out, compare);
    print_run_summary(out, compare.entries[0].report);
    print_sweep_table(out, run_sweep(skewed_config(), {2}));
    CHECK(out.str().find("makespan") != std::string::npos);
    CHECK(out.str().find("never") != std::string::npos);
}

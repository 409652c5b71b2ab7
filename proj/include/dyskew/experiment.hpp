#pragma once

#include "dyskew/config.hpp"
#include "dyskew/report.hpp"
#include "dyskew/simulator.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace dyskew {

// Stable exit-code contract for CI.
inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 1;
inline constexpr int exit_io = 2;
inline constexpr int exit_internal = 3;

// Execution modes comparable against each other. A mode fixes the policy and
// strategy fields of the scenario; everything else (workload, network, seed)
// stays as configured, so comparisons are apples to apples.
inline const std::vector<std::string>& valid_modes() {
    static const std::vector<std::string> modes = {"never", "late", "early", "static_rr"};
    return modes;
}

inline ScenarioConfig apply_mode(ScenarioConfig cfg, const std::string& mode) {
    if (mode == "never" || mode == "never_distribute") {
        cfg.policy.kind = PolicyKind::NeverDistribute;
        cfg.strategy.kind = StrategyKind::Adaptive;
    } else if (mode == "late" || mode == "distribute_late") {
        cfg.policy.kind = PolicyKind::DistributeLate;
        cfg.strategy.kind = StrategyKind::Adaptive;
    } else if (mode == "early" || mode == "eager" || mode == "distribute_early") {
        cfg.policy.kind = PolicyKind::DistributeEarly;
        cfg.strategy.kind = StrategyKind::Adaptive;
    } else if (mode == "static_rr" || mode == "static_round_robin") {
        cfg.policy.kind = PolicyKind::NeverDistribute;
        cfg.strategy.kind = StrategyKind::StaticRoundRobin;
    } else {
        std::string valid;
        for (const auto& m : valid_modes()) {
            if (!valid.empty()) {
                valid += ", ";
            }
            valid += m;
        }
        throw ValidationError({"unknown policy '" + mode + "' (valid: " + valid + ")"});
    }
    return cfg;
}

inline std::string mode_of_policy(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::NeverDistribute: return "never";
    case PolicyKind::DistributeLate: return "late";
    case PolicyKind::DistributeEarly: return "early";
    }
    return "never";
}

inline double average_utilization(const RunReport& report) {
    if (report.makespan.ms <= 0 || report.instances.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& rec : report.instances) {
        sum += static_cast<double>(rec.sync_time_total.ms) /
               static_cast<double>(report.makespan.ms);
    }
    return sum / static_cast<double>(report.instances.size());
}

inline double improvement_pct(SimTime baseline, SimTime other) {
    if (baseline.ms == 0) {
        return 0.0;
    }
    return 100.0 * static_cast<double>(baseline.ms - other.ms) /
           static_cast<double>(baseline.ms);
}

struct CompareEntry {
    std::string mode;
    RunReport report;
    double avg_utilization = 0.0;
    double improvement_pct = 0.0; // relative to the first listed mode
};

struct CompareResult {
    std::string baseline;
    std::vector<CompareEntry> entries;
};

// Runs the same workload (same seed) under each mode. The first mode is the
// baseline for the improvement column.
inline CompareResult run_compare(const ScenarioConfig& cfg, const std::vector<std::string>& modes) {
    if (modes.size() < 2) {
        throw ValidationError({"compare needs at least two policies"});
    }
    CompareResult result;
    result.baseline = modes.front();
    for (const auto& mode : modes) {
        CompareEntry entry;
        entry.mode = mode;
        entry.report = run_scenario(apply_mode(cfg, mode));
        entry.avg_utilization = average_utilization(entry.report);
        result.entries.push_back(std::move(entry));
    }
    const SimTime base = result.entries.front().report.makespan;
    for (auto& entry : result.entries) {
        entry.improvement_pct = improvement_pct(base, entry.report.makespan);
    }
    return result;
}

struct SweepEntry {
    int nodes = 0;
    std::string mode;
    SimTime makespan{0};
    std::uint64_t rows_redistributed = 0;
    std::uint64_t bytes_redistributed = 0;
    double avg_utilization = 0.0;
    double improvement_vs_never_pct = 0.0;

    friend bool operator==(const SweepEntry&, const SweepEntry&) = default;
};

struct SweepResult {
    std::vector<int> node_counts;
    std::vector<SweepEntry> entries; // ordered by (node count, mode list order)
};

// Re-runs the configured workload at each node count (workload regenerated
// per count from the same seed) under the static baselines and the
// configured adaptive policy.
inline SweepResult run_sweep(const ScenarioConfig& cfg, const std::vector<int>& node_counts) {
    if (node_counts.empty()) {
        throw ValidationError({"sweep needs at least one node count"});
    }
    for (int n : node_counts) {
        if (n < 1) {
            throw ValidationError({"sweep node counts must be >= 1"});
        }
    }
    SweepResult result;
    result.node_counts = node_counts;
    const std::string adaptive_mode = mode_of_policy(cfg.policy.kind);
    std::vector<std::string> modes = {"never", "static_rr"};
    if (adaptive_mode != "never") {
        modes.push_back(adaptive_mode);
    }
    for (int nodes : node_counts) {
        ScenarioConfig at_count = cfg;
        at_count.nodes = nodes;
        at_count.load_factors.clear(); // re-resolve for the new instance count
        SimTime never_makespan{0};
        for (const auto& mode : modes) {
            const RunReport report = run_scenario(apply_mode(at_count, mode));
            if (mode == "never") {
                never_makespan = report.makespan;
            }
            SweepEntry entry;
            entry.nodes = nodes;
            entry.mode = mode;
            entry.makespan = report.makespan;
            entry.rows_redistributed = report.rows_redistributed_total;
            entry.bytes_redistributed = report.bytes_redistributed_total;
            entry.avg_utilization = average_utilization(report);
            entry.improvement_vs_never_pct = improvement_pct(never_makespan, report.makespan);
            result.entries.push_back(std::move(entry));
        }
    }
    return result;
}

// --- serialization of experiment results ---

inline ordered_json compare_to_json(const CompareResult& result) {
    ordered_json out;
    out["baseline"] = result.baseline;
    out["entries"] = ordered_json::array();
    for (const auto& entry : result.entries) {
        out["entries"].push_back(ordered_json{{"mode", entry.mode},
                                              {"makespan_ms", entry.report.makespan.ms},
                                              {"rows_redistributed",
                                               entry.report.rows_redistributed_total},
                                              {"bytes_redistributed",
                                               entry.report.bytes_redistributed_total},
                                              {"avg_utilization", entry.avg_utilization},
                                              {"improvement_pct", entry.improvement_pct},
                                              {"report", report_to_json(entry.report)}});
    }
    return out;
}

inline std::string compare_to_csv(const CompareResult& result) {
    std::ostringstream out;
    out << "mode,makespan_ms,rows_redistributed,bytes_redistributed,avg_utilization,"
           "improvement_pct\n";
    for (const auto& entry : result.entries) {
        out << entry.mode << ',' << entry.report.makespan.ms << ','
            << entry.report.rows_redistributed_total << ','
            << entry.report.bytes_redistributed_total << ','
            << detail::format_double(entry.avg_utilization) << ','
            << detail::format_double(entry.improvement_pct) << '\n';
    }
    return out.str();
}

inline ordered_json sweep_to_json(const SweepResult& result) {
    ordered_json out;
    out["node_counts"] = result.node_counts;
    out["entries"] = ordered_json::array();
    for (const auto& entry : result.entries) {
        out["entries"].push_back(
            ordered_json{{"node_count", entry.nodes},
                         {"mode", entry.mode},
                         {"makespan_ms", entry.makespan.ms},
                         {"rows_redistributed", entry.rows_redistributed},
                         {"bytes_redistributed", entry.bytes_redistributed},
                         {"avg_utilization", entry.avg_utilization},
                         {"improvement_vs_never_pct", entry.improvement_vs_never_pct}});
    }
    return out;
}

inline std::string sweep_to_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "node_count,mode,makespan_ms,rows_redistributed,bytes_redistributed,avg_utilization,"
           "improvement_vs_never_pct\n";
    for (const auto& entry : result.entries) {
        out << entry.nodes << ',' << entry.mode << ',' << entry.makespan.ms << ','
            << entry.rows_redistributed << ',' << entry.bytes_redistributed << ','
            << detail::format_double(entry.avg_utilization) << ','
            << detail::format_double(entry.improvement_vs_never_pct) << '\n';
    }
    return out.str();
}

inline std::vector<SweepEntry> sweep_entries_from_csv(const std::string& text) {
    std::vector<SweepEntry> out;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string field;
        SweepEntry entry;
        std::getline(fields, field, ',');
        entry.nodes = std::stoi(field);
        std::getline(fields, entry.mode, ',');
        std::getline(fields, field, ',');
        entry.makespan = SimTime{std::stoll(field)};
        std::getline(fields, field, ',');
        entry.rows_redistributed = std::stoull(field);
        std::getline(fields, field, ',');
        entry.bytes_redistributed = std::stoull(field);
        std::getline(fields, field, ',');
        entry.avg_utilization = std::stod(field);
        std::getline(fields, field, ',');
        entry.improvement_vs_never_pct = std::stod(field);
        out.push_back(std::move(entry));
    }
    return out;
}

// --- human-readable tables ---

inline void print_run_summary(std::ostream& out, const RunReport& report) {
    out << "makespan_ms=" << report.makespan.ms
        << " rows_redistributed=" << report.rows_redistributed_total
        << " bytes_redistributed=" << report.bytes_redistributed_total
        << " transitions=" << report.transition_log.size() << "\n";
    out << std::left << std::setw(10) << "instance" << std::right << std::setw(10) << "rows"
        << std::setw(12) << "sync_ms" << std::setw(12) << "idle_ms" << std::setw(12) << "sent"
        << std::setw(16) << "sent_bytes" << "\n";
    for (const auto& rec : report.instances) {
        out << std::left << std::setw(10) << to_string(rec.instance) << std::right << std::setw(10)
            << rec.rows_processed << std::setw(12) << rec.sync_time_total.ms << std::setw(12)
            << rec.idle_time_total.ms << std::setw(12) << rec.rows_sent_remote << std::setw(16)
            << rec.bytes_sent_remote << "\n";
    }
}

inline void print_compare_table(std::ostream& out, const CompareResult& result) {
    out << std::left << std::setw(12) << "mode" << std::right << std::setw(14) << "makespan_ms"
        << std::setw(12) << "rows_sent" << std::setw(18) << "bytes_sent" << std::setw(14)
        << "utilization" << std::setw(14) << "improve_%" << "\n";
    for (const auto& entry : result.entries) {
        std::ostringstream util, impr;
        util << std::fixed << std::setprecision(3) << entry.avg_utilization;
        impr << std::fixed << std::setprecision(2) << entry.improvement_pct;
        out << std::left << std::setw(12) << entry.mode << std::right << std::setw(14)
            << entry.report.makespan.ms << std::setw(12) << entry.report.rows_redistributed_total
            << std::setw(18) << entry.report.bytes_redistributed_total << std::setw(14)
            << util.str() << std::setw(14) << impr.str() << "\n";
    }
    out << "(improvement is relative to baseline '" << result.baseline << "')\n";
}

inline void print_sweep_table(std::ostream& out, const SweepResult& result) {
    out << std::left << std::setw(8) << "nodes" << std::setw(12) << "mode" << std::right
        << std::setw(14) << "makespan_ms" << std::setw(18) << "bytes_sent" << std::setw(20)
        << "improve_vs_never" << "\n";
    for (const auto& entry : result.entries) {
        std::ostringstream impr;
        impr << std::fixed << std::setprecision(2) << entry.improvement_vs_never_pct;
        out << std::left << std::setw(8) << entry.nodes << std::setw(12) << entry.mode
            << std::right << std::setw(14) << entry.makespan.ms << std::setw(18)
            << entry.bytes_redistributed << std::setw(20) << impr.str() << "\n";
    }
}

// --- command layer (shared by the CLI binary and the tests) ---

struct CliOptions {
    std::string config_path;
    std::string out_path;
    std::string format = "json"; // json | csv
    std::vector<std::string> policies;
    std::vector<int> node_counts;
    std::optional<std::uint64_t> seed; // --seed flag
};

namespace detail {

// Whole-file write: nothing is left behind when the path is unwritable.
inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open output file: " + path);
    }
    out << content;
    out.flush();
    if (!out) {
        out.close();
        std::remove(path.c_str());
        throw IoError("failed writing output file: " + path);
    }
}

// Seed precedence: --seed flag, then DYSKEW_SEED, then the config file.
inline ScenarioConfig apply_seed_override(ScenarioConfig cfg, std::optional<std::uint64_t> flag) {
    if (flag.has_value()) {
        cfg.seed = *flag;
        return resolved(cfg);
    }
    if (const char* env = std::getenv("DYSKEW_SEED")) {
        try {
            std::size_t used = 0;
            const std::uint64_t value = std::stoull(env, &used);
            if (used != std::string(env).size()) {
                throw std::invalid_argument(env);
            }
            cfg.seed = value;
        } catch (const std::exception&) {
            throw ValidationError({"DYSKEW_SEED must be an unsigned integer, got '" +
                                   std::string(env) + "'"});
        }
        return resolved(cfg);
    }
    return cfg;
}

inline int to_exit_code(const std::exception& e, std::ostream& err) {
    err << "error: " << e.what() << "\n";
    if (dynamic_cast<const IoError*>(&e) != nullptr) {
        return exit_io;
    }
    if (dynamic_cast<const ValidationError*>(&e) != nullptr ||
        dynamic_cast<const ParseError*>(&e) != nullptr ||
        dynamic_cast<const ContractViolation*>(&e) != nullptr) {
        return exit_validation;
    }
    return exit_internal;
}

inline void check_format(const std::string& format) {
    if (format != "json" && format != "csv") {
        throw ValidationError({"--format must be json or csv, got '" + format + "'"});
    }
}

} // namespace detail

inline int cmd_run(const CliOptions& opts, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    try {
        detail::check_format(opts.format);
        const ScenarioConfig cfg =
            detail::apply_seed_override(load_config(opts.config_path), opts.seed);
        const RunReport report = run_scenario(cfg);
        if (!opts.out_path.empty()) {
            detail::write_file(opts.out_path, opts.format == "csv"
                                                  ? report_to_csv(report)
                                                  : report_to_json_text(report));
        }
        print_run_summary(out, report);
        return exit_ok;
    } catch (const std::exception& e) {
        return detail::to_exit_code(e, err);
    }
}

inline int cmd_compare(const CliOptions& opts, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
    try {
        detail::check_format(opts.format);
        const ScenarioConfig cfg =
            detail::apply_seed_override(load_config(opts.config_path), opts.seed);
        const CompareResult result = run_compare(cfg, opts.policies);
        if (!opts.out_path.empty()) {
            detail::write_file(opts.out_path, opts.format == "csv"
                                                  ? compare_to_csv(result)
                                                  : compare_to_json(result).dump(2) + "\n");
        }
        print_compare_table(out, result);
        return exit_ok;
    } catch (const std::exception& e) {
        return detail::to_exit_code(e, err);
    }
}

inline int cmd_sweep(const CliOptions& opts, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr) {
    try {
        detail::check_format(opts.format);
        const ScenarioConfig cfg =
            detail::apply_seed_override(load_config(opts.config_path), opts.seed);
        const SweepResult result = run_sweep(cfg, opts.node_counts);
        if (!opts.out_path.empty()) {
            detail::write_file(opts.out_path, opts.format == "csv"
                                                  ? sweep_to_csv(result)
                                                  : sweep_to_json(result).dump(2) + "\n");
        }
        print_sweep_table(out, result);
        return exit_ok;
    } catch (const std::exception& e) {
        return detail::to_exit_code(e, err);
    }
}

} // namespace dyskew

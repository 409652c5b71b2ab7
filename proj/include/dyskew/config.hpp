#pragma once

#include "dyskew/core.hpp"
#include "dyskew/network.hpp"
#include "dyskew/routing.hpp"
#include "dyskew/skew_models.hpp"
#include "dyskew/state_machine.hpp"
#include "dyskew/workload.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace dyskew {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// All config/CLI failures funnel into one of these; the CLI maps them to its
// exit-code contract (0 ok, 1 validation, 2 I/O, 3 internal).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string msg = "configuration invalid:";
        for (const auto& issue : issues) {
            msg += "\n  - " + issue;
        }
        return msg;
    }
    std::vector<std::string> issues_;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModelConfig {
    ModelChoice choice = ModelChoice::IdleTime;
    ModelParams params;
};

constexpr std::string_view to_string(ModelChoice c) {
    switch (c) {
    case ModelChoice::RowPercentage: return "row_percentage";
    case ModelChoice::IdleTime: return "idle_time";
    case ModelChoice::SyncSlope: return "sync_slope";
    }
    return "unknown";
}

// Full declarative description of one simulated run. `seed` is authoritative;
// resolve() mirrors it into the workload and copies the policy's self_skip
// into the routing strategy so the two layers cannot drift apart.
struct ScenarioConfig {
    int nodes = 1;
    int interpreters_per_node = 1;
    WorkloadSpec workload;
    RedistributionPolicy policy;
    RoutingStrategy strategy;
    ModelConfig model;
    NetworkModel network;
    BatchLimits batch;
    std::vector<double> load_factors; // empty = all 1.0; else one per instance
    std::uint64_t seed = 0;

    int instance_count() const { return nodes * interpreters_per_node; }

    std::vector<InstanceId> instance_ids() const {
        std::vector<InstanceId> ids;
        ids.reserve(static_cast<std::size_t>(instance_count()));
        for (int n = 0; n < nodes; ++n) {
            for (int i = 0; i < interpreters_per_node; ++i) {
                ids.push_back(InstanceId{n, i});
            }
        }
        return ids;
    }

    std::vector<std::string> validate() const {
        std::vector<std::string> issues;
        if (nodes < 1) {
            issues.push_back("nodes must be >= 1");
        }
        if (interpreters_per_node < 1) {
            issues.push_back("interpreters_per_node must be >= 1");
        }
        for (auto& issue : workload.validate()) {
            issues.push_back("workload." + issue);
        }
        for (auto& issue : model.params.validate()) {
            issues.push_back("model.params." + issue);
        }
        for (auto& issue : network.validate()) {
            issues.push_back(issue);
        }
        if (batch.max_rows < 1) {
            issues.push_back("batch.max_rows must be >= 1");
        }
        if (batch.max_bytes < 1) {
            issues.push_back("batch.max_bytes must be >= 1");
        }
        if (!load_factors.empty()) {
            if (nodes >= 1 && interpreters_per_node >= 1 &&
                load_factors.size() != static_cast<std::size_t>(instance_count())) {
                issues.push_back("load_factors must have one entry per instance (" +
                                 std::to_string(instance_count()) + ")");
            }
            for (double f : load_factors) {
                if (!(f > 0.0)) {
                    issues.push_back("load_factors entries must be > 0");
                    break;
                }
            }
        }
        return issues;
    }
};

inline ScenarioConfig resolved(ScenarioConfig cfg) {
    auto issues = cfg.validate();
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    cfg.workload.seed = cfg.seed;
    cfg.strategy.self_skip = cfg.policy.self_skip;
    if (cfg.load_factors.empty()) {
        cfg.load_factors.assign(static_cast<std::size_t>(cfg.instance_count()), 1.0);
    }
    return cfg;
}

namespace detail {

// Collects unknown keys so a typo like "polcy" fails loudly instead of
// silently running with defaults.
inline void check_keys(const json& obj, std::string_view where,
                       std::initializer_list<std::string_view> allowed,
                       std::vector<std::string>& issues) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (auto key : allowed) {
            if (it.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            issues.push_back(std::string(where) + ": unknown key '" + it.key() + "'");
        }
    }
}

template <typename T>
void read_field(const json& obj, std::string_view where, std::string_view key, T& out,
                std::vector<std::string>& issues) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        return;
    }
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        issues.push_back(std::string(where) + "." + std::string(key) + ": wrong type");
    }
}

inline bool parse_enum(const std::string& text, std::string_view where, std::string_view key,
                       std::initializer_list<std::pair<std::string_view, int>> values, int& out,
                       std::vector<std::string>& issues) {
    for (const auto& [name, value] : values) {
        if (text == name) {
            out = value;
            return true;
        }
    }
    std::string valid;
    for (const auto& [name, value] : values) {
        if (!valid.empty()) {
            valid += ", ";
        }
        valid += name;
    }
    issues.push_back(std::string(where) + "." + std::string(key) + ": unknown value '" + text +
                     "' (valid: " + valid + ")");
    return false;
}

} // namespace detail

// Parses a config object. Unknown keys, type mismatches and out-of-range
// values are all collected and reported together.
inline ScenarioConfig config_from_json(const json& root) {
    using detail::check_keys;
    using detail::parse_enum;
    using detail::read_field;

    std::vector<std::string> issues;
    if (!root.is_object()) {
        throw ValidationError({"top-level config must be a JSON object"});
    }
    check_keys(root, "config",
               {"nodes", "interpreters_per_node", "seed", "workload", "policy", "strategy",
                "model", "network", "batch", "load_factors"},
               issues);

    ScenarioConfig cfg;
    read_field(root, "config", "nodes", cfg.nodes, issues);
    read_field(root, "config", "interpreters_per_node", cfg.interpreters_per_node, issues);
    read_field(root, "config", "seed", cfg.seed, issues);
    read_field(root, "config", "load_factors", cfg.load_factors, issues);

    if (auto it = root.find("workload"); it != root.end() && it->is_object()) {
        const json& w = *it;
        check_keys(w, "workload", {"total_rows", "placement", "cost", "payload"}, issues);
        read_field(w, "workload", "total_rows", cfg.workload.total_rows, issues);
        if (auto p = w.find("placement"); p != w.end() && p->is_object()) {
            check_keys(*p, "workload.placement", {"kind", "fraction", "exponent"}, issues);
            std::string kind = "uniform";
            read_field(*p, "workload.placement", "kind", kind, issues);
            int value = 0;
            if (parse_enum(kind, "workload.placement", "kind",
                           {{"uniform", 0}, {"single_hot", 1}, {"zipf", 2}}, value, issues)) {
                cfg.workload.placement.kind = static_cast<PlacementKind>(value);
            }
            read_field(*p, "workload.placement", "fraction", cfg.workload.placement.hot_fraction,
                       issues);
            read_field(*p, "workload.placement", "exponent", cfg.workload.placement.zipf_exponent,
                       issues);
        }
        if (auto c = w.find("cost"); c != w.end() && c->is_object()) {
            check_keys(*c, "workload.cost",
                       {"kind", "value_ms", "lo_ms", "hi_ms", "low_ms", "high_ms", "p_high"},
                       issues);
            std::string kind = "constant";
            read_field(*c, "workload.cost", "kind", kind, issues);
            int value = 0;
            if (parse_enum(kind, "workload.cost", "kind",
                           {{"constant", 0}, {"uniform", 1}, {"bimodal", 2}}, value, issues)) {
                cfg.workload.cost.kind = static_cast<CostDistKind>(value);
            }
            read_field(*c, "workload.cost", "value_ms", cfg.workload.cost.value_ms, issues);
            read_field(*c, "workload.cost", "lo_ms", cfg.workload.cost.lo_ms, issues);
            read_field(*c, "workload.cost", "hi_ms", cfg.workload.cost.hi_ms, issues);
            read_field(*c, "workload.cost", "low_ms", cfg.workload.cost.low_ms, issues);
            read_field(*c, "workload.cost", "high_ms", cfg.workload.cost.high_ms, issues);
            read_field(*c, "workload.cost", "p_high", cfg.workload.cost.p_high, issues);
        }
        if (auto p = w.find("payload"); p != w.end() && p->is_object()) {
            check_keys(*p, "workload.payload", {"kind", "bytes", "low_bytes", "high_bytes", "p_high"},
                       issues);
            std::string kind = "constant";
            read_field(*p, "workload.payload", "kind", kind, issues);
            int value = 0;
            if (parse_enum(kind, "workload.payload", "kind", {{"constant", 0}, {"bimodal", 1}},
                           value, issues)) {
                cfg.workload.payload.kind = static_cast<PayloadDistKind>(value);
            }
            read_field(*p, "workload.payload", "bytes", cfg.workload.payload.bytes, issues);
            read_field(*p, "workload.payload", "low_bytes", cfg.workload.payload.low_bytes, issues);
            read_field(*p, "workload.payload", "high_bytes", cfg.workload.payload.high_bytes,
                       issues);
            read_field(*p, "workload.payload", "p_high", cfg.workload.payload.p_high, issues);
        }
    } else {
        issues.push_back("workload: required section missing");
    }

    if (auto it = root.find("policy"); it != root.end() && it->is_object()) {
        check_keys(*it, "policy", {"kind", "self_skip", "guard_enabled"}, issues);
        std::string kind = "late";
        read_field(*it, "policy", "kind", kind, issues);
        int value = 0;
        if (parse_enum(kind, "policy", "kind",
                       {{"never", 0},
                        {"never_distribute", 0},
                        {"late", 1},
                        {"distribute_late", 1},
                        {"early", 2},
                        {"eager", 2},
                        {"distribute_early", 2}},
                       value, issues)) {
            cfg.policy.kind = static_cast<PolicyKind>(value);
        }
        read_field(*it, "policy", "self_skip", cfg.policy.self_skip, issues);
        read_field(*it, "policy", "guard_enabled", cfg.policy.guard_enabled, issues);
    }

    if (auto it = root.find("strategy"); it != root.end() && it->is_object()) {
        check_keys(*it, "strategy", {"kind", "selector"}, issues);
        std::string kind = "adaptive";
        read_field(*it, "strategy", "kind", kind, issues);
        int value = 0;
        if (parse_enum(kind, "strategy", "kind",
                       {{"local_only", 0}, {"static_round_robin", 1}, {"static_rr", 1},
                        {"adaptive", 2}},
                       value, issues)) {
            cfg.strategy.kind = static_cast<StrategyKind>(value);
        }
        std::string selector = "round_robin";
        read_field(*it, "strategy", "selector", selector, issues);
        if (parse_enum(selector, "strategy", "selector",
                       {{"round_robin", 0}, {"least_loaded", 1}}, value, issues)) {
            cfg.strategy.selector = static_cast<Selector>(value);
        }
    }

    if (auto it = root.find("model"); it != root.end() && it->is_object()) {
        check_keys(*it, "model", {"choice", "params"}, issues);
        std::string choice = "idle_time";
        read_field(*it, "model", "choice", choice, issues);
        int value = 0;
        if (parse_enum(choice, "model", "choice",
                       {{"row_percentage", 0}, {"idle_time", 1}, {"sync_slope", 2}}, value,
                       issues)) {
            cfg.model.choice = static_cast<ModelChoice>(value);
        }
        if (auto p = it->find("params"); p != it->end() && p->is_object()) {
            check_keys(*p, "model.params",
                       {"theta_rows", "theta_slope", "slope_window", "idle_period_ms",
                        "idle_fraction", "strikes_n", "density_threshold"},
                       issues);
            read_field(*p, "model.params", "theta_rows", cfg.model.params.theta_rows, issues);
            read_field(*p, "model.params", "theta_slope", cfg.model.params.theta_slope, issues);
            read_field(*p, "model.params", "slope_window", cfg.model.params.slope_window, issues);
            read_field(*p, "model.params", "idle_period_ms", cfg.model.params.idle_period.ms,
                       issues);
            read_field(*p, "model.params", "idle_fraction", cfg.model.params.idle_fraction, issues);
            read_field(*p, "model.params", "strikes_n", cfg.model.params.strikes_n, issues);
            read_field(*p, "model.params", "density_threshold", cfg.model.params.density_threshold,
                       issues);
        }
    }

    if (auto it = root.find("network"); it != root.end() && it->is_object()) {
        check_keys(*it, "network", {"per_row_overhead_ms", "per_byte_cost"}, issues);
        read_field(*it, "network", "per_row_overhead_ms", cfg.network.per_row_overhead.ms, issues);
        read_field(*it, "network", "per_byte_cost", cfg.network.per_byte_cost, issues);
    }

    if (auto it = root.find("batch"); it != root.end() && it->is_object()) {
        check_keys(*it, "batch", {"max_rows", "max_bytes"}, issues);
        read_field(*it, "batch", "max_rows", cfg.batch.max_rows, issues);
        read_field(*it, "batch", "max_bytes", cfg.batch.max_bytes, issues);
    }

    for (auto& issue : cfg.validate()) {
        issues.push_back(issue);
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return resolved(cfg);
}

// Serializes the fully resolved config (defaults included), so any report
// that embeds it can be re-run as-is. Key order is fixed.
inline ordered_json config_to_json(const ScenarioConfig& cfg) {
    ordered_json placement;
    placement["kind"] = std::string(to_string(cfg.workload.placement.kind));
    if (cfg.workload.placement.kind == PlacementKind::SingleHot) {
        placement["fraction"] = cfg.workload.placement.hot_fraction;
    }
    if (cfg.workload.placement.kind == PlacementKind::Zipf) {
        placement["exponent"] = cfg.workload.placement.zipf_exponent;
    }

    ordered_json cost;
    cost["kind"] = std::string(to_string(cfg.workload.cost.kind));
    switch (cfg.workload.cost.kind) {
    case CostDistKind::Constant:
        cost["value_ms"] = cfg.workload.cost.value_ms;
        break;
    case CostDistKind::Uniform:
        cost["lo_ms"] = cfg.workload.cost.lo_ms;
        cost["hi_ms"] = cfg.workload.cost.hi_ms;
        break;
    case CostDistKind::Bimodal:
        cost["low_ms"] = cfg.workload.cost.low_ms;
        cost["high_ms"] = cfg.workload.cost.high_ms;
        cost["p_high"] = cfg.workload.cost.p_high;
        break;
    }

    ordered_json payload;
    payload["kind"] = std::string(to_string(cfg.workload.payload.kind));
    if (cfg.workload.payload.kind == PayloadDistKind::Constant) {
        payload["bytes"] = cfg.workload.payload.bytes;
    } else {
        payload["low_bytes"] = cfg.workload.payload.low_bytes;
        payload["high_bytes"] = cfg.workload.payload.high_bytes;
        payload["p_high"] = cfg.workload.payload.p_high;
    }

    ordered_json out;
    out["nodes"] = cfg.nodes;
    out["interpreters_per_node"] = cfg.interpreters_per_node;
    out["seed"] = cfg.seed;
    out["workload"] = ordered_json{{"total_rows", cfg.workload.total_rows},
                                   {"placement", placement},
                                   {"cost", cost},
                                   {"payload", payload}};
    out["policy"] = ordered_json{{"kind", std::string(to_string(cfg.policy.kind))},
                                 {"self_skip", cfg.policy.self_skip},
                                 {"guard_enabled", cfg.policy.guard_enabled}};
    out["strategy"] = ordered_json{{"kind", std::string(to_string(cfg.strategy.kind))},
                                   {"selector", std::string(to_string(cfg.strategy.selector))}};
    out["model"] = ordered_json{
        {"choice", std::string(to_string(cfg.model.choice))},
        {"params", ordered_json{{"theta_rows", cfg.model.params.theta_rows},
                                {"theta_slope", cfg.model.params.theta_slope},
                                {"slope_window", cfg.model.params.slope_window},
                                {"idle_period_ms", cfg.model.params.idle_period.ms},
                                {"idle_fraction", cfg.model.params.idle_fraction},
                                {"strikes_n", cfg.model.params.strikes_n},
                                {"density_threshold", cfg.model.params.density_threshold}}}};
    out["network"] = ordered_json{{"per_row_overhead_ms", cfg.network.per_row_overhead.ms},
                                  {"per_byte_cost", cfg.network.per_byte_cost}};
    out["batch"] = ordered_json{{"max_rows", cfg.batch.max_rows},
                                {"max_bytes", cfg.batch.max_bytes}};
    out["load_factors"] = cfg.load_factors;
    return out;
}

namespace detail {

inline std::size_t line_of_offset(const std::string& text, std::size_t byte_offset) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte_offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
        }
    }
    return line;
}

} // namespace detail

inline ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ":" + std::to_string(detail::line_of_offset(text, e.byte)) +
                         ": " + e.what());
    }
    return config_from_json(root);
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

} // namespace dyskew

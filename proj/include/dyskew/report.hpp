#pragma once

#include "dyskew/config.hpp"
#include "dyskew/simulator.hpp"

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace dyskew {

inline LinkState link_state_from_string(const std::string& text) {
    for (LinkState s : all_link_states) {
        if (text == to_string(s)) {
            return s;
        }
    }
    throw ValidationError({"unknown link state '" + text + "'"});
}

// Authoritative structured rendering. Key order is fixed so byte-identical
// reports mean identical runs.
inline ordered_json report_to_json(const RunReport& report) {
    ordered_json out;
    out["makespan_ms"] = report.makespan.ms;
    out["rows_redistributed_total"] = report.rows_redistributed_total;
    out["bytes_redistributed_total"] = report.bytes_redistributed_total;
    out["seed"] = report.seed;
    out["instances"] = ordered_json::array();
    for (const MetricsRecord& rec : report.instances) {
        out["instances"].push_back(ordered_json{{"node", rec.instance.node_index},
                                                {"interpreter", rec.instance.interpreter_index},
                                                {"rows_processed", rec.rows_processed},
                                                {"sync_time_ms", rec.sync_time_total.ms},
                                                {"idle_time_ms", rec.idle_time_total.ms},
                                                {"rows_sent_remote", rec.rows_sent_remote},
                                                {"bytes_sent_remote", rec.bytes_sent_remote}});
    }
    out["transitions"] = ordered_json::array();
    for (const TransitionLogEntry& tr : report.transition_log) {
        out["transitions"].push_back(ordered_json{{"time_ms", tr.at.ms},
                                                  {"node", tr.instance.node_index},
                                                  {"interpreter", tr.instance.interpreter_index},
                                                  {"from", std::string(to_string(tr.from))},
                                                  {"to", std::string(to_string(tr.to))}});
    }
    out["config"] = config_to_json(report.config_echo);
    return out;
}

inline std::string report_to_json_text(const RunReport& report) {
    return report_to_json(report).dump(2) + "\n";
}

inline RunReport report_from_json(const json& root) {
    RunReport report;
    report.makespan = SimTime{root.at("makespan_ms").get<std::int64_t>()};
    report.rows_redistributed_total = root.at("rows_redistributed_total").get<std::uint64_t>();
    report.bytes_redistributed_total = root.at("bytes_redistributed_total").get<std::uint64_t>();
    report.seed = root.at("seed").get<std::uint64_t>();
    for (const auto& item : root.at("instances")) {
        MetricsRecord rec;
        rec.instance = InstanceId{item.at("node").get<int>(), item.at("interpreter").get<int>()};
        rec.rows_processed = item.at("rows_processed").get<std::uint64_t>();
        rec.sync_time_total = SimTime{item.at("sync_time_ms").get<std::int64_t>()};
        rec.idle_time_total = SimTime{item.at("idle_time_ms").get<std::int64_t>()};
        rec.rows_sent_remote = item.at("rows_sent_remote").get<std::uint64_t>();
        rec.bytes_sent_remote = item.at("bytes_sent_remote").get<std::uint64_t>();
        report.instances.push_back(rec);
    }
    for (const auto& item : root.at("transitions")) {
        TransitionLogEntry tr;
        tr.at = SimTime{item.at("time_ms").get<std::int64_t>()};
        tr.instance = InstanceId{item.at("node").get<int>(), item.at("interpreter").get<int>()};
        tr.from = link_state_from_string(item.at("from").get<std::string>());
        tr.to = link_state_from_string(item.at("to").get<std::string>());
        report.transition_log.push_back(tr);
    }
    report.config_echo = config_from_json(root.at("config"));
    return report;
}

inline RunReport report_from_json_text(const std::string& text) {
    return report_from_json(json::parse(text));
}

namespace detail {

// Shortest exact decimal for a double; parses back bit-identical.
inline std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    double parsed = 0.0;
    std::sscanf(buf, "%lf", &parsed);
    if (parsed == value) {
        // try shorter forms first for readability
        for (int digits = 1; digits <= 16; ++digits) {
            char shorter[64];
            std::snprintf(shorter, sizeof(shorter), "%.*g", digits, value);
            std::sscanf(shorter, "%lf", &parsed);
            if (parsed == value) {
                return shorter;
            }
        }
    }
    return buf;
}

} // namespace detail

// Per-instance metrics as CSV. Carries exactly the instances table; the JSON
// report is the authoritative full record.
inline std::string report_to_csv(const RunReport& report) {
    std::ostringstream out;
    out << "node,interpreter,rows_processed,sync_time_ms,idle_time_ms,rows_sent_remote,"
           "bytes_sent_remote\n";
    for (const MetricsRecord& rec : report.instances) {
        out << rec.instance.node_index << ',' << rec.instance.interpreter_index << ','
            << rec.rows_processed << ',' << rec.sync_time_total.ms << ',' << rec.idle_time_total.ms
            << ',' << rec.rows_sent_remote << ',' << rec.bytes_sent_remote << '\n';
    }
    return out.str();
}

inline std::vector<MetricsRecord> instance_metrics_from_csv(const std::string& text) {
    std::vector<MetricsRecord> out;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        MetricsRecord rec;
        long long node = 0, interp = 0;
        unsigned long long rows = 0, sent = 0, bytes = 0;
        long long sync = 0, idle = 0;
        if (std::sscanf(line.c_str(), "%lld,%lld,%llu,%lld,%lld,%llu,%llu", &node, &interp, &rows,
                        &sync, &idle, &sent, &bytes) != 7) {
            throw ParseError("malformed metrics CSV line: " + line);
        }
        rec.instance = InstanceId{static_cast<int>(node), static_cast<int>(interp)};
        rec.rows_processed = rows;
        rec.sync_time_total = SimTime{sync};
        rec.idle_time_total = SimTime{idle};
        rec.rows_sent_remote = sent;
        rec.bytes_sent_remote = bytes;
        out.push_back(rec);
    }
    return out;
}

} // namespace dyskew

#pragma once

#include "dyskew/core.hpp"
#include "dyskew/prng.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

namespace dyskew {

enum class PlacementKind {
    Uniform,
    SingleHot,
    Zipf,
};

constexpr std::string_view to_string(PlacementKind k) {
    switch (k) {
    case PlacementKind::Uniform: return "uniform";
    case PlacementKind::SingleHot: return "single_hot";
    case PlacementKind::Zipf: return "zipf";
    }
    return "unknown";
}

struct Placement {
    PlacementKind kind = PlacementKind::Uniform;
    double hot_fraction = 1.0; // SingleHot: share of rows pinned to instance 0, in (0,1]
    double zipf_exponent = 1.0; // Zipf: instance j holds a share proportional to (j+1)^-s, s > 0
};

enum class CostDistKind {
    Constant,
    Uniform,
    Bimodal,
};

constexpr std::string_view to_string(CostDistKind k) {
    switch (k) {
    case CostDistKind::Constant: return "constant";
    case CostDistKind::Uniform: return "uniform";
    case CostDistKind::Bimodal: return "bimodal";
    }
    return "unknown";
}

// Per-row processing cost in virtual ms. Bimodal draws `high_ms` with
// probability `p_high`, else `low_ms`.
struct CostDist {
    CostDistKind kind = CostDistKind::Constant;
    std::int64_t value_ms = 1;
    std::int64_t lo_ms = 1;
    std::int64_t hi_ms = 1;
    std::int64_t low_ms = 1;
    std::int64_t high_ms = 1;
    double p_high = 0.0;
};

enum class PayloadDistKind {
    Constant,
    Bimodal,
};

constexpr std::string_view to_string(PayloadDistKind k) {
    switch (k) {
    case PayloadDistKind::Constant: return "constant";
    case PayloadDistKind::Bimodal: return "bimodal";
    }
    return "unknown";
}

struct PayloadDist {
    PayloadDistKind kind = PayloadDistKind::Constant;
    std::uint64_t bytes = 100;
    std::uint64_t low_bytes = 100;
    std::uint64_t high_bytes = 100;
    double p_high = 0.0;
};

// Declarative workload: how many rows, where they land, and what each row
// costs and weighs. Generation is a pure function of (spec, instance count).
struct WorkloadSpec {
    std::uint64_t total_rows = 0;
    Placement placement;
    CostDist cost;
    PayloadDist payload;
    std::uint64_t seed = 0;

    std::vector<std::string> validate() const {
        std::vector<std::string> issues;
        if (placement.kind == PlacementKind::SingleHot &&
            !(placement.hot_fraction > 0.0 && placement.hot_fraction <= 1.0)) {
            issues.push_back("placement.fraction must be in (0,1]");
        }
        if (placement.kind == PlacementKind::Zipf && !(placement.zipf_exponent > 0.0)) {
            issues.push_back("placement.exponent must be > 0");
        }
        if (cost.kind == CostDistKind::Constant && cost.value_ms < 0) {
            issues.push_back("cost.value_ms must be >= 0");
        }
        if (cost.kind == CostDistKind::Uniform && (cost.lo_ms < 0 || cost.hi_ms < cost.lo_ms)) {
            issues.push_back("cost.lo_ms/hi_ms must satisfy 0 <= lo <= hi");
        }
        if (cost.kind == CostDistKind::Bimodal) {
            if (cost.low_ms < 0 || cost.high_ms < 0) {
                issues.push_back("cost.low_ms/high_ms must be >= 0");
            }
            if (!(cost.p_high >= 0.0 && cost.p_high <= 1.0)) {
                issues.push_back("cost.p_high must be in [0,1]");
            }
        }
        if (payload.kind == PayloadDistKind::Bimodal &&
            !(payload.p_high >= 0.0 && payload.p_high <= 1.0)) {
            issues.push_back("payload.p_high must be in [0,1]");
        }
        return issues;
    }
};

// Integer shares proportional to `weights`, summing exactly to `total`.
// Largest remainder wins the leftover units; remainder ties go to the lower
// index.
inline std::vector<std::uint64_t> largest_remainder_shares(const std::vector<double>& weights,
                                                           std::uint64_t total) {
    const double weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<std::uint64_t> shares(weights.size(), 0);
    if (weights.empty() || weight_sum <= 0.0) {
        return shares;
    }
    std::vector<double> remainders(weights.size(), 0.0);
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(total) * (weights[i] / weight_sum);
        shares[i] = static_cast<std::uint64_t>(std::floor(exact));
        remainders[i] = exact - std::floor(exact);
        assigned += shares[i];
    }
    std::uint64_t leftover = total - assigned;
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return remainders[a] > remainders[b]; // stable: ties keep the lower index first
    });
    for (std::size_t i = 0; leftover > 0; ++i, --leftover) {
        shares[order[i % order.size()]] += 1;
    }
    return shares;
}

// Row counts per instance for a placement.
//   Uniform   : near-even split, leftovers to the lowest indices
//   SingleHot : ceil(f * total) on instance 0, the rest round-robin from 1
//   Zipf      : shares proportional to (j+1)^-s with largest-remainder rounding
inline std::vector<std::uint64_t> placement_counts(const Placement& placement,
                                                   std::uint64_t total_rows, int instances) {
    if (instances < 1) {
        throw ContractViolation("placement_counts: instances must be >= 1");
    }
    const auto k = static_cast<std::size_t>(instances);
    std::vector<std::uint64_t> counts(k, 0);
    switch (placement.kind) {
    case PlacementKind::Uniform: {
        for (std::size_t j = 0; j < k; ++j) {
            counts[j] = total_rows / k + (j < total_rows % k ? 1 : 0);
        }
        break;
    }
    case PlacementKind::SingleHot: {
        const auto hot = std::min<std::uint64_t>(
            total_rows,
            static_cast<std::uint64_t>(std::ceil(placement.hot_fraction *
                                                 static_cast<double>(total_rows))));
        counts[0] = hot;
        for (std::uint64_t r = 0; r < total_rows - hot; ++r) {
            counts[(1 + r) % k] += 1;
        }
        break;
    }
    case PlacementKind::Zipf: {
        std::vector<double> weights(k, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            weights[j] = std::pow(static_cast<double>(j + 1), -placement.zipf_exponent);
        }
        counts = largest_remainder_shares(weights, total_rows);
        break;
    }
    }
    return counts;
}

// Generates the per-instance row lists. Row ids run 0..total_rows-1 in
// instance order; cost then payload are drawn per row, in row-id order, from
// one SplitMix64 stream seeded with spec.seed. That draw order is part of
// the reproducibility contract.
inline std::vector<std::vector<Row>> generate(const WorkloadSpec& spec, int instances) {
    auto issues = spec.validate();
    if (!issues.empty()) {
        std::string msg = "invalid workload spec:";
        for (const auto& issue : issues) {
            msg += " " + issue + ";";
        }
        throw ContractViolation(msg);
    }
    const std::vector<std::uint64_t> counts =
        placement_counts(spec.placement, spec.total_rows, instances);

    SplitMix64 rng(spec.seed);
    const auto draw_cost = [&]() -> std::int64_t {
        switch (spec.cost.kind) {
        case CostDistKind::Constant:
            return spec.cost.value_ms;
        case CostDistKind::Uniform:
            return static_cast<std::int64_t>(
                rng.next_range(static_cast<std::uint64_t>(spec.cost.lo_ms),
                               static_cast<std::uint64_t>(spec.cost.hi_ms)));
        case CostDistKind::Bimodal:
            return rng.next_unit() < spec.cost.p_high ? spec.cost.high_ms : spec.cost.low_ms;
        }
        return 0;
    };
    const auto draw_payload = [&]() -> std::uint64_t {
        switch (spec.payload.kind) {
        case PayloadDistKind::Constant:
            return spec.payload.bytes;
        case PayloadDistKind::Bimodal:
            return rng.next_unit() < spec.payload.p_high ? spec.payload.high_bytes
                                                         : spec.payload.low_bytes;
        }
        return 0;
    };

    std::vector<std::vector<Row>> rows_per_instance(counts.size());
    std::uint64_t next_id = 0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        rows_per_instance[j].reserve(counts[j]);
        for (std::uint64_t r = 0; r < counts[j]; ++r) {
            Row row;
            row.row_id = next_id++;
            row.cost_units = SimTime{draw_cost()};
            row.payload_bytes = draw_payload();
            rows_per_instance[j].push_back(row);
        }
    }
    return rows_per_instance;
}

// Stress scenario for the row-size guard: a modest row count whose payloads
// total ~100 GiB, spread evenly so there is no skew for models to find.
inline WorkloadSpec heavy_row_preset(std::int64_t cost_ms = 2000, std::uint64_t seed = 0) {
    WorkloadSpec spec;
    spec.total_rows = 100;
    spec.placement = Placement{PlacementKind::Uniform, 1.0, 1.0};
    spec.cost = CostDist{};
    spec.cost.kind = CostDistKind::Constant;
    spec.cost.value_ms = cost_ms;
    spec.payload.kind = PayloadDistKind::Constant;
    spec.payload.bytes = 1ull << 30;
    spec.seed = seed;
    return spec;
}

} // namespace dyskew

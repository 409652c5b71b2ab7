#pragma once

#include "dyskew/core.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dyskew {

enum class ModelChoice {
    RowPercentage,
    IdleTime,
    SyncSlope,
};

// Tunables for the skew models, the N-strikes confirmation and the
// batch-density guard. Defaults are the documented operating point:
// "skewed" means self is at least 2x the sibling average (theta 0.5),
// three consecutive positives confirm, and the guard arms below 10
// rows per batch (1% of a nominal ~1000-row batch).
struct ModelParams {
    double theta_rows = 0.5;      // in (0, 1], multiplies the self statistic
    double theta_slope = 0.5;     // in (0, 1]
    int slope_window = 5;         // samples per sliding window, >= 2
    SimTime idle_period{100};     // > 0
    double idle_fraction = 0.5;   // in (0, 1]
    int strikes_n = 3;            // >= 1
    int density_threshold = 10;   // rows per batch, >= 1

    std::vector<std::string> validate() const {
        std::vector<std::string> issues;
        if (!(theta_rows > 0.0 && theta_rows <= 1.0)) {
            issues.push_back("theta_rows must be in (0,1]");
        }
        if (!(theta_slope > 0.0 && theta_slope <= 1.0)) {
            issues.push_back("theta_slope must be in (0,1]");
        }
        if (slope_window < 2) {
            issues.push_back("slope_window must be >= 2");
        }
        if (idle_period.ms <= 0) {
            issues.push_back("idle_period_ms must be > 0");
        }
        if (!(idle_fraction > 0.0 && idle_fraction <= 1.0)) {
            issues.push_back("idle_fraction must be in (0,1]");
        }
        if (strikes_n < 1) {
            issues.push_back("strikes_n must be >= 1");
        }
        if (density_threshold < 1) {
            issues.push_back("density_threshold must be >= 1");
        }
        return issues;
    }
};

// Throws unless every field is within its documented range.
inline ModelParams validated(ModelParams params) {
    auto issues = params.validate();
    if (!issues.empty()) {
        std::string msg = "invalid model params:";
        for (const auto& issue : issues) {
            msg += " " + issue + ";";
        }
        throw ContractViolation(msg);
    }
    return params;
}

// N-strikes state: `confirmed` latches once `strikes_n` consecutive positive
// verdicts have been observed.
struct StrikeCounter {
    int consecutive_positives = 0;
    bool confirmed = false;

    friend constexpr bool operator==(const StrikeCounter&, const StrikeCounter&) = default;
};

inline StrikeCounter strike_update(StrikeCounter counter, bool raw_verdict, int n) {
    if (n < 1) {
        throw ContractViolation("strike_update: n must be >= 1");
    }
    if (counter.confirmed) {
        return counter;
    }
    if (raw_verdict) {
        counter.consecutive_positives += 1;
        if (counter.consecutive_positives >= n) {
            counter.confirmed = true;
        }
    } else {
        counter.consecutive_positives = 0;
    }
    return counter;
}

// Row-percentage model: self is skewed when R_self * theta exceeds the
// sibling average row count. No siblings means nothing to offload to, so
// never skewed.
inline bool row_percentage_skewed(const SiblingSnapshot& snapshot, const ModelParams& params) {
    auto avg = sibling_average_rows(snapshot, snapshot.self_id);
    if (!avg.has_value()) {
        return false;
    }
    const auto& self = snapshot.record_of(snapshot.self_id);
    return static_cast<double>(self.row_count) * params.theta_rows > *avg;
}

// Endpoint difference quotient over the last `window` samples. Nullopt when
// there are fewer than two samples in the window or the window spans zero
// time; callers treat that as "not skewed".
inline std::optional<double> sync_slope(std::span<const SyncSample> series, int window) {
    if (window < 2 || series.size() < 2) {
        return std::nullopt;
    }
    const std::size_t take = std::min(series.size(), static_cast<std::size_t>(window));
    const SyncSample& first = series[series.size() - take];
    const SyncSample& last = series[series.size() - 1];
    const std::int64_t dt = last.at.ms - first.at.ms;
    if (dt <= 0) {
        return std::nullopt;
    }
    return static_cast<double>(last.total.ms - first.total.ms) / static_cast<double>(dt);
}

// Sync-slope model: self is skewed when its sync-time slope, damped by
// theta, still meets or exceeds the mean sibling slope. Siblings without
// enough samples count as slope zero; a self without enough samples is
// never skewed. Sibling slopes are averaged in record order.
inline bool sync_slope_skewed(const SiblingSnapshot& snapshot, const ModelParams& params) {
    const auto& self = snapshot.record_of(snapshot.self_id);
    auto self_slope = sync_slope(self.sync_series, params.slope_window);
    if (!self_slope.has_value()) {
        return false;
    }
    double sibling_sum = 0.0;
    std::size_t sibling_count = 0;
    for (const auto& rec : snapshot.records) {
        if (rec.id == snapshot.self_id) {
            continue;
        }
        sibling_sum += sync_slope(rec.sync_series, params.slope_window).value_or(0.0);
        ++sibling_count;
    }
    if (sibling_count == 0) {
        return false;
    }
    const double sibling_mean = sibling_sum / static_cast<double>(sibling_count);
    return *self_slope * params.theta_slope >= sibling_mean;
}

// Idle model: a sibling is idle when it has seen no activity for strictly
// longer than `idle_period`. Self is skewed when at least `idle_fraction`
// of its siblings are idle while self itself is not.
inline bool idle_time_skewed(const SiblingSnapshot& snapshot, const ModelParams& params) {
    const auto& self = snapshot.record_of(snapshot.self_id);
    const auto is_idle = [&](const SiblingSnapshot::InstanceRecord& rec) {
        return (snapshot.now - rec.last_activity) > params.idle_period;
    };
    if (is_idle(self)) {
        return false;
    }
    std::size_t idle_count = 0;
    std::size_t sibling_count = 0;
    for (const auto& rec : snapshot.records) {
        if (rec.id == snapshot.self_id) {
            continue;
        }
        ++sibling_count;
        if (is_idle(rec)) {
            ++idle_count;
        }
    }
    if (sibling_count == 0) {
        return false;
    }
    return static_cast<double>(idle_count) / static_cast<double>(sibling_count) >=
           params.idle_fraction;
}

inline bool evaluate_model(ModelChoice choice, const SiblingSnapshot& snapshot,
                           const ModelParams& params) {
    switch (choice) {
    case ModelChoice::RowPercentage:
        return row_percentage_skewed(snapshot, params);
    case ModelChoice::IdleTime:
        return idle_time_skewed(snapshot, params);
    case ModelChoice::SyncSlope:
        return sync_slope_skewed(snapshot, params);
    }
    return false;
}

// Row-size guard: arms only when the operator is NOT currently considered
// skewed and batch density has collapsed below the threshold. A true result
// tells the state machine to shut redistribution off for good.
inline bool row_size_guard_triggered(int density, bool skewed_now, const ModelParams& params) {
    return !skewed_now && density < params.density_threshold;
}

} // namespace dyskew

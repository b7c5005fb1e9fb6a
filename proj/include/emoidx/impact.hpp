#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emoidx/calendar.hpp"
#include "emoidx/decompose.hpp"
#include "emoidx/emotion.hpp"

namespace emoidx {

inline constexpr std::size_t kMinImpactHistoryDays = 365;

struct ImpactRecord {
    Emotion emotion{};
    Day date{};
    // (observed - expected) / expected; nullopt when expected <= 0.
    std::optional<double> delta;
    double observed = 0.0;
    double expected = 0.0;
    Day fit_train_end{};
};

// Relative deviation of observed from expected. nullopt if expected <= 0.
std::optional<double> differential_ratio(double observed, double expected);

// Fits on the days strictly before event_date and scores each day of
// [event_date, event_date + horizon) that has data. Undefined deltas are
// returned with delta = nullopt. Throws DataError with fewer than 365 non-gap
// days before the event.
std::vector<ImpactRecord> event_impact(const DayValues& series, Emotion emotion, const ModelSpec& spec, Day event_date,
                                       int horizon = 14);

// Same, reusing a fit trained before event_date.
std::vector<ImpactRecord> event_impact(const DayValues& series, Emotion emotion, const ModelFit& fit, Day event_date,
                                       int horizon = 14);

struct RankOptions {
    Day period_start{};
    Day period_end{};
    std::size_t top_k = 10;
    int refit_cadence = 28;
    // Also return every scored record in RankResult::all.
    bool keep_all = false;
};

struct RankResult {
    std::vector<ImpactRecord> top;        // delta descending; ties by date, then emotion name
    std::vector<ImpactRecord> undefined;  // expected <= 0
    std::vector<ImpactRecord> all;        // only with RankOptions::keep_all
    std::size_t evaluated = 0;            // scored (emotion, day) pairs
};

// Scores every (emotion, day) in the period against the latest fit whose
// training data ends before that day; models are refit every refit_cadence
// days on all data before the refit boundary.
RankResult rank_impacts(const std::map<Emotion, DayValues>& series, const ModelSpec& spec, const RankOptions& options);

// The ordering used by rank_impacts.
bool impact_before(const ImpactRecord& a, const ImpactRecord& b);

// `rank,emotion,date,delta_pct,observed,expected,fit_train_end`, plus a
// trailing `label` column when annotations are given. Undefined deltas leave
// delta_pct empty.
void write_impact_csv(const std::vector<ImpactRecord>& records, const std::filesystem::path& path,
                      const std::map<Day, std::string>* annotations = nullptr);

// `date,label` file.
std::map<Day, std::string> load_annotations(const std::filesystem::path& path);

} // namespace emoidx

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "emoidx/calendar.hpp"
#include "emoidx/counts.hpp"
#include "emoidx/emotion.hpp"
#include "emoidx/lexicon.hpp"

namespace emoidx {

struct IndexConfig {
    double alpha = 0.5;
    Day baseline_start = Day{std::chrono::year{2021} / 1 / 1};
    Day baseline_end = Day{std::chrono::year{2023} / 12 / 31};

    // Throws ConfigError.
    void validate() const;
};

struct RatioSeries {
    Emotion emotion{};
    std::vector<std::string> words;                // E_e, lexicon order
    std::map<Day, std::vector<double>> ratios;     // per non-gap day, parallel to `words`
    std::vector<std::string> missing_words;        // absent from the counts vocabulary
    std::map<Day, std::size_t> unmeasured;         // words treated as 0 on that day
    std::vector<std::string> warnings;
};

// w_k(t) / w_all(t) for every word of E_e. Days with w_all = 0 or no total are
// gaps. Missing or unmeasured words contribute 0 and produce a warning.
// Throws DataError if the emotion has no words in the lexicon.
RatioSeries ratio_series(const DailyCounts& counts, const Lexicon& lexicon, Emotion emotion);

// Power mean ((1/n) sum x^alpha)^(1/alpha). Throws DataError on an empty set or
// negative ratio, ConfigError on alpha <= 0.
double generalized_mean(std::span<const double> ratios, double alpha);

struct IndexSeries {
    Emotion emotion{};
    DayValues values;
    IndexConfig config;
};

// I(t) = r(t) / mean of r over the baseline window's non-gap days.
IndexSeries normalize_baseline(const DayValues& r, const IndexConfig& config, Emotion emotion = Emotion::Anger);

// (r - mean) / sigma with population statistics over non-gap days.
DayValues zscore_index(const DayValues& r);

// Generalized-mean aggregation per day of a ratio series.
DayValues aggregate_ratios(const RatioSeries& ratios, double alpha);

// Legacy aggregate: plain sum of word ratios per day.
DayValues sum_ratios(const RatioSeries& ratios);

struct IndexBuild {
    std::map<Emotion, IndexSeries> series;
    std::vector<std::string> warnings;
};

// ratio_series -> generalized_mean -> normalize_baseline for all seven
// emotions. Errors name the failing emotion.
IndexBuild build_all_indices(const DailyCounts& counts, const Lexicon& lexicon, const IndexConfig& config);

// Summed ratios followed by z-scoring, for comparison with older indices.
std::map<Emotion, DayValues> build_legacy_indices(const DailyCounts& counts, const Lexicon& lexicon);

// `date,emotion,value` rows ordered by date then emotion name.
void write_index_csv(const std::map<Emotion, DayValues>& series, const std::filesystem::path& path);
std::map<Emotion, DayValues> load_index_csv(const std::filesystem::path& path);

std::map<Emotion, DayValues> values_of(const std::map<Emotion, IndexSeries>& series);

} // namespace emoidx

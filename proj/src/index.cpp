#include "emoidx/index.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "emoidx/atomic_file.hpp"
#include "emoidx/csv.hpp"
#include "emoidx/error.hpp"

namespace emoidx {

void IndexConfig::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ConfigError("alpha must be > 0, got " + csv::format_double(alpha));
    }
    if (baseline_end < baseline_start) {
        throw ConfigError("baseline window is inverted: " + format_date(baseline_start) + " > " +
                          format_date(baseline_end));
    }
}

RatioSeries ratio_series(const DailyCounts& counts, const Lexicon& lexicon, Emotion emotion) {
    RatioSeries out;
    out.emotion = emotion;
    out.words = lexicon.words(emotion);
    if (out.words.empty()) {
        throw DataError("emotion " + std::string(to_string(emotion)) + " has no words in the lexicon");
    }
    std::vector<const std::vector<std::optional<std::uint64_t>>*> columns;
    for (const auto& w : out.words) {
        const auto it = counts.words.find(w);
        if (it == counts.words.end()) {
            out.missing_words.push_back(w);
            columns.push_back(nullptr);
        } else {
            columns.push_back(&it->second);
        }
    }
    for (const auto& w : out.missing_words) {
        out.warnings.push_back(std::string(to_string(emotion)) + ": word '" + w +
                               "' absent from counts; treated as 0 on every day");
    }

    std::size_t unmeasured_days = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto& total = counts.totals[i];
        if (!total || *total == 0) continue;
        const auto denom = static_cast<double>(*total);
        std::vector<double> row(out.words.size(), 0.0);
        std::size_t unmeasured = 0;
        for (std::size_t k = 0; k < columns.size(); ++k) {
            if (!columns[k]) continue;
            const auto& c = (*columns[k])[i];
            if (c) {
                row[k] = static_cast<double>(*c) / denom;
            } else {
                ++unmeasured;
            }
        }
        const Day d = counts.day_at(i);
        out.ratios.emplace(d, std::move(row));
        if (unmeasured > 0) {
            out.unmeasured[d] = unmeasured;
            ++unmeasured_days;
        }
    }
    if (unmeasured_days > 0) {
        out.warnings.push_back(std::string(to_string(emotion)) + ": " + std::to_string(unmeasured_days) +
                               " day(s) with unmeasured words treated as 0");
    }
    return out;
}

double generalized_mean(std::span<const double> ratios, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ConfigError("generalized_mean: alpha must be > 0");
    }
    if (ratios.empty()) throw DataError("generalized_mean: empty ratio set");
    double lo = ratios.front();
    double hi = ratios.front();
    double acc = 0.0;
    for (double x : ratios) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw DataError("generalized_mean: ratios must be finite and >= 0");
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        acc += alpha == 1.0 ? x : std::pow(x, alpha);
    }
    if (lo == hi) return lo;
    const double mean = acc / static_cast<double>(ratios.size());
    const double r = alpha == 1.0 ? mean : std::pow(mean, 1.0 / alpha);
    // Rounding may step a hair outside [min, max]; the exact value cannot.
    return std::clamp(r, lo, hi);
}

IndexSeries normalize_baseline(const DayValues& r, const IndexConfig& config, Emotion emotion) {
    config.validate();
    double sum = 0.0;
    std::size_t n = 0;
    for (auto it = r.lower_bound(config.baseline_start); it != r.end() && it->first <= config.baseline_end; ++it) {
        sum += it->second;
        ++n;
    }
    if (n == 0) {
        throw DataError(std::string(to_string(emotion)) + ": baseline window " + format_date(config.baseline_start) +
                        ".." + format_date(config.baseline_end) + " contains no data");
    }
    const double mean = sum / static_cast<double>(n);
    if (mean == 0.0) throw DataError(std::string(to_string(emotion)) + ": baseline mean is zero");
    IndexSeries out{emotion, {}, config};
    for (const auto& [d, v] : r) out.values.emplace_hint(out.values.end(), d, v / mean);
    return out;
}

DayValues zscore_index(const DayValues& r) {
    if (r.size() < 2) throw DataError("zscore: need at least 2 days");
    double sum = 0.0;
    for (const auto& [d, v] : r) sum += v;
    const double mean = sum / static_cast<double>(r.size());
    double ss = 0.0;
    for (const auto& [d, v] : r) ss += (v - mean) * (v - mean);
    const double sigma = std::sqrt(ss / static_cast<double>(r.size()));
    if (!(sigma > 0.0)) throw DataError("zscore: standard deviation is zero (constant series)");
    DayValues out;
    for (const auto& [d, v] : r) out.emplace_hint(out.end(), d, (v - mean) / sigma);
    return out;
}

DayValues aggregate_ratios(const RatioSeries& ratios, double alpha) {
    DayValues out;
    for (const auto& [d, row] : ratios.ratios) out.emplace_hint(out.end(), d, generalized_mean(row, alpha));
    return out;
}

DayValues sum_ratios(const RatioSeries& ratios) {
    DayValues out;
    for (const auto& [d, row] : ratios.ratios) {
        double s = 0.0;
        for (double x : row) s += x;
        out.emplace_hint(out.end(), d, s);
    }
    return out;
}

IndexBuild build_all_indices(const DailyCounts& counts, const Lexicon& lexicon, const IndexConfig& config) {
    config.validate();
    IndexBuild out;
    for (Emotion e : kAllEmotions) {
        try {
            RatioSeries rs = ratio_series(counts, lexicon, e);
            out.warnings.insert(out.warnings.end(), rs.warnings.begin(), rs.warnings.end());
            out.series.emplace(e, normalize_baseline(aggregate_ratios(rs, config.alpha), config, e));
        } catch (const DataError& err) {
            throw DataError("index for " + std::string(to_string(e)) + " failed: " + err.what());
        }
    }
    return out;
}

std::map<Emotion, DayValues> build_legacy_indices(const DailyCounts& counts, const Lexicon& lexicon) {
    std::map<Emotion, DayValues> out;
    for (Emotion e : kAllEmotions) {
        try {
            out.emplace(e, zscore_index(sum_ratios(ratio_series(counts, lexicon, e))));
        } catch (const DataError& err) {
            throw DataError("legacy index for " + std::string(to_string(e)) + " failed: " + err.what());
        }
    }
    return out;
}

std::map<Emotion, DayValues> values_of(const std::map<Emotion, IndexSeries>& series) {
    std::map<Emotion, DayValues> out;
    for (const auto& [e, s] : series) out.emplace(e, s.values);
    return out;
}

void write_index_csv(const std::map<Emotion, DayValues>& series, const std::filesystem::path& path) {
    std::set<Day> days;
    for (const auto& [e, s] : series) {
        for (const auto& [d, v] : s) days.insert(d);
    }
    AtomicFile f(path);
    auto& out = f.stream();
    out << "date,emotion,value\n";
    for (Day d : days) {
        const std::string date = format_date(d);
        for (const auto& [e, s] : series) {
            const auto it = s.find(d);
            if (it != s.end()) out << date << ',' << to_string(e) << ',' << csv::format_double(it->second) << '\n';
        }
    }
    f.commit();
}

std::map<Emotion, DayValues> load_index_csv(const std::filesystem::path& path) {
    const csv::Table t = csv::read(path);
    const std::size_t c_date = csv::column(t, "date");
    const std::size_t c_emotion = csv::column(t, "emotion");
    const std::size_t c_value = csv::column(t, "value");
    std::map<Emotion, DayValues> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        try {
            const Emotion e = emotion_from_string(row[c_emotion]);
            const Day d = parse_date(row[c_date]);
            if (!out[e].emplace(d, csv::parse_double(row[c_value])).second) {
                throw DataError("duplicate row for (" + row[c_date] + ", " + row[c_emotion] + ")");
            }
        } catch (const DataError& err) {
            throw DataError(path.string() + ":" + std::to_string(t.lines[r]) + ": " + err.what());
        }
    }
    if (out.empty()) throw DataError(path.string() + ": no index rows");
    return out;
}

} // namespace emoidx

#include "emoidx/impact.hpp"

#include <algorithm>

#include "emoidx/atomic_file.hpp"
#include "emoidx/csv.hpp"
#include "emoidx/error.hpp"

namespace emoidx {

std::optional<double> differential_ratio(double observed, double expected) {
    if (!(expected > 0.0)) return std::nullopt;
    return (observed - expected) / expected;
}

namespace {

DayValues history_before(const DayValues& series, Day cutoff) {
    return DayValues(series.begin(), series.lower_bound(cutoff));
}

void require_history(const DayValues& history, Emotion emotion, Day event_date) {
    if (history.size() < kMinImpactHistoryDays) {
        throw DataError(std::string(to_string(emotion)) + ": need " + std::to_string(kMinImpactHistoryDays) +
                        " days of history before " + format_date(event_date) + ", have " +
                        std::to_string(history.size()));
    }
}

ImpactRecord score(Emotion emotion, Day d, double observed, const ModelFit& fit) {
    const double expected = fit.predict(d);
    return {emotion, d, differential_ratio(observed, expected), observed, expected, fit.last};
}

} // namespace

std::vector<ImpactRecord> event_impact(const DayValues& series, Emotion emotion, const ModelFit& model, Day event_date,
                                       int horizon) {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (!(model.last < event_date)) {
        throw DataError("model fit trained through " + format_date(model.last) + " is not out-of-sample for " +
                        format_date(event_date));
    }
    std::vector<ImpactRecord> out;
    const Day end = add_days(event_date, horizon);
    for (auto it = series.lower_bound(event_date); it != series.end() && it->first < end; ++it) {
        out.push_back(score(emotion, it->first, it->second, model));
    }
    return out;
}

std::vector<ImpactRecord> event_impact(const DayValues& series, Emotion emotion, const ModelSpec& spec, Day event_date,
                                       int horizon) {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    const DayValues history = history_before(series, event_date);
    require_history(history, emotion, event_date);
    return event_impact(series, emotion, fit(history, spec), event_date, horizon);
}

bool impact_before(const ImpactRecord& a, const ImpactRecord& b) {
    const double da = a.delta.value_or(-HUGE_VAL);
    const double db = b.delta.value_or(-HUGE_VAL);
    if (da != db) return da > db;
    if (a.date != b.date) return a.date < b.date;
    return a.emotion < b.emotion;
}

RankResult rank_impacts(const std::map<Emotion, DayValues>& series, const ModelSpec& spec, const RankOptions& options) {
    if (options.refit_cadence < 1) throw ConfigError("refit cadence must be >= 1 day");
    if (options.period_end < options.period_start) throw ConfigError("rank period end precedes start");
    spec.validate();

    RankResult result;
    std::vector<ImpactRecord> scored;
    for (const auto& [emotion, values] : series) {
        require_history(history_before(values, options.period_start), emotion, options.period_start);
        for (Day boundary = options.period_start; boundary <= options.period_end;
             boundary = add_days(boundary, options.refit_cadence)) {
            const Day window_end = std::min(add_days(boundary, options.refit_cadence), add_days(options.period_end, 1));
            auto it = values.lower_bound(boundary);
            if (it == values.end() || !(it->first < window_end)) continue;
            const ModelFit model = fit(history_before(values, boundary), spec);
            for (; it != values.end() && it->first < window_end; ++it) {
                ImpactRecord rec = score(emotion, it->first, it->second, model);
                if (options.keep_all) result.all.push_back(rec);
                ++result.evaluated;
                if (rec.delta) {
                    scored.push_back(rec);
                } else {
                    result.undefined.push_back(rec);
                }
            }
        }
    }
    const std::size_t k = std::min(options.top_k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<long>(k), scored.end(), impact_before);
    scored.resize(k);
    result.top = std::move(scored);
    return result;
}

void write_impact_csv(const std::vector<ImpactRecord>& records, const std::filesystem::path& path,
                      const std::map<Day, std::string>* annotations) {
    AtomicFile f(path);
    auto& out = f.stream();
    out << "rank,emotion,date,delta_pct,observed,expected,fit_train_end";
    if (annotations) out << ",label";
    out << '\n';
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ImpactRecord& r = records[i];
        out << i + 1 << ',' << to_string(r.emotion) << ',' << format_date(r.date) << ',';
        if (r.delta) out << csv::format_double(*r.delta * 100.0);
        out << ',' << csv::format_double(r.observed) << ',' << csv::format_double(r.expected) << ','
            << format_date(r.fit_train_end);
        if (annotations) {
            const auto it = annotations->find(r.date);
            out << ',' << (it == annotations->end() ? std::string() : csv::escape(it->second));
        }
        out << '\n';
    }
    f.commit();
}

std::map<Day, std::string> load_annotations(const std::filesystem::path& path) {
    const csv::Table t = csv::read(path);
    const std::size_t c_date = csv::column(t, "date");
    const std::size_t c_label = csv::column(t, "label");
    std::map<Day, std::string> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        try {
            const Day d = parse_date(t.rows[r][c_date]);
            auto& label = out[d];
            // Several events on one day are joined for display.
            label = label.empty() ? t.rows[r][c_label] : label + "; " + t.rows[r][c_label];
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(t.lines[r]) + ": " + e.what());
        }
    }
    return out;
}

} // namespace emoidx

#include "emoidx/counts_io.hpp"

#include <algorithm>
#include <charconv>

#include "emoidx/atomic_file.hpp"
#include "emoidx/csv.hpp"
#include "emoidx/error.hpp"

namespace emoidx {

std::optional<std::size_t> DailyCounts::offset_of(Day d) const {
    if (empty() || d < first || d > last()) return std::nullopt;
    return static_cast<std::size_t>((d - first).count());
}

DailyCounts merge_counts(const DailyCounts& a, const DailyCounts& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    DailyCounts out;
    out.first = std::min(a.first, b.first);
    const Day last = std::max(a.last(), b.last());
    const auto n = static_cast<std::size_t>((last - out.first).count()) + 1;
    out.totals.assign(n, std::nullopt);

    auto add = [](std::optional<std::uint64_t>& dst, const std::optional<std::uint64_t>& src) {
        if (src) dst = dst.value_or(0) + *src;
    };
    for (const DailyCounts* part : {&a, &b}) {
        const auto shift = static_cast<std::size_t>((part->first - out.first).count());
        for (std::size_t i = 0; i < part->size(); ++i) add(out.totals[shift + i], part->totals[i]);
        for (const auto& [word, series] : part->words) {
            auto& dst = out.words[word];
            if (dst.empty()) dst.assign(n, std::nullopt);
            for (std::size_t i = 0; i < series.size(); ++i) add(dst[shift + i], series[i]);
        }
    }
    return out;
}

namespace {

std::uint64_t parse_count(const std::string& s, const std::string& where) {
    if (!s.empty() && s.front() == '-') throw DataError(where + ": negative count '" + s + "'");
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw DataError(where + ": invalid count '" + s + "'");
    }
    return v;
}

std::string where(const std::filesystem::path& p, std::size_t line) {
    return p.string() + ":" + std::to_string(line);
}

} // namespace

void write_counts(const DailyCounts& counts, const std::filesystem::path& words_csv,
                  const std::filesystem::path& totals_csv) {
    AtomicFile words(words_csv);
    AtomicFile totals(totals_csv);
    auto& w = words.stream();
    auto& t = totals.stream();
    w << "date,word,count\n";
    t << "date,total\n";
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const std::string date = format_date(counts.day_at(i));
        t << date << ',';
        if (counts.totals[i]) t << *counts.totals[i];
        t << '\n';
        for (const auto& [word, series] : counts.words) {
            if (series[i]) w << date << ',' << csv::escape(word) << ',' << *series[i] << '\n';
        }
    }
    words.commit();
    totals.commit();
}

DailyCounts load_counts(const std::filesystem::path& words_csv, const std::filesystem::path& totals_csv) {
    DailyCounts out;

    const csv::Table tt = csv::read(totals_csv);
    const std::size_t t_date = csv::column(tt, "date");
    const std::size_t t_total = csv::column(tt, "total");
    for (std::size_t r = 0; r < tt.rows.size(); ++r) {
        const auto& row = tt.rows[r];
        const std::string at = where(totals_csv, tt.lines[r]);
        Day d;
        try {
            d = parse_date(row[t_date]);
        } catch (const DataError& e) {
            throw DataError(at + ": " + e.what());
        }
        if (r == 0) {
            out.first = d;
        } else if (d != out.day_at(r)) {
            throw DataError(at + ": totals must list contiguous ascending days without duplicates (expected " +
                            format_date(out.day_at(r)) + ", got " + row[t_date] + ")");
        }
        out.totals.push_back(row[t_total].empty() ? std::nullopt
                                                   : std::optional<std::uint64_t>(parse_count(row[t_total], at)));
    }
    if (out.totals.empty()) throw DataError(totals_csv.string() + ": no rows");

    const csv::Table wt = csv::read(words_csv);
    const std::size_t w_date = csv::column(wt, "date");
    const std::size_t w_word = csv::column(wt, "word");
    const std::size_t w_count = csv::column(wt, "count");
    for (std::size_t r = 0; r < wt.rows.size(); ++r) {
        const auto& row = wt.rows[r];
        const std::string at = where(words_csv, wt.lines[r]);
        Day d;
        try {
            d = parse_date(row[w_date]);
        } catch (const DataError& e) {
            throw DataError(at + ": " + e.what());
        }
        const std::string& word = row[w_word];
        if (word.empty()) throw DataError(at + ": empty word");
        const std::uint64_t count = parse_count(row[w_count], at);
        const auto off = out.offset_of(d);
        if (!off) throw DataError(at + ": day " + row[w_date] + " lies outside the totals span");
        if (!out.totals[*off]) throw DataError(at + ": word count on gap day " + row[w_date]);
        auto& series = out.words[word];
        if (series.empty()) series.assign(out.size(), std::nullopt);
        if (series[*off]) throw DataError(at + ": duplicate row for (" + row[w_date] + ", " + word + ")");
        series[*off] = count;
    }
    return out;
}

} // namespace emoidx

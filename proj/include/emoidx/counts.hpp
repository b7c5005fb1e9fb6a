#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emoidx/calendar.hpp"

namespace emoidx {

// Per-day per-word post counts w_k(t) and daily totals w_all(t) over a
// contiguous span of days. A nullopt total marks a gap day (no data). A
// nullopt word count on a non-gap day marks an unmeasured word.
struct DailyCounts {
    Day first{};
    std::vector<std::optional<std::uint64_t>> totals;
    std::map<std::string, std::vector<std::optional<std::uint64_t>>> words;

    std::size_t size() const { return totals.size(); }
    bool empty() const { return totals.empty(); }
    Day day_at(std::size_t i) const { return add_days(first, static_cast<long>(i)); }
    Day last() const { return add_days(first, static_cast<long>(totals.size()) - 1); }
    std::optional<std::size_t> offset_of(Day d) const;

    bool operator==(const DailyCounts&) const = default;
};

// Pointwise sum of two partial counts (e.g. from different shards). The
// result spans the union of both spans. A day is a gap only if it is a gap in
// both inputs; a word is unmeasured only if unmeasured in both.
DailyCounts merge_counts(const DailyCounts& a, const DailyCounts& b);

} // namespace emoidx

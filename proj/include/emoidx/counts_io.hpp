#pragma once

#include <filesystem>

#include "emoidx/counts.hpp"

namespace emoidx {

// Word counts go to `date,word,count` (one row per measured day/word, ordered
// by date then word); totals go to `date,total` with one row per day of the
// span and an empty total on gap days.
void write_counts(const DailyCounts& counts, const std::filesystem::path& words_csv,
                  const std::filesystem::path& totals_csv);

// Throws DataError on malformed rows, negative counts, duplicate keys,
// non-contiguous totals, or word rows on days that are gaps in the totals.
DailyCounts load_counts(const std::filesystem::path& words_csv, const std::filesystem::path& totals_csv);

} // namespace emoidx

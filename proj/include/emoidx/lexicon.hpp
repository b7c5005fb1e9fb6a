#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "emoidx/counts.hpp"
#include "emoidx/emotion.hpp"

namespace emoidx {

struct LexiconEntry {
    Emotion emotion;
    std::string word;
    // Spelling variations; counted under `word`.
    std::vector<std::string> variants;

    bool operator==(const LexiconEntry&) const = default;
};

struct Lexicon {
    std::string name;
    std::string version;
    std::vector<LexiconEntry> entries;
    std::vector<std::string> exclusion_terms;
    std::vector<std::string> proxy_phrases;

    // Head words of one category, in file order.
    std::vector<std::string> words(Emotion e) const;
    std::size_t count(Emotion e) const;

    bool operator==(const Lexicon&) const = default;
};

// Parses a lexicon JSON document, NFKC-normalizes every string, and checks the
// invariants. Categories may be absent; a listed category must be non-empty.
// Throws DataError.
Lexicon parse_lexicon(std::string_view json_text);
Lexicon load_lexicon(const std::filesystem::path& path);

// Re-checks invariants on an in-memory lexicon (strings assumed normalized).
void check_lexicon(const Lexicon& lexicon);

// Canonical JSON form: categories in name order, entries in lexicon order.
std::string serialize_lexicon(const Lexicon& lexicon);

struct SizeBand {
    std::size_t min = 15;
    std::size_t max = 40;
};

struct CategorySize {
    Emotion emotion;
    std::size_t count;
    bool in_band;
};

struct SizeReport {
    SizeBand band;
    std::vector<CategorySize> categories;  // all seven, name order

    bool all_in_band() const;
};

SizeReport validate_sizes(const Lexicon& lexicon, SizeBand band = {});

struct PruneResult {
    Lexicon lexicon;
    std::vector<std::string> removed;
    // Calendar months (first day of each) that were fully covered by counts.
    std::vector<Day> months_used;
};

// Drops entries whose post count is below min_posts_per_month in every fully
// covered calendar month. Counts are taken as given (raw or filtered is the
// caller's choice). Unmeasured and missing words count as zero.
// Throws DataError when no calendar month is fully covered.
PruneResult prune_low_frequency(const Lexicon& lexicon, const DailyCounts& counts,
                                std::uint64_t min_posts_per_month = 5);

} // namespace emoidx

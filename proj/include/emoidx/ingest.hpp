#pragma once

#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "emoidx/calendar.hpp"
#include "emoidx/counts.hpp"
#include "emoidx/lexicon.hpp"
#include "emoidx/matcher.hpp"

namespace emoidx {

enum class SourceClass { individual, mass_media, unknown };

struct PostRecord {
    std::string id;
    Instant timestamp{};
    std::string text;
    bool is_reply = false;
    bool is_retweet = false;
    bool has_url = false;
    SourceClass source_class = SourceClass::unknown;

    bool operator==(const PostRecord&) const = default;
};

// One JSON Lines record: {"id","ts","text","reply","rt","url","src"}.
PostRecord parse_post(std::string_view json_line);
std::string serialize_post(const PostRecord& post, int offset_minutes = 0);

// Calls sink for every non-blank line of a JSON Lines stream.
// Errors carry the 1-based line number.
void read_posts(std::istream& in, const std::function<void(PostRecord&&)>& sink);
std::vector<PostRecord> load_posts(const std::filesystem::path& path);

// Lexicon compiled into automata for word, exclusion and proxy matching.
// Immutable after construction; shareable across threads.
class LexiconMatcher {
public:
    explicit LexiconMatcher(const Lexicon& lexicon);

    const std::vector<std::string>& head_words() const { return heads_; }

    // Indices into head_words() of every entry whose word or any variant
    // occurs in text. Sorted ascending, no repeats.
    std::vector<std::size_t> match(std::string_view text) const;
    // Same, for text that is already NFKC.
    void match_normalized(std::string_view text, std::vector<char>& hit) const;

    bool excluded(std::string_view normalized_text) const { return exclusion_.contains_any(normalized_text); }
    bool has_proxy(std::string_view normalized_text) const { return proxy_.contains_any(normalized_text); }

private:
    std::vector<std::string> heads_;
    PatternMatcher words_;
    PatternMatcher exclusion_;
    PatternMatcher proxy_;
};

// True to keep. Drops mass-media, URL, reply and retweet posts and posts whose
// (NFKC) text contains an exclusion term.
bool filter_post(const PostRecord& post, const LexiconMatcher& matcher);
bool filter_post(const PostRecord& post, const Lexicon& lexicon);

// Head words matched in text (NFKC applied first); each at most once.
std::set<std::string> match_words(std::string_view text, const Lexicon& lexicon);
std::set<std::string> match_words(std::string_view text, const LexiconMatcher& matcher);

enum class TotalMode { direct, proxy };
TotalMode parse_total_mode(std::string_view s);

// Maps instants to local calendar days of an IANA zone. Throws DataError on
// unknown zone ids.
class DayBucketer {
public:
    explicit DayBucketer(const std::string& tz_id);
    ~DayBucketer();
    DayBucketer(DayBucketer&&) noexcept;
    DayBucketer& operator=(DayBucketer&&) noexcept;

    Day local_day(Instant t) const;
    const std::string& id() const { return id_; }

private:
    struct Impl;
    std::string id_;
    std::unique_ptr<Impl> impl_;
};

inline constexpr const char* kDefaultTimeZone = "Asia/Tokyo";

// Streaming aggregation. add() may be called in any order; finish() yields
// the same DailyCounts for any permutation of the same posts.
class CountAccumulator {
public:
    // The matcher must outlive the accumulator.
    CountAccumulator(const LexiconMatcher& matcher, TotalMode mode, const std::string& tz_id);
    CountAccumulator(LexiconMatcher&&, TotalMode, const std::string&) = delete;

    void add(const PostRecord& post);
    std::size_t seen() const { return seen_; }
    std::size_t kept() const { return kept_; }

    // Days without any surviving post are gaps. Throws DataError if nothing
    // survived the filter.
    DailyCounts finish() const;

private:
    struct DayTally {
        std::uint64_t total = 0;
        std::vector<std::uint64_t> words;
    };

    const LexiconMatcher* matcher_;
    TotalMode mode_;
    DayBucketer bucketer_;
    std::map<Day, DayTally> days_;
    std::vector<char> hit_;
    std::size_t seen_ = 0;
    std::size_t kept_ = 0;
};

DailyCounts aggregate(std::span<const PostRecord> posts, const Lexicon& lexicon, TotalMode mode,
                      const std::string& tz_id = kDefaultTimeZone);

} // namespace emoidx

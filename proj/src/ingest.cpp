#include "emoidx/ingest.hpp"

#include <fstream>

#include <json.hpp>
#include <unicode/timezone.h>
#include <unicode/unistr.h>

#include "emoidx/error.hpp"
#include "emoidx/unicode.hpp"

namespace emoidx {

using json = nlohmann::json;

namespace {

std::string_view source_name(SourceClass s) {
    switch (s) {
    case SourceClass::individual: return "individual";
    case SourceClass::mass_media: return "mass_media";
    case SourceClass::unknown: return "unknown";
    }
    return "unknown";
}

SourceClass parse_source(const std::string& s) {
    if (s == "individual") return SourceClass::individual;
    if (s == "mass_media") return SourceClass::mass_media;
    if (s == "unknown") return SourceClass::unknown;
    throw DataError("post: unknown src '" + s + "'");
}

bool optional_bool(const json& j, const char* key) {
    if (!j.contains(key)) return false;
    const json& v = j.at(key);
    if (!v.is_boolean()) throw DataError(std::string("post: '") + key + "' must be a boolean");
    return v.get<bool>();
}

} // namespace

PostRecord parse_post(std::string_view json_line) {
    json j;
    try {
        j = json::parse(json_line);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("post: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw DataError("post: record must be a JSON object");
    PostRecord p;
    if (!j.contains("id")) throw DataError("post: missing 'id'");
    const json& id = j.at("id");
    p.id = id.is_string() ? id.get<std::string>() : id.dump();
    if (!j.contains("ts") || !j.at("ts").is_string()) throw DataError("post: missing 'ts'");
    p.timestamp = parse_rfc3339(j.at("ts").get_ref<const std::string&>());
    if (j.contains("text")) {
        if (!j.at("text").is_string()) throw DataError("post: 'text' must be a string");
        p.text = j.at("text").get<std::string>();
    }
    p.is_reply = optional_bool(j, "reply");
    p.is_retweet = optional_bool(j, "rt");
    p.has_url = optional_bool(j, "url");
    if (j.contains("src")) {
        if (!j.at("src").is_string()) throw DataError("post: 'src' must be a string");
        p.source_class = parse_source(j.at("src").get<std::string>());
    }
    return p;
}

std::string serialize_post(const PostRecord& post, int offset_minutes) {
    json j = {{"id", post.id},
              {"ts", format_rfc3339(post.timestamp, offset_minutes)},
              {"text", post.text},
              {"reply", post.is_reply},
              {"rt", post.is_retweet},
              {"url", post.has_url},
              {"src", source_name(post.source_class)}};
    return j.dump();
}

void read_posts(std::istream& in, const std::function<void(PostRecord&&)>& sink) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            sink(parse_post(line));
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

std::vector<PostRecord> load_posts(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open post stream " + path.string());
    std::vector<PostRecord> posts;
    read_posts(in, [&](PostRecord&& p) { posts.push_back(std::move(p)); });
    return posts;
}

LexiconMatcher::LexiconMatcher(const Lexicon& lexicon) {
    std::vector<std::string> patterns;
    std::vector<std::uint32_t> groups;
    for (const auto& entry : lexicon.entries) {
        const auto g = static_cast<std::uint32_t>(heads_.size());
        heads_.push_back(entry.word);
        patterns.push_back(entry.word);
        groups.push_back(g);
        for (const auto& v : entry.variants) {
            patterns.push_back(v);
            groups.push_back(g);
        }
    }
    words_ = PatternMatcher(patterns, groups, heads_.size());
    exclusion_ = PatternMatcher(lexicon.exclusion_terms,
                                std::vector<std::uint32_t>(lexicon.exclusion_terms.size(), 0), 1);
    proxy_ = PatternMatcher(lexicon.proxy_phrases, std::vector<std::uint32_t>(lexicon.proxy_phrases.size(), 0), 1);
}

void LexiconMatcher::match_normalized(std::string_view text, std::vector<char>& hit) const {
    words_.find_groups(text, hit);
}

std::vector<std::size_t> LexiconMatcher::match(std::string_view text) const {
    std::vector<char> hit;
    match_normalized(nfkc(text), hit);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < hit.size(); ++i) {
        if (hit[i]) out.push_back(i);
    }
    return out;
}

bool filter_post(const PostRecord& post, const LexiconMatcher& matcher) {
    if (post.source_class == SourceClass::mass_media || post.has_url || post.is_reply || post.is_retweet) {
        return false;
    }
    return !matcher.excluded(nfkc(post.text));
}

bool filter_post(const PostRecord& post, const Lexicon& lexicon) {
    return filter_post(post, LexiconMatcher(lexicon));
}

std::set<std::string> match_words(std::string_view text, const LexiconMatcher& matcher) {
    std::set<std::string> out;
    for (std::size_t i : matcher.match(text)) out.insert(matcher.head_words()[i]);
    return out;
}

std::set<std::string> match_words(std::string_view text, const Lexicon& lexicon) {
    return match_words(text, LexiconMatcher(lexicon));
}

TotalMode parse_total_mode(std::string_view s) {
    if (s == "direct") return TotalMode::direct;
    if (s == "proxy") return TotalMode::proxy;
    throw ConfigError("total mode must be 'direct' or 'proxy', got '" + std::string(s) + "'");
}

struct DayBucketer::Impl {
    std::unique_ptr<icu::TimeZone> zone;
};

DayBucketer::DayBucketer(const std::string& tz_id) : id_(tz_id), impl_(std::make_unique<Impl>()) {
    impl_->zone.reset(icu::TimeZone::createTimeZone(icu::UnicodeString::fromUTF8(tz_id)));
    if (!impl_->zone || *impl_->zone == icu::TimeZone::getUnknown()) {
        throw DataError("unknown time zone '" + tz_id + "'");
    }
}

DayBucketer::~DayBucketer() = default;
DayBucketer::DayBucketer(DayBucketer&&) noexcept = default;
DayBucketer& DayBucketer::operator=(DayBucketer&&) noexcept = default;

Day DayBucketer::local_day(Instant t) const {
    const auto ms = t.time_since_epoch().count();
    int32_t raw = 0;
    int32_t dst = 0;
    UErrorCode status = U_ZERO_ERROR;
    impl_->zone->getOffset(static_cast<UDate>(ms), false, raw, dst, status);
    if (U_FAILURE(status)) {
        throw DataError(std::string("time zone offset lookup failed: ") + u_errorName(status));
    }
    const Instant local{std::chrono::milliseconds{ms + raw + dst}};
    return std::chrono::floor<std::chrono::days>(local);
}

CountAccumulator::CountAccumulator(const LexiconMatcher& matcher, TotalMode mode, const std::string& tz_id)
    : matcher_(&matcher), mode_(mode), bucketer_(tz_id) {}

void CountAccumulator::add(const PostRecord& post) {
    ++seen_;
    if (post.source_class == SourceClass::mass_media || post.has_url || post.is_reply || post.is_retweet) return;
    const std::string text = nfkc(post.text);
    if (matcher_->excluded(text)) return;
    ++kept_;

    DayTally& tally = days_[bucketer_.local_day(post.timestamp)];
    if (tally.words.empty()) tally.words.assign(matcher_->head_words().size(), 0);
    if (mode_ == TotalMode::direct || matcher_->has_proxy(text)) ++tally.total;
    matcher_->match_normalized(text, hit_);
    for (std::size_t i = 0; i < hit_.size(); ++i) tally.words[i] += static_cast<std::uint64_t>(hit_[i]);
}

DailyCounts CountAccumulator::finish() const {
    if (days_.empty()) throw DataError("aggregate: no posts survived filtering (no data)");
    DailyCounts out;
    out.first = days_.begin()->first;
    const auto n = static_cast<std::size_t>((days_.rbegin()->first - out.first).count()) + 1;
    out.totals.assign(n, std::nullopt);
    const auto& heads = matcher_->head_words();
    for (const auto& w : heads) out.words[w].assign(n, std::nullopt);
    for (const auto& [day, tally] : days_) {
        const auto i = static_cast<std::size_t>((day - out.first).count());
        out.totals[i] = tally.total;
        for (std::size_t k = 0; k < heads.size(); ++k) out.words[heads[k]][i] = tally.words[k];
    }
    return out;
}

DailyCounts aggregate(std::span<const PostRecord> posts, const Lexicon& lexicon, TotalMode mode,
                      const std::string& tz_id) {
    const LexiconMatcher matcher(lexicon);
    CountAccumulator acc(matcher, mode, tz_id);
    for (const auto& p : posts) acc.add(p);
    return acc.finish();
}

} // namespace emoidx

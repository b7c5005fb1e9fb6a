#include "emoidx/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "emoidx/error.hpp"
#include "emoidx/unicode.hpp"

namespace emoidx {

using json = nlohmann::json;

std::vector<std::string> Lexicon::words(Emotion e) const {
    std::vector<std::string> out;
    for (const auto& entry : entries) {
        if (entry.emotion == e) out.push_back(entry.word);
    }
    return out;
}

std::size_t Lexicon::count(Emotion e) const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [e](const LexiconEntry& x) { return x.emotion == e; }));
}

namespace {

std::string require_string(const json& j, std::string_view what) {
    if (!j.is_string()) throw DataError("lexicon: " + std::string(what) + " must be a string");
    return j.get<std::string>();
}

std::vector<std::string> string_list(const json& doc, const char* key) {
    std::vector<std::string> out;
    if (!doc.contains(key)) return out;
    const json& arr = doc.at(key);
    if (!arr.is_array()) throw DataError(std::string("lexicon: '") + key + "' must be a list");
    for (const auto& item : arr) out.push_back(nfkc(require_string(item, key)));
    return out;
}

} // namespace

void check_lexicon(const Lexicon& lexicon) {
    // surface form -> (emotion, head word) of the entry that owns it
    std::map<std::string, const LexiconEntry*> owner;
    std::set<std::pair<Emotion, std::string>> heads;
    for (const auto& entry : lexicon.entries) {
        if (entry.word.empty()) {
            throw DataError("lexicon: empty word in category " + std::string(to_string(entry.emotion)));
        }
        if (!heads.emplace(entry.emotion, entry.word).second) {
            throw DataError("lexicon: duplicate word '" + entry.word + "' in category " +
                            std::string(to_string(entry.emotion)));
        }
        std::set<std::string> forms{entry.word};
        for (const auto& v : entry.variants) {
            if (v.empty()) throw DataError("lexicon: empty variant of '" + entry.word + "'");
            if (!forms.insert(v).second) {
                throw DataError("lexicon: variant '" + v + "' of '" + entry.word + "' is repeated or equals its word");
            }
        }
        for (const auto& f : forms) {
            auto [it, inserted] = owner.emplace(f, &entry);
            if (!inserted) {
                throw DataError("lexicon: '" + f + "' is listed under both '" + it->second->word + "' (" +
                                std::string(to_string(it->second->emotion)) + ") and '" + entry.word + "' (" +
                                std::string(to_string(entry.emotion)) + ")");
            }
        }
    }
    for (const auto& term : lexicon.exclusion_terms) {
        if (term.empty()) throw DataError("lexicon: empty exclusion term");
        if (auto it = owner.find(term); it != owner.end()) {
            throw DataError("lexicon: exclusion term '" + term + "' collides with entry '" + it->second->word +
                            "' (" + std::string(to_string(it->second->emotion)) + ")");
        }
    }
    for (const auto& phrase : lexicon.proxy_phrases) {
        if (phrase.empty()) throw DataError("lexicon: empty proxy phrase");
        if (auto it = owner.find(phrase); it != owner.end()) {
            throw DataError("lexicon: proxy phrase '" + phrase + "' collides with entry '" + it->second->word + "'");
        }
    }
}

Lexicon parse_lexicon(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("lexicon: malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw DataError("lexicon: document must be a JSON object");

    Lexicon lex;
    if (!doc.contains("meta") || !doc.at("meta").is_object()) throw DataError("lexicon: missing 'meta' object");
    const json& meta = doc.at("meta");
    if (!meta.contains("name") || !meta.contains("version")) {
        throw DataError("lexicon: 'meta' needs 'name' and 'version'");
    }
    lex.name = require_string(meta.at("name"), "meta.name");
    lex.version = require_string(meta.at("version"), "meta.version");

    if (!doc.contains("emotions") || !doc.at("emotions").is_object()) {
        throw DataError("lexicon: missing 'emotions' object");
    }
    // Emit entries in category-name order so the in-memory form is canonical.
    std::map<Emotion, const json*> categories;
    for (const auto& [name, list] : doc.at("emotions").items()) {
        const auto e = parse_emotion(name);
        if (!e) throw DataError("lexicon: unknown emotion category '" + name + "'");
        if (!list.is_array()) throw DataError("lexicon: category '" + name + "' must be a list");
        if (list.empty()) throw DataError("lexicon: empty category '" + name + "'");
        categories[*e] = &list;
    }
    for (const auto& [emotion, list] : categories) {
        for (const auto& item : *list) {
            LexiconEntry entry{emotion, {}, {}};
            if (item.is_string()) {
                entry.word = nfkc(item.get<std::string>());
            } else if (item.is_object() && item.contains("word")) {
                entry.word = nfkc(require_string(item.at("word"), "word"));
                if (item.contains("variants")) {
                    const json& vs = item.at("variants");
                    if (!vs.is_array()) throw DataError("lexicon: variants of '" + entry.word + "' must be a list");
                    for (const auto& v : vs) entry.variants.push_back(nfkc(require_string(v, "variant")));
                }
            } else {
                throw DataError("lexicon: entries must be strings or {word, variants} objects");
            }
            lex.entries.push_back(std::move(entry));
        }
    }
    lex.exclusion_terms = string_list(doc, "exclusion_terms");
    lex.proxy_phrases = string_list(doc, "proxy_phrases");

    check_lexicon(lex);
    return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open lexicon file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_lexicon(ss.str());
}

std::string serialize_lexicon(const Lexicon& lexicon) {
    json doc;
    doc["meta"] = {{"name", lexicon.name}, {"version", lexicon.version}};
    json emotions = json::object();
    for (Emotion e : kAllEmotions) {
        json list = json::array();
        for (const auto& entry : lexicon.entries) {
            if (entry.emotion != e) continue;
            list.push_back({{"word", entry.word}, {"variants", entry.variants}});
        }
        if (!list.empty()) emotions[std::string(to_string(e))] = std::move(list);
    }
    doc["emotions"] = std::move(emotions);
    doc["exclusion_terms"] = lexicon.exclusion_terms;
    doc["proxy_phrases"] = lexicon.proxy_phrases;
    return doc.dump(2) + "\n";
}

bool SizeReport::all_in_band() const {
    return std::all_of(categories.begin(), categories.end(), [](const CategorySize& c) { return c.in_band; });
}

SizeReport validate_sizes(const Lexicon& lexicon, SizeBand band) {
    SizeReport report{band, {}};
    for (Emotion e : kAllEmotions) {
        const std::size_t n = lexicon.count(e);
        report.categories.push_back({e, n, n >= band.min && n <= band.max});
    }
    return report;
}

PruneResult prune_low_frequency(const Lexicon& lexicon, const DailyCounts& counts, std::uint64_t min_posts_per_month) {
    using namespace std::chrono;
    PruneResult result;

    // Months whose every day lies inside the span and is not a gap.
    std::vector<std::pair<std::size_t, std::size_t>> month_ranges;  // [begin, end) offsets
    if (!counts.empty()) {
        const year_month_day first{counts.first};
        year_month ym{first.year(), first.month()};
        while (true) {
            const Day m_first = Day{ym / 1};
            const Day m_last = Day{ym / last};
            if (m_first > counts.last()) break;
            if (m_first >= counts.first && m_last <= counts.last()) {
                const auto b = static_cast<std::size_t>((m_first - counts.first).count());
                const auto e = static_cast<std::size_t>((m_last - counts.first).count()) + 1;
                const bool complete = std::all_of(counts.totals.begin() + static_cast<long>(b),
                                                  counts.totals.begin() + static_cast<long>(e),
                                                  [](const auto& t) { return t.has_value(); });
                if (complete) {
                    month_ranges.emplace_back(b, e);
                    result.months_used.push_back(m_first);
                }
            }
            ym += months{1};
        }
    }
    if (month_ranges.empty()) {
        throw DataError("prune: counts cover no complete calendar month");
    }

    result.lexicon = lexicon;
    result.lexicon.entries.clear();
    for (const auto& entry : lexicon.entries) {
        bool keep = false;
        const auto it = counts.words.find(entry.word);
        for (const auto& [b, e] : month_ranges) {
            std::uint64_t total = 0;
            if (it != counts.words.end()) {
                for (std::size_t i = b; i < e; ++i) total += it->second[i].value_or(0);
            }
            if (total >= min_posts_per_month) {
                keep = true;
                break;
            }
        }
        if (keep) {
            result.lexicon.entries.push_back(entry);
        } else {
            result.removed.push_back(entry.word);
        }
    }
    return result;
}

} // namespace emoidx

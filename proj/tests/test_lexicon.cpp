#include <doctest.h>

#include <algorithm>

#include "emoidx/error.hpp"
#include "emoidx/lexicon.hpp"
#include "test_util.hpp"

using namespace emoidx;
using emoidx::testing::D;

namespace {

std::string seven_by_three() {
    std::string s = R"({"meta":{"name":"t","version":"1"},"emotions":{)";
    bool first = true;
    for (Emotion e : kAllEmotions) {
        const std::string n(to_string(e));
        if (!first) s += ",";
        first = false;
        s += "\"" + n + "\":[\"" + n + "1\",\"" + n + "2\",{\"word\":\"" + n + "3\",\"variants\":[\"" + n + "3b\"]}]";
    }
    s += R"(},"exclusion_terms":["spam"],"proxy_phrases":["。"]})";
    return s;
}

Lexicon sized(const std::map<Emotion, int>& sizes) {
    Lexicon lex{"t", "1", {}, {}, {}};
    for (const auto& [e, n] : sizes) {
        for (int i = 0; i < n; ++i) lex.entries.push_back({e, std::string(to_string(e)) + std::to_string(i), {}});
    }
    return lex;
}

// counts over 2024-01-01..2024-02-29 with one word spread evenly per month
DailyCounts month_counts(const std::map<std::string, std::pair<int, int>>& jan_feb) {
    DailyCounts c;
    c.first = D("2024-01-01");
    c.totals.assign(60, 100);
    for (const auto& [w, jf] : jan_feb) {
        auto& s = c.words[w];
        s.assign(60, std::uint64_t{0});
        for (int i = 0; i < jf.first; ++i) s[static_cast<std::size_t>(i)] = 1;
        for (int i = 0; i < jf.second; ++i) s[31 + static_cast<std::size_t>(i)] = 1;
    }
    return c;
}

} // namespace

TEST_CASE("well-formed lexicon loads all entries") {
    const Lexicon lex = parse_lexicon(seven_by_three());
    CHECK(lex.entries.size() == 21);
    for (Emotion e : kAllEmotions) CHECK(lex.count(e) == 3);
    CHECK(lex.entries[2].variants == std::vector<std::string>{"Anger3b"});
}

TEST_CASE("loader rejects invariant violations") {
    SUBCASE("empty category") {
        CHECK_THROWS_WITH_AS(parse_lexicon(R"({"meta":{"name":"t","version":"1"},"emotions":{"Anger":[]}})"),
                             doctest::Contains("empty category"), DataError);
    }
    SUBCASE("entry collides with exclusion term") {
        const char* doc = R"({"meta":{"name":"t","version":"1"},
            "emotions":{"Friendliness":["わいわい","仲良し"]},"exclusion_terms":["わいわい"]})";
        CHECK_THROWS_WITH_AS(parse_lexicon(doc), doctest::Contains("collides"), DataError);
    }
    SUBCASE("duplicate word within a category") {
        CHECK_THROWS_WITH_AS(
            parse_lexicon(R"({"meta":{"name":"t","version":"1"},"emotions":{"Vigor":["元気","元気"]}})"),
            doctest::Contains("duplicate"), DataError);
    }
    SUBCASE("word in two categories") {
        CHECK_THROWS_AS(
            parse_lexicon(R"({"meta":{"name":"t","version":"1"},"emotions":{"Vigor":["元気"],"Anger":["元気"]}})"),
            DataError);
    }
    SUBCASE("variant equal to its word") {
        CHECK_THROWS_AS(parse_lexicon(R"({"meta":{"name":"t","version":"1"},
            "emotions":{"Vigor":[{"word":"元気","variants":["元気"]}]}})"),
                        DataError);
    }
    SUBCASE("unknown category and malformed JSON") {
        CHECK_THROWS_AS(parse_lexicon(R"({"meta":{"name":"t","version":"1"},"emotions":{"Joy":["x"]}})"), DataError);
        CHECK_THROWS_AS(parse_lexicon(R"({"meta":)"), DataError);
        CHECK_THROWS_AS(parse_lexicon(R"({"emotions":{"Vigor":["x"]}})"), DataError);
    }
}

TEST_CASE("NFKC is applied before invariant checks") {
    // Half-width katakana and full-width Latin fold onto their NFKC forms.
    const Lexicon lex = parse_lexicon(R"({"meta":{"name":"t","version":"1"},
        "emotions":{"Vigor":["ﾜｸﾜｸ","ＡＢＣ"]}})");
    CHECK(lex.entries[0].word == "ワクワク");
    CHECK(lex.entries[1].word == "ABC");
    CHECK_THROWS_AS(parse_lexicon(R"({"meta":{"name":"t","version":"1"},
        "emotions":{"Vigor":["ﾜｸﾜｸ","ワクワク"]}})"),
                    DataError);
}

TEST_CASE("serialize then load is the identity on the canonical form") {
    const Lexicon a = parse_lexicon(seven_by_three());
    const Lexicon b = parse_lexicon(serialize_lexicon(a));
    CHECK(a == b);
    CHECK(serialize_lexicon(a) == serialize_lexicon(b));

    const Lexicon sample = load_lexicon(testing::source_dir() / "data" / "sample_lexicon.json");
    CHECK(parse_lexicon(serialize_lexicon(sample)) == sample);
}

TEST_CASE("validate_sizes") {
    SUBCASE("reported category sizes all sit inside the default band") {
        const auto r = validate_sizes(sized({{Emotion::Vigor, 21},
                                             {Emotion::Confusion, 35},
                                             {Emotion::Depression, 19},
                                             {Emotion::Anger, 25},
                                             {Emotion::Tension, 21},
                                             {Emotion::Fatigue, 22},
                                             {Emotion::Friendliness, 24}}));
        CHECK(r.all_in_band());
        CHECK(r.categories[static_cast<std::size_t>(Emotion::Confusion)].count == 35);
    }
    SUBCASE("small category is flagged") {
        const auto r = validate_sizes(sized({{Emotion::Anger, 3}}));
        CHECK_FALSE(r.categories[0].in_band);
        CHECK(r.categories[0].count == 3);
    }
    SUBCASE("upper bound is inclusive") {
        const auto r = validate_sizes(sized({{Emotion::Anger, 40}, {Emotion::Vigor, 41}}));
        CHECK(r.categories[static_cast<std::size_t>(Emotion::Anger)].in_band);
        CHECK_FALSE(r.categories[static_cast<std::size_t>(Emotion::Vigor)].in_band);
    }
}

TEST_CASE("prune_low_frequency") {
    const Lexicon lex = sized({{Emotion::Anger, 3}});  // Anger0, Anger1, Anger2
    const DailyCounts c = month_counts({{"Anger0", {4, 3}}, {"Anger1", {4, 12}}, {"Anger2", {5, 0}}});

    const PruneResult r = prune_low_frequency(lex, c, 5);
    CHECK(r.removed == std::vector<std::string>{"Anger0"});
    CHECK(r.lexicon.words(Emotion::Anger) == std::vector<std::string>{"Anger1", "Anger2"});
    CHECK(r.months_used.size() == 2);

    SUBCASE("oracle: kept iff max monthly count reaches the threshold") {
        for (const auto& e : lex.entries) {
            std::uint64_t jan = 0, feb = 0;
            for (std::size_t i = 0; i < 31; ++i) jan += *c.words.at(e.word)[i];
            for (std::size_t i = 31; i < 60; ++i) feb += *c.words.at(e.word)[i];
            const bool kept = std::max(jan, feb) >= 5;
            CHECK(kept == (std::find(r.removed.begin(), r.removed.end(), e.word) == r.removed.end()));
        }
    }
    SUBCASE("idempotent") {
        const PruneResult again = prune_low_frequency(r.lexicon, c, 5);
        CHECK(again.removed.empty());
        CHECK(again.lexicon == r.lexicon);
    }
    SUBCASE("threshold 0 removes nothing") {
        const PruneResult z = prune_low_frequency(lex, c, 0);
        CHECK(z.removed.empty());
        CHECK(z.lexicon == lex);
    }
    SUBCASE("word missing from counts counts as zero") {
        const Lexicon more = sized({{Emotion::Anger, 4}});
        CHECK(prune_low_frequency(more, c, 1).removed == std::vector<std::string>{"Anger3"});
    }
    SUBCASE("partial months are ignored; no complete month is an error") {
        DailyCounts partial = c;
        partial.first = D("2024-01-02");  // Jan now incomplete, Feb shifts to 2024-02-01..03-01
        CHECK(prune_low_frequency(lex, partial, 5).months_used.size() == 1);
        DailyCounts tiny = c;
        tiny.totals.resize(20);
        for (auto& [w, s] : tiny.words) s.resize(20);
        CHECK_THROWS_AS(prune_low_frequency(lex, tiny, 5), DataError);
        DailyCounts gappy = c;
        gappy.totals[40] = std::nullopt;  // February has a gap day
        CHECK(prune_low_frequency(lex, gappy, 5).months_used.size() == 1);
    }
}

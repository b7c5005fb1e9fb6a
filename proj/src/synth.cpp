#include "emoidx/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <json.hpp>

#include "emoidx/error.hpp"

namespace emoidx {

using json = nlohmann::json;

void SynthSpec::validate() const {
    if (last < first) throw ConfigError("synth: span end precedes start");
    double wsum = 0.0;
    for (double w : weekly) wsum += w;
    if (std::abs(wsum) > 1e-12) throw ConfigError("synth: weekly pattern must sum to 0");
    if (!(noise_sigma >= 0.0)) throw ConfigError("synth: noise_sigma must be >= 0");
    for (const auto& s : shocks) {
        if (!(s.factor > 0.0)) throw ConfigError("synth: shock factors must be > 0");
    }
    for (const auto& y : yearly) {
        if (y.order < 1) throw ConfigError("synth: yearly orders start at 1");
    }
}

void CorpusSpec::validate() const {
    if (posts_per_day < 1) throw ConfigError("synth: posts_per_day must be >= 1");
    for (double f : {url_fraction, reply_fraction, retweet_fraction, mass_media_fraction, spam_fraction,
                     proxy_fraction}) {
        if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("synth: fractions must lie in [0, 1]");
    }
    if (!(word_rate_min > 0.0 && word_rate_min <= word_rate_max && word_rate_max <= 1.0)) {
        throw ConfigError("synth: need 0 < word_rate_min <= word_rate_max <= 1");
    }
}

double synth_trend(const SynthSpec& spec, Day d) {
    std::vector<SlopeChange> cps = spec.changepoints;
    std::sort(cps.begin(), cps.end(), [](const auto& a, const auto& b) { return a.day < b.day; });
    double level = spec.base_level;
    double slope = spec.trend_slope;
    Day at = spec.first;
    for (const auto& cp : cps) {
        if (cp.day >= d) break;
        if (cp.day > at) {
            level += slope * static_cast<double>((cp.day - at).count());
            at = cp.day;
        }
        slope = cp.slope;
    }
    return level + slope * static_cast<double>((d - at).count());
}

double synth_yearly(const SynthSpec& spec, Day d) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(day_number(d)) / kYearDays;
    double v = 0.0;
    for (const auto& y : spec.yearly) {
        v += y.cos_amp * std::cos(y.order * phase) + y.sin_amp * std::sin(y.order * phase);
    }
    return v;
}

double synth_weekly(const SynthSpec& spec, Day d) { return spec.weekly[static_cast<std::size_t>(weekday_index(d))]; }

SynthSeries gen_index_series(const SynthSpec& spec, Emotion emotion) {
    spec.validate();
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(index_of(emotion))};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, 1.0);

    std::map<Day, double> factor;
    for (const auto& s : spec.shocks) {
        if (s.emotion == emotion) factor[s.day] = factor.contains(s.day) ? factor[s.day] * s.factor : s.factor;
    }

    SynthSeries out;
    DayValues trend;
    DayValues yearly;
    DayValues weekly;
    for (Day d = spec.first; d <= spec.last; d = add_days(d, 1)) {
        const double t = synth_trend(spec, d);
        const double y = synth_yearly(spec, d);
        const double w = synth_weekly(spec, d);
        const double eps = spec.noise_sigma > 0.0 ? spec.noise_sigma * noise(rng) : 0.0;
        double v = ((t + y) + w) + eps;
        if (const auto it = factor.find(d); it != factor.end()) v *= it->second;
        out.observed.emplace_hint(out.observed.end(), d, v);
        trend.emplace_hint(trend.end(), d, t);
        yearly.emplace_hint(yearly.end(), d, y);
        weekly.emplace_hint(weekly.end(), d, w);
    }
    out.truth = make_decomposition(out.observed, trend, yearly, weekly);
    return out;
}

std::map<Emotion, SynthSeries> gen_all_index_series(const SynthSpec& spec) {
    std::map<Emotion, SynthSeries> out;
    for (Emotion e : kAllEmotions) out.emplace(e, gen_index_series(spec, e));
    return out;
}

namespace {

// Decodes UTF-8 into code-point strings (one per character).
std::vector<std::string> utf8_chars(std::string_view s) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < s.size();) {
        const auto c = static_cast<unsigned char>(s[i]);
        const std::size_t n = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : 4;
        out.emplace_back(s.substr(i, n));
        i += n;
    }
    return out;
}

// Filler characters that occur in no lexicon string, so filler never
// completes a lexicon form.
std::vector<std::string> filler_pool(const Lexicon& lex) {
    std::set<std::string> used;
    auto mark = [&](const std::string& s) {
        for (auto& ch : utf8_chars(s)) used.insert(ch);
    };
    for (const auto& e : lex.entries) {
        mark(e.word);
        for (const auto& v : e.variants) mark(v);
    }
    for (const auto& t : lex.exclusion_terms) mark(t);
    for (const auto& p : lex.proxy_phrases) mark(p);
    static constexpr std::string_view kCandidates =
        "のはがをにでとやもへからまでよねかなあいうえおさしすせそたちつてとまみむめもらりるれろ"
        "今日明昨朝夜店駅道雨雪空山川海町村家車電話本机窓門草木花鳥魚犬猫茶米肉";
    std::vector<std::string> pool;
    for (auto& ch : utf8_chars(kCandidates)) {
        if (!used.contains(ch)) pool.push_back(ch);
    }
    if (pool.size() < 4) throw DataError("synth: lexicon leaves too few filler characters");
    return pool;
}

} // namespace

CorpusTruth gen_corpus(const SynthSpec& spec, const Lexicon& lexicon, const CorpusSpec& corpus,
                       const std::function<void(const PostRecord&)>& sink) {
    spec.validate();
    corpus.validate();
    check_lexicon(lexicon);

    CorpusTruth truth;
    truth.index = gen_all_index_series(spec);

    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32), 0xC0u};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const auto pool = filler_pool(lexicon);
    std::uniform_int_distribution<std::size_t> pick_filler(0, pool.size() - 1);

    struct Word {
        const LexiconEntry* entry;
        double base_rate;
    };
    std::vector<Word> words;
    for (const auto& e : lexicon.entries) {
        words.push_back({&e, corpus.word_rate_min + (corpus.word_rate_max - corpus.word_rate_min) * unit(rng)});
        truth.inclusion[e.word];
    }

    auto filler = [&](std::string& out, int lo, int hi) {
        const int n = lo + static_cast<int>(unit(rng) * (hi - lo + 1));
        for (int i = 0; i < n; ++i) out += pool[pick_filler(rng)];
    };

    const auto offset = std::chrono::minutes{corpus.utc_offset_minutes};
    std::vector<double> p(words.size());
    for (Day d = spec.first; d <= spec.last; d = add_days(d, 1)) {
        truth.days.push_back(d);
        for (std::size_t k = 0; k < words.size(); ++k) {
            const double level = std::max(0.0, truth.index.at(words[k].entry->emotion).observed.at(d));
            p[k] = std::min(1.0, words[k].base_rate * level);
            truth.inclusion[words[k].entry->word].push_back(p[k]);
        }
        std::size_t kept = 0;
        // Seconds within the local day, sorted so posts come out in time order.
        std::vector<int> secs(corpus.posts_per_day);
        for (auto& s : secs) s = static_cast<int>(unit(rng) * 86400.0);
        std::sort(secs.begin(), secs.end());
        const Instant midnight_utc = Instant{d} - offset;
        for (std::size_t i = 0; i < corpus.posts_per_day; ++i) {
            PostRecord post;
            post.id = format_date(d) + "-" + std::to_string(i);
            post.timestamp = midnight_utc + std::chrono::seconds{secs[i]};
            post.has_url = unit(rng) < corpus.url_fraction;
            post.is_reply = unit(rng) < corpus.reply_fraction;
            post.is_retweet = unit(rng) < corpus.retweet_fraction;
            post.source_class = unit(rng) < corpus.mass_media_fraction ? SourceClass::mass_media : SourceClass::individual;
            const bool spam = !lexicon.exclusion_terms.empty() && unit(rng) < corpus.spam_fraction;
            const bool proxy = !lexicon.proxy_phrases.empty() && unit(rng) < corpus.proxy_fraction;

            std::string text;
            filler(text, 2, 6);
            for (std::size_t k = 0; k < words.size(); ++k) {
                if (unit(rng) >= p[k]) continue;
                const LexiconEntry& e = *words[k].entry;
                const std::size_t form = e.variants.empty()
                                             ? 0
                                             : static_cast<std::size_t>(unit(rng) * static_cast<double>(e.variants.size() + 1));
                text += form == 0 ? e.word : e.variants[std::min(form, e.variants.size()) - 1];
                filler(text, 1, 3);
            }
            if (spam) {
                text += lexicon.exclusion_terms[static_cast<std::size_t>(unit(rng) * lexicon.exclusion_terms.size()) %
                                                lexicon.exclusion_terms.size()];
                filler(text, 1, 2);
            }
            if (proxy) text += lexicon.proxy_phrases.front();
            post.text = std::move(text);

            if (!post.has_url && !post.is_reply && !post.is_retweet && post.source_class != SourceClass::mass_media &&
                !spam) {
                ++kept;
            }
            sink(post);
        }
        truth.posts.push_back(corpus.posts_per_day);
        truth.kept.push_back(kept);
    }
    return truth;
}

namespace {

Day date_field(const json& j, const char* key) { return parse_date(j.at(key).get<std::string>()); }

} // namespace

SynthSpec synth_spec_from_json(std::string_view text) {
    SynthSpec s;
    try {
        const json j = json::parse(text);
        s.first = date_field(j, "first");
        s.last = date_field(j, "last");
        s.base_level = j.value("base_level", 1.0);
        s.trend_slope = j.value("trend_slope", 0.0);
        if (j.contains("changepoints")) {
            for (const auto& c : j.at("changepoints")) s.changepoints.push_back({date_field(c, "date"), c.at("slope").get<double>()});
        }
        if (j.contains("yearly")) {
            for (const auto& y : j.at("yearly")) {
                s.yearly.push_back({y.at("order").get<int>(), y.value("cos", 0.0), y.value("sin", 0.0)});
            }
        }
        if (j.contains("weekly")) {
            const auto w = j.at("weekly").get<std::vector<double>>();
            if (w.size() != 7) throw DataError("synth spec: weekly needs 7 values (Monday first)");
            std::copy(w.begin(), w.end(), s.weekly.begin());
        }
        s.noise_sigma = j.value("noise_sigma", 0.0);
        if (j.contains("shocks")) {
            for (const auto& sh : j.at("shocks")) {
                s.shocks.push_back({date_field(sh, "date"), emotion_from_string(sh.at("emotion").get<std::string>()),
                                    sh.at("factor").get<double>()});
            }
        }
        s.seed = j.value("seed", std::uint64_t{0});
    } catch (const json::exception& e) {
        throw DataError(std::string("synth spec: malformed JSON: ") + e.what());
    }
    return s;
}

std::string synth_spec_to_json(const SynthSpec& s) {
    json j;
    j["first"] = format_date(s.first);
    j["last"] = format_date(s.last);
    j["base_level"] = s.base_level;
    j["trend_slope"] = s.trend_slope;
    j["changepoints"] = json::array();
    for (const auto& c : s.changepoints) j["changepoints"].push_back({{"date", format_date(c.day)}, {"slope", c.slope}});
    j["yearly"] = json::array();
    for (const auto& y : s.yearly) j["yearly"].push_back({{"order", y.order}, {"cos", y.cos_amp}, {"sin", y.sin_amp}});
    j["weekly"] = s.weekly;
    j["noise_sigma"] = s.noise_sigma;
    j["shocks"] = json::array();
    for (const auto& sh : s.shocks) {
        j["shocks"].push_back({{"date", format_date(sh.day)}, {"emotion", to_string(sh.emotion)}, {"factor", sh.factor}});
    }
    j["seed"] = s.seed;
    return j.dump(2) + "\n";
}

} // namespace emoidx

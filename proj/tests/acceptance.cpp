// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "emoidx/csv.hpp"
#include "emoidx/decompose.hpp"
#include "emoidx/impact.hpp"
#include "emoidx/index.hpp"
#include "emoidx/ingest.hpp"
#include "emoidx/lexicon.hpp"
#include "emoidx/synth.hpp"
#include "emoidx/unicode.hpp"
#include "test_util.hpp"

using namespace emoidx;
using emoidx::testing::D;

namespace {

// Pinned tolerances and limits.
constexpr double kMeanRelTol = 1e-12;
constexpr double kBaselineTol = 1e-9;
constexpr double kMinCorrelation = 0.95;
constexpr double kWeeklyTol = 0.01;
constexpr double kShockLo = 0.45;
constexpr double kShockHi = 0.55;
constexpr double kNullMax = 0.10;
constexpr double kMeanSuiteSeconds = 1.0;
constexpr double kMatcherSeconds = 5.0;
constexpr double kFitSeconds = 10.0;
constexpr double kGoldenSeconds = 60.0;

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome generalized_mean_suite() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> val(0.0, 0.1);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    int bounds = 0, mono = 0, homo = 0, arith = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> x(1 + rng() % 35);
        for (double& v : x) v = val(rng);
        const double m = generalized_mean(x, 0.5);
        const double lo = *std::min_element(x.begin(), x.end());
        const double hi = *std::max_element(x.begin(), x.end());
        if (m < lo * (1 - kMeanRelTol) || m > hi * (1 + kMeanRelTol)) ++bounds;

        std::vector<double> up = x;
        up[rng() % x.size()] += val(rng);
        if (generalized_mean(up, 0.5) < m * (1 - kMeanRelTol)) ++mono;

        const double c = scale(rng);
        std::vector<double> scaled = x;
        for (double& v : scaled) v *= c;
        if (!rel_close(generalized_mean(scaled, 0.5), c * m, kMeanRelTol)) ++homo;

        const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
        if (!rel_close(generalized_mean(x, 1.0), mean, kMeanRelTol)) ++arith;
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = bounds + mono + homo + arith == 0 && secs < kMeanSuiteSeconds;
    o.detail = "violations bounds=" + std::to_string(bounds) + " monotone=" + std::to_string(mono) +
               " homogeneity=" + std::to_string(homo) + " alpha1=" + std::to_string(arith) + ", " +
               fmt("%.3f s", secs);
    return o;
}

Outcome baseline_suite() {
    std::mt19937_64 rng(1002);
    std::uniform_real_distribution<double> val(1e-4, 0.2);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        DayValues r;
        const Day first = add_days(D("2020-01-01"), static_cast<int>(rng() % 400));
        for (int i = 0; i < 1200; ++i) {
            if (rng() % 10 != 0) r[add_days(first, i)] = val(rng);
        }
        IndexConfig cfg;
        cfg.baseline_start = add_days(first, static_cast<int>(rng() % 300));
        cfg.baseline_end = add_days(cfg.baseline_start, 30 + static_cast<int>(rng() % 800));
        const IndexSeries s = normalize_baseline(r, cfg);
        double sum = 0;
        std::size_t n = 0;
        for (auto it = s.values.lower_bound(cfg.baseline_start);
             it != s.values.end() && it->first <= cfg.baseline_end; ++it) {
            sum += it->second;
            ++n;
        }
        worst = std::max(worst, std::abs(sum / static_cast<double>(n) - 1.0));
    }
    return {worst <= kBaselineTol, fmt("max |window mean - 1| = %.3g", worst)};
}

// Random kana/kanji lexicon with heavy prefix and substring sharing.
Lexicon random_japanese_lexicon(std::mt19937_64& rng, const std::vector<std::string>& chars) {
    nlohmann::json j;
    j["meta"] = {{"name", "acceptance"}, {"version", "1"}};
    std::set<std::string> used;
    auto fresh = [&] {
        for (;;) {
            std::string w;
            const int n = 2 + static_cast<int>(rng() % 3);
            for (int i = 0; i < n; ++i) w += chars[rng() % chars.size()];
            if (used.insert(nfkc(w)).second) return w;
        }
    };
    for (Emotion e : kAllEmotions) {
        for (int i = 0; i < 25; ++i) {
            nlohmann::json entry = {{"word", fresh()}, {"variants", nlohmann::json::array()}};
            if (rng() % 4 == 0) entry["variants"].push_back(fresh());
            j["emotions"][std::string(to_string(e))].push_back(entry);
        }
    }
    return parse_lexicon(j.dump());
}

Outcome matcher_oracle() {
    std::mt19937_64 rng(1003);
    const std::vector<std::string> chars = {"あ", "い", "う", "か", "き", "く", "さ", "し", "ア", "イ", "カ",
                                            "ｶ",  "ｷ",  "日", "本", "気", "元", "怒", "疲", "緊", "張"};
    const Lexicon lex = random_japanese_lexicon(rng, chars);
    const auto t0 = Clock::now();
    const LexiconMatcher matcher(lex);
    std::vector<std::string> forms;
    for (const auto& e : lex.entries) {
        forms.push_back(e.word);
        for (const auto& v : e.variants) forms.push_back(v);
    }
    std::size_t mismatches = 0, total_hits = 0;
    for (int i = 0; i < 1000; ++i) {
        std::string text;
        const int pieces = 5 + static_cast<int>(rng() % 40);
        for (int k = 0; k < pieces; ++k) {
            text += rng() % 3 == 0 ? forms[rng() % forms.size()] : chars[rng() % chars.size()];
        }
        const auto got = match_words(text, matcher);
        total_hits += got.size();
        if (got != testing::naive_match(nfkc(text), lex)) ++mismatches;
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < kMatcherSeconds,
            std::to_string(mismatches) + " mismatching posts of 1000 (" + std::to_string(total_hits) + " hits), " +
                fmt("%.3f s", secs)};
}

Outcome scale_invariance() {
    const Lexicon lex = load_lexicon(testing::source_dir() / "data" / "sample_lexicon.json");
    SynthSpec s;
    s.first = D("2024-01-01");
    s.last = D("2024-03-31");
    s.weekly = {0.05, 0.03, 0.01, 0.0, -0.01, -0.03, -0.05};
    s.noise_sigma = 0.02;
    s.seed = 1004;
    CorpusSpec c;
    c.posts_per_day = 300;
    std::vector<PostRecord> posts;
    gen_corpus(s, lex, c, [&](const PostRecord& p) { posts.push_back(p); });
    const DailyCounts counts = aggregate(posts, lex, TotalMode::direct);
    DailyCounts scaled = counts;
    for (auto& t : scaled.totals) {
        if (t) *t *= 7;
    }
    for (auto& [w, series] : scaled.words) {
        for (auto& v : series) {
            if (v) *v *= 7;
        }
    }
    IndexConfig cfg;
    cfg.baseline_start = s.first;
    cfg.baseline_end = D("2024-01-31");
    const auto a = build_all_indices(counts, lex, cfg);
    const auto b = build_all_indices(scaled, lex, cfg);
    std::size_t differing = 0, compared = 0;
    for (const auto& [e, series] : a.series) {
        const DayValues& other = b.series.at(e).values;
        if (other.size() != series.values.size()) ++differing;
        for (const auto& [d, v] : series.values) {
            ++compared;
            const auto it = other.find(d);
            if (it == other.end() || it->second != v) ++differing;
        }
    }
    return {differing == 0 && a.series.size() == 7,
            std::to_string(differing) + " of " + std::to_string(compared) + " values differ across 7 series"};
}

SynthSpec recovery_spec() {
    SynthSpec s;
    s.first = D("2021-01-01");
    s.last = D("2023-12-31");
    s.base_level = 1.0;
    s.trend_slope = 0.0001;
    s.changepoints = {{D("2022-07-01"), -0.0001}};
    s.yearly = {{1, 0.1, 0.0}, {2, 0.0, 0.1}};
    s.weekly = {0.05, 0.05 * 2 / 3, 0.05 / 3, 0.0, -0.05 / 3, -0.05 * 2 / 3, -0.05};
    s.noise_sigma = 0.01;
    s.seed = 1005;
    return s;
}

std::vector<double> on_days(const DayValues& m) {
    std::vector<double> out;
    for (const auto& [d, v] : m) out.push_back(v);
    return out;
}

Outcome decomposition_recovery() {
    const SynthSpec s = recovery_spec();
    const SynthSeries g = gen_index_series(s, Emotion::Fatigue);
    const auto t0 = Clock::now();
    const DecomposeResult r = decompose(g.observed, ModelSpec{});
    const double secs = seconds_since(t0);
    const double ct = testing::correlation(on_days(r.parts.trend), on_days(g.truth.trend));
    const double cy = testing::correlation(on_days(r.parts.yearly), on_days(g.truth.yearly));
    const double cw = testing::correlation(on_days(r.parts.weekly), on_days(g.truth.weekly));
    double wmax = 0;
    const auto w = r.fit.weekly_effects();
    for (std::size_t i = 0; i < 7; ++i) wmax = std::max(wmax, std::abs(w[i] - s.weekly[i]));
    return {ct >= kMinCorrelation && cy >= kMinCorrelation && cw >= kMinCorrelation && wmax <= kWeeklyTol &&
                secs < kFitSeconds,
            fmt("corr trend=%.4f", ct) + fmt(" yearly=%.4f", cy) + fmt(" weekly=%.4f", cw) +
                fmt(", max weekday error %.4f", wmax) + fmt(", fit %.3f s", secs)};
}

Outcome reconstruction_identity() {
    std::size_t days = 0, nonzero = 0;
    std::mt19937_64 rng(1006);
    std::vector<DayValues> inputs{gen_index_series(recovery_spec(), Emotion::Anger).observed};
    for (int k = 0; k < 5; ++k) {
        DayValues y;
        std::lognormal_distribution<double> ln(0.0, 3.0);
        for (int i = 0; i < 500; ++i) {
            if (rng() % 6 != 0) y[add_days(D("2022-01-01"), i)] = (rng() % 2 ? 1.0 : -1.0) * ln(rng);
        }
        inputs.push_back(y);
    }
    for (const auto& y : inputs) {
        const DecomposeResult r = decompose(y, ModelSpec{});
        for (const auto& [d, v] : y) {
            ++days;
            const Decomposition& p = r.parts;
            if ((((v - p.trend.at(d)) - p.yearly.at(d)) - p.weekly.at(d)) - p.residual.at(d) != 0.0) ++nonzero;
        }
    }
    return {nonzero == 0, std::to_string(nonzero) + " non-zero differences over " + std::to_string(days) + " days"};
}

SynthSpec stationary_spec(std::uint64_t seed) {
    SynthSpec s;
    s.first = D("2022-01-01");
    s.last = D("2024-12-31");
    s.base_level = 1.0;
    s.yearly = {{1, 0.05, 0.02}};
    s.weekly = {0.05, 0.03, 0.01, 0.0, -0.01, -0.03, -0.05};
    s.noise_sigma = 0.01;
    s.seed = seed;
    return s;
}

std::map<Emotion, DayValues> observed_all(const SynthSpec& s) {
    std::map<Emotion, DayValues> out;
    for (auto& [e, g] : gen_all_index_series(s)) out[e] = g.observed;
    return out;
}

RankResult ranking_run;

Outcome impact_recovery() {
    SynthSpec single = stationary_spec(1007);
    single.shocks = {{D("2024-04-17"), Emotion::Tension, 1.5}};
    const auto shocked =
        event_impact(gen_index_series(single, Emotion::Tension).observed, Emotion::Tension, ModelSpec{}, D("2024-04-17"), 1);
    const double delta = shocked.at(0).delta.value_or(NAN);
    const bool shock_ok = delta >= kShockLo && delta <= kShockHi;

    RankOptions opt;
    opt.period_start = D("2024-01-01");
    opt.period_end = D("2024-12-31");
    opt.keep_all = true;
    const RankResult null_run = rank_impacts(observed_all(stationary_spec(1008)), ModelSpec{}, opt);
    double null_max = 0;
    for (const auto& r : null_run.all) null_max = std::max(null_max, std::abs(r.delta.value_or(INFINITY)));
    const bool null_ok = null_max < kNullMax && null_run.all.size() == 7 * 366;

    SynthSpec three = stationary_spec(1009);
    three.shocks = {{D("2024-02-14"), Emotion::Depression, 1.40},
                    {D("2024-06-03"), Emotion::Confusion, 1.25},
                    {D("2024-10-29"), Emotion::Friendliness, 1.10}};
    opt.top_k = 10;
    ranking_run = rank_impacts(observed_all(three), ModelSpec{}, opt);
    bool order_ok = ranking_run.top.size() >= 3;
    for (std::size_t i = 0; order_ok && i < 3; ++i) {
        order_ok = ranking_run.top[i].date == three.shocks[i].day && ranking_run.top[i].emotion == three.shocks[i].emotion;
    }
    std::string top;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, ranking_run.top.size()); ++i) {
        const auto& r = ranking_run.top[i];
        top += std::string(i ? ", " : "") + std::string(to_string(r.emotion)) + " " + format_date(r.date) +
               fmt(" %+.3f", r.delta.value_or(NAN));
    }
    return {shock_ok && null_ok && order_ok,
            fmt("single-shock delta %.4f", delta) + fmt(", null max |delta| %.4f", null_max) + ", top 3: " + top};
}

Outcome out_of_sample() {
    std::size_t bad = 0;
    for (const auto& r : ranking_run.all) bad += r.fit_train_end < r.date ? 0 : 1;
    for (const auto& r : ranking_run.top) bad += r.fit_train_end < r.date ? 0 : 1;
    return {bad == 0 && !ranking_run.all.empty(),
            std::to_string(bad) + " violations over " + std::to_string(ranking_run.all.size()) + " records"};
}

Outcome pruning_fixture() {
    const Lexicon lex = parse_lexicon(R"({"meta":{"name":"prune","version":"1"},
        "emotions":{"Vigor":["rare","once","steady"]}})");
    DailyCounts c;
    c.first = D("2024-01-01");
    const std::size_t n = 182;  // January through June
    c.totals.assign(n, std::uint64_t{100});
    auto& rare = c.words["rare"];
    auto& once = c.words["once"];
    auto& steady = c.words["steady"];
    rare.assign(n, std::uint64_t{0});
    once.assign(n, std::uint64_t{0});
    steady.assign(n, std::uint64_t{1});
    for (std::size_t i = 0; i < n; ++i) {
        const auto ymd = std::chrono::year_month_day{c.day_at(i)};
        if (unsigned(ymd.day()) <= 4) rare[i] = 1;                             // 4 per month
        if (unsigned(ymd.day()) <= 4) once[i] = 1;
        if (ymd.month() == std::chrono::March && unsigned(ymd.day()) == 5) once[i] = 1;  // 5 in March only
    }
    const PruneResult r = prune_low_frequency(lex, c, 5);
    const bool removed_rare = std::find(r.removed.begin(), r.removed.end(), "rare") != r.removed.end();
    bool kept_once = false, kept_steady = false;
    for (const auto& e : r.lexicon.entries) {
        kept_once = kept_once || e.word == "once";
        kept_steady = kept_steady || e.word == "steady";
    }
    return {removed_rare && kept_once && kept_steady && r.removed.size() == 1 && r.months_used.size() == 6,
            std::string("removed=[") + (r.removed.empty() ? "" : r.removed.front()) + "] of " +
                std::to_string(r.removed.size()) + ", months used " + std::to_string(r.months_used.size())};
}

// Checks tag balance of an SVG document.
bool well_formed_svg(const std::string& s) {
    if (s.rfind("<svg", 0) != 0 && s.rfind("<?xml", 0) != 0) return false;
    std::vector<std::string> stack;
    for (std::size_t i = s.find('<'); i != std::string::npos; i = s.find('<', i + 1)) {
        const std::size_t end = s.find('>', i);
        if (end == std::string::npos) return false;
        const std::string tag = s.substr(i + 1, end - i - 1);
        if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
        if (tag.back() == '/') continue;
        const std::string name = tag.substr(tag[0] == '/' ? 1 : 0, tag.find_first_of(" \t\n") - (tag[0] == '/' ? 1 : 0));
        if (tag[0] == '/') {
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
        } else {
            stack.push_back(name);
        }
    }
    return stack.empty() && s.find("</svg>") != std::string::npos;
}

bool header_is(const std::filesystem::path& p, const std::vector<std::string>& cols, std::size_t& rows) {
    const csv::Table t = csv::read(p);
    rows = t.rows.size();
    if (t.header != cols) return false;
    return std::all_of(t.rows.begin(), t.rows.end(), [&](const auto& r) { return r.size() == cols.size(); });
}

Outcome golden_path() {
    namespace fs = std::filesystem;
    testing::TempDir dir;
    fs::create_directories(dir / "data");
    fs::create_directories(dir / "out");
    for (const char* f : {"sample_lexicon.json", "sample_annotations.csv"}) {
        fs::copy_file(testing::source_dir() / "data" / f, dir.path() / "data" / f);
    }
    const fs::path config = testing::source_dir() / "data" / "sample_config.json";
    const fs::path old_cwd = fs::current_path();
    fs::current_path(dir.path());
    const auto t0 = Clock::now();
    std::string failed;
    for (const char* sub : {"synth", "count", "index", "decompose", "rank", "plot"}) {
        std::ostringstream out, err;
        if (cli::run({sub, "--config", config.string()}, out, err) != cli::kExitOk) {
            failed = std::string(sub) + ": " + err.str().substr(0, 200);
            break;
        }
    }
    const double secs = seconds_since(t0);
    fs::current_path(old_cwd);
    if (!failed.empty()) return {false, "failed at " + failed};

    std::size_t n_index = 0, n_decomp = 0, n_rank = 0, n_words = 0, n_totals = 0;
    bool schemas = header_is(dir / "out/words.csv", {"date", "word", "count"}, n_words) &&
                   header_is(dir / "out/totals.csv", {"date", "total"}, n_totals) &&
                   header_is(dir / "out/index.csv", {"date", "emotion", "value"}, n_index) &&
                   header_is(dir / "out/decomposition.csv",
                             {"date", "emotion", "observed", "trend", "yearly", "weekly", "residual"}, n_decomp) &&
                   header_is(dir / "out/rank.csv",
                             {"rank", "emotion", "date", "delta_pct", "observed", "expected", "fit_train_end", "label"},
                             n_rank);
    schemas = schemas && n_index == 7 * n_totals && n_decomp == n_index && n_rank == 10;
    const bool svg = well_formed_svg(testing::read_text(dir / "out/trend.svg"));
    return {schemas && svg && secs < kGoldenSeconds,
            std::string("schemas ") + (schemas ? "ok" : "INVALID") + ", svg " + (svg ? "well-formed" : "MALFORMED") +
                ", " + std::to_string(n_totals) + " days, " + fmt("%.1f s", secs)};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"generalized-mean properties on 1000 random vectors", generalized_mean_suite},
        {"baseline window mean equals 1 on 100 random series", baseline_suite},
        {"automaton matches naive substring oracle on 1000 posts", matcher_oracle},
        {"indices bit-identical after scaling all counts by 7", scale_invariance},
        {"3-year decomposition recovers trend/yearly/weekly", decomposition_recovery},
        {"observed minus all components is exactly zero", reconstruction_identity},
        {"impact recovery: single shock, null year, top-3 order", impact_recovery},
        {"every ranked record trained strictly before its date", out_of_sample},
        {"monthly pruning removes rare words and keeps qualifiers", pruning_fixture},
        {"golden path synth->count->index->decompose->rank->plot", golden_path},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << i + 1 << "] " << criteria[i].first << " -- " << o.detail
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "emoidx/calendar.hpp"
#include "emoidx/decompose.hpp"
#include "emoidx/emotion.hpp"
#include "emoidx/ingest.hpp"
#include "emoidx/lexicon.hpp"

namespace emoidx {

struct SlopeChange {
    Day day{};
    double slope = 0.0;  // per day, from `day` on
};

struct YearlyTerm {
    int order = 1;
    double cos_amp = 0.0;
    double sin_amp = 0.0;
};

struct Shock {
    Day day{};
    Emotion emotion{};
    double factor = 1.0;  // multiplicative
};

struct SynthSpec {
    Day first{};
    Day last{};
    double base_level = 1.0;
    double trend_slope = 0.0;  // per day
    std::vector<SlopeChange> changepoints;
    std::vector<YearlyTerm> yearly;
    std::array<double, 7> weekly{};  // Monday first, sums to 0
    double noise_sigma = 0.0;
    std::vector<Shock> shocks;
    std::uint64_t seed = 0;

    // Throws ConfigError.
    void validate() const;
};

SynthSpec synth_spec_from_json(std::string_view text);
std::string synth_spec_to_json(const SynthSpec& spec);

// Noise-free component values of the generator.
double synth_trend(const SynthSpec& spec, Day d);
double synth_yearly(const SynthSpec& spec, Day d);
double synth_weekly(const SynthSpec& spec, Day d);

struct SynthSeries {
    DayValues observed;
    Decomposition truth;  // exact generating components; residual = noise and shock effect
};

// observed(t) = (trend + yearly + weekly + N(0, sigma)) * shock factor for
// this emotion. Deterministic per (seed, emotion).
SynthSeries gen_index_series(const SynthSpec& spec, Emotion emotion = Emotion::Anger);

std::map<Emotion, SynthSeries> gen_all_index_series(const SynthSpec& spec);

struct CorpusSpec {
    std::size_t posts_per_day = 1000;
    double url_fraction = 0.05;
    double reply_fraction = 0.05;
    double retweet_fraction = 0.05;
    double mass_media_fraction = 0.02;
    double spam_fraction = 0.02;
    double proxy_fraction = 0.9;
    // Per-word base inclusion probability, drawn uniformly from this range and
    // scaled by the emotion's synthetic index value on each day.
    double word_rate_min = 0.01;
    double word_rate_max = 0.05;
    int utc_offset_minutes = 9 * 60;

    void validate() const;
};

struct CorpusTruth {
    std::vector<Day> days;
    std::vector<std::size_t> posts;  // generated per day
    std::vector<std::size_t> kept;   // per day, posts no filter should drop
    std::map<std::string, std::vector<double>> inclusion;  // head word -> p per day
    std::map<Emotion, SynthSeries> index;
};

// Emits posts day by day in timestamp order. Deterministic per seed.
CorpusTruth gen_corpus(const SynthSpec& spec, const Lexicon& lexicon, const CorpusSpec& corpus,
                       const std::function<void(const PostRecord&)>& sink);

} // namespace emoidx

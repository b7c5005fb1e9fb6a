#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "emoidx/atomic_file.hpp"
#include "emoidx/counts_io.hpp"
#include "emoidx/csv.hpp"
#include "emoidx/decompose.hpp"
#include "emoidx/error.hpp"
#include "emoidx/impact.hpp"
#include "emoidx/index.hpp"
#include "emoidx/ingest.hpp"
#include "emoidx/lexicon.hpp"
#include "emoidx/svg_plot.hpp"
#include "emoidx/synth.hpp"

namespace emoidx::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Log {
    std::ostream* err;
    int level = 1;  // 0 quiet, 1 warn, 2 info

    void warn(const std::string& msg) const {
        if (level >= 1) *err << "warning: " << msg << '\n';
    }
    void info(const std::string& msg) const {
        if (level >= 2) *err << msg << '\n';
    }
};

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void require_input(const std::string& path, const std::string& flag) {
    if (path.empty()) throw UsageError(flag + " is required");
    if (!fs::is_regular_file(path)) throw UsageError(flag + ": no such file: " + path);
}

void require_output(const std::string& path, const std::string& flag) {
    if (path.empty()) throw UsageError(flag + " is required");
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent)) {
        throw UsageError(flag + ": output directory does not exist: " + parent.string());
    }
}

Day date_arg(const std::string& s, const std::string& flag) {
    try {
        return parse_date(s);
    } catch (const DataError& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

Emotion emotion_arg(const std::string& s, const std::string& flag) {
    if (auto e = parse_emotion(s)) return *e;
    throw UsageError(flag + ": unknown emotion '" + s + "'");
}

void add_model_options(CLI::App* app, ModelSpec& spec) {
    app->add_option("--changepoints", spec.n_changepoints, "Number of trend changepoints")->capture_default_str();
    app->add_option("--changepoint-range", spec.changepoint_range, "Fraction of history eligible for changepoints")
        ->capture_default_str();
    app->add_option("--yearly-order", spec.yearly_order, "Fourier order of the yearly component")
        ->capture_default_str();
    app->add_option("--weekly", spec.weekly, "Fit day-of-week effects (true/false)")->capture_default_str();
    app->add_option("--ridge-trend", spec.ridge_trend, "Ridge weight on changepoint deltas")->capture_default_str();
    app->add_option("--ridge-seasonal", spec.ridge_seasonal, "Ridge weight on seasonal coefficients")
        ->capture_default_str();
    app->add_option("--outlier-mad-k", spec.outlier_mad_k, "MAD multiple for the robust refit (0 disables)")
        ->capture_default_str();
}

void check_model(const ModelSpec& spec) {
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
}

// ---------------------------------------------------------------- lexicon-validate

struct LexiconArgs {
    std::string lexicon;
    std::size_t band_min = 15;
    std::size_t band_max = 40;
    std::string report;
    std::string prune_words;
    std::string prune_totals;
    std::uint64_t min_posts = 5;
    std::string pruned_out;
};

void cmd_lexicon(const LexiconArgs& a, std::ostream& out, const Log& log) {
    require_input(a.lexicon, "--lexicon");
    if (a.band_min > a.band_max) throw UsageError("--band-min exceeds --band-max");
    const bool prune = !a.prune_words.empty() || !a.prune_totals.empty();
    if (prune) {
        require_input(a.prune_words, "--prune-words");
        require_input(a.prune_totals, "--prune-totals");
    }
    if (!a.pruned_out.empty()) {
        if (!prune) throw UsageError("--pruned-out needs --prune-words and --prune-totals");
        require_output(a.pruned_out, "--pruned-out");
    }
    if (!a.report.empty()) require_output(a.report, "--report");

    const Lexicon lex = load_lexicon(a.lexicon);
    const SizeReport sizes = validate_sizes(lex, {a.band_min, a.band_max});
    out << "lexicon " << lex.name << " " << lex.version << "\n";
    json report;
    report["lexicon"] = {{"name", lex.name}, {"version", lex.version}};
    report["band"] = {{"min", a.band_min}, {"max", a.band_max}};
    report["categories"] = json::array();
    for (const auto& c : sizes.categories) {
        out << to_string(c.emotion) << '\t' << c.count << '\t' << (c.in_band ? "ok" : "out-of-band") << '\n';
        report["categories"].push_back({{"emotion", to_string(c.emotion)}, {"count", c.count}, {"in_band", c.in_band}});
        if (!c.in_band) {
            log.warn(std::string(to_string(c.emotion)) + " has " + std::to_string(c.count) + " words, outside [" +
                     std::to_string(a.band_min) + ", " + std::to_string(a.band_max) + "]");
        }
    }
    if (prune) {
        const DailyCounts counts = load_counts(a.prune_words, a.prune_totals);
        const PruneResult pr = prune_low_frequency(lex, counts, a.min_posts);
        out << "pruned " << pr.removed.size() << " word(s) below " << a.min_posts << " posts in every one of "
            << pr.months_used.size() << " complete month(s)\n";
        for (const auto& w : pr.removed) out << "removed\t" << w << '\n';
        json months = json::array();
        for (Day m : pr.months_used) months.push_back(format_date(m).substr(0, 7));
        report["prune"] = {{"min_posts_per_month", a.min_posts},
                           {"counts_source", "used as supplied; counts written by `count` are post-filter"},
                           {"counts_words", a.prune_words},
                           {"counts_totals", a.prune_totals},
                           {"months", months},
                           {"removed", pr.removed}};
        if (!a.pruned_out.empty()) write_file_atomic(a.pruned_out, serialize_lexicon(pr.lexicon));
    }
    if (!a.report.empty()) write_file_atomic(a.report, report.dump(2) + "\n");
}

// ---------------------------------------------------------------- count

struct CountArgs {
    std::string lexicon;
    std::string posts;
    std::string total_mode = "direct";
    std::string tz = kDefaultTimeZone;
    std::string words_out;
    std::string totals_out;
};

void cmd_count(const CountArgs& a, std::ostream& out, const Log& log) {
    require_input(a.lexicon, "--lexicon");
    require_input(a.posts, "--posts");
    require_output(a.words_out, "--words-out");
    require_output(a.totals_out, "--totals-out");
    TotalMode mode;
    try {
        mode = parse_total_mode(a.total_mode);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    const Lexicon lex = load_lexicon(a.lexicon);
    const LexiconMatcher matcher(lex);
    CountAccumulator acc(matcher, mode, a.tz);
    std::ifstream in(a.posts, std::ios::binary);
    if (!in) throw DataError("cannot open " + a.posts);
    read_posts(in, [&](PostRecord&& p) { acc.add(p); });
    const DailyCounts counts = acc.finish();
    write_counts(counts, a.words_out, a.totals_out);
    std::size_t gaps = 0;
    for (const auto& t : counts.totals) gaps += t ? 0 : 1;
    if (gaps > 0) log.warn(std::to_string(gaps) + " day(s) without surviving posts are written as gaps");
    out << "posts read " << acc.seen() << ", kept " << acc.kept() << ", days " << counts.size() << " ("
        << format_date(counts.first) << ".." << format_date(counts.last()) << ")\n";
}

// ---------------------------------------------------------------- index

struct IndexArgs {
    std::string lexicon;
    std::string words;
    std::string totals;
    double alpha = 0.5;
    std::string baseline_start = "2021-01-01";
    std::string baseline_end = "2023-12-31";
    std::string method = "generalized";
    std::string out;
};

void cmd_index(const IndexArgs& a, std::ostream& out, const Log& log) {
    IndexConfig cfg;
    cfg.alpha = a.alpha;
    cfg.baseline_start = date_arg(a.baseline_start, "--baseline-start");
    cfg.baseline_end = date_arg(a.baseline_end, "--baseline-end");
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    if (a.method != "generalized" && a.method != "legacy") {
        throw UsageError("--method must be 'generalized' or 'legacy'");
    }
    require_input(a.lexicon, "--lexicon");
    require_input(a.words, "--words");
    require_input(a.totals, "--totals");
    require_output(a.out, "--out");

    const Lexicon lex = load_lexicon(a.lexicon);
    const DailyCounts counts = load_counts(a.words, a.totals);
    std::map<Emotion, DayValues> values;
    std::size_t n_warnings = 0;
    if (a.method == "generalized") {
        const IndexBuild build = build_all_indices(counts, lex, cfg);
        for (const auto& w : build.warnings) log.warn(w);
        n_warnings = build.warnings.size();
        values = values_of(build.series);
    } else {
        values = build_legacy_indices(counts, lex);
    }
    json meta = {{"method", a.method},
                 {"alpha", cfg.alpha},
                 {"baseline_start", format_date(cfg.baseline_start)},
                 {"baseline_end", format_date(cfg.baseline_end)},
                 {"lexicon", {{"name", lex.name}, {"version", lex.version}}},
                 {"warnings", n_warnings}};
    if (a.method == "legacy") {
        meta.erase("alpha");
        meta.erase("baseline_start");
        meta.erase("baseline_end");
        meta["statistics"] = "population";
    }
    write_index_csv(values, a.out);
    write_file_atomic(a.out + ".meta.json", meta.dump(2) + "\n");
    out << "wrote " << values.size() << " index series to " << a.out << '\n';
}

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
    std::string index;
    std::string out;
    std::string fits_out;
    std::vector<std::string> emotions;
    ModelSpec spec;
};

std::map<Emotion, DayValues> select(std::map<Emotion, DayValues> all, const std::vector<std::string>& names) {
    if (names.empty()) return all;
    std::map<Emotion, DayValues> out;
    for (const auto& n : names) {
        const Emotion e = emotion_arg(n, "--emotion");
        const auto it = all.find(e);
        if (it == all.end()) throw DataError("index has no series for " + n);
        out.emplace(e, std::move(it->second));
    }
    return out;
}

void cmd_decompose(const DecomposeArgs& a, std::ostream& out, const Log& log) {
    check_model(a.spec);
    require_input(a.index, "--index");
    require_output(a.out, "--out");
    if (!a.fits_out.empty()) require_output(a.fits_out, "--fits-out");

    const auto series = select(load_index_csv(a.index), a.emotions);
    std::map<Emotion, Decomposition> parts;
    json fits = json::object();
    for (const auto& [e, values] : series) {
        try {
            DecomposeResult r = decompose(values, a.spec);
            if (r.fit.n_outliers > 0) {
                log.info(std::string(to_string(e)) + ": refit without " + std::to_string(r.fit.n_outliers) +
                         " outlier day(s)");
            }
            fits[std::string(to_string(e))] = json::parse(fit_to_json(r.fit));
            parts.emplace(e, std::move(r.parts));
        } catch (const DataError& err) {
            throw DataError("decompose " + std::string(to_string(e)) + ": " + err.what());
        }
    }
    write_decomposition_csv(parts, a.out);
    if (!a.fits_out.empty()) write_file_atomic(a.fits_out, fits.dump(2) + "\n");
    out << "decomposed " << parts.size() << " series into " << a.out << '\n';
}

// ---------------------------------------------------------------- impact / rank

struct ImpactArgs {
    std::string index;
    std::string emotion;
    std::string event_date;
    int horizon = 14;
    std::string fit;
    std::string out;
    std::string annotations;
    ModelSpec spec;
};

void cmd_impact(const ImpactArgs& a, std::ostream& out, const Log& log) {
    check_model(a.spec);
    if (a.emotion.empty()) throw UsageError("--emotion is required");
    if (a.event_date.empty()) throw UsageError("--event-date is required");
    const Emotion e = emotion_arg(a.emotion, "--emotion");
    const Day event = date_arg(a.event_date, "--event-date");
    if (a.horizon < 1) throw UsageError("--horizon must be >= 1");
    require_input(a.index, "--index");
    require_output(a.out, "--out");
    if (!a.fit.empty()) require_input(a.fit, "--fit");
    if (!a.annotations.empty()) require_input(a.annotations, "--annotations");

    const auto all = load_index_csv(a.index);
    const auto it = all.find(e);
    if (it == all.end()) throw DataError("index has no series for " + a.emotion);
    std::vector<ImpactRecord> records;
    if (!a.fit.empty()) {
        json doc;
        try {
            doc = json::parse(read_text(a.fit));
        } catch (const json::exception& ex) {
            throw DataError("--fit: malformed JSON: " + std::string(ex.what()));
        }
        // Either a single fit or decompose's per-emotion map.
        const json& one = doc.contains("spec") ? doc : doc.at(a.emotion);
        records = event_impact(it->second, e, fit_from_json(one.dump()), event, a.horizon);
    } else {
        records = event_impact(it->second, e, a.spec, event, a.horizon);
    }
    for (const auto& r : records) {
        if (!r.delta) log.warn(format_date(r.date) + ": expected value " + csv::format_double(r.expected) +
                               " <= 0, differential ratio undefined");
    }
    std::map<Day, std::string> notes;
    if (!a.annotations.empty()) notes = load_annotations(a.annotations);
    write_impact_csv(records, a.out, a.annotations.empty() ? nullptr : &notes);
    out << "scored " << records.size() << " day(s) from " << a.event_date << " into " << a.out << '\n';
}

struct RankArgs {
    std::string index;
    std::string period;
    std::size_t top = 10;
    int refit_cadence = 28;
    std::string out;
    std::string annotations;
    ModelSpec spec;
};

void cmd_rank(const RankArgs& a, std::ostream& out, const Log& log) {
    check_model(a.spec);
    if (a.period.empty()) throw UsageError("--period is required");
    Period period;
    try {
        period = parse_period(a.period);
    } catch (const DataError& e) {
        throw UsageError(std::string("--period: ") + e.what());
    }
    if (a.refit_cadence < 1) throw UsageError("--refit-cadence must be >= 1");
    if (a.top < 1) throw UsageError("--top must be >= 1");
    require_input(a.index, "--index");
    require_output(a.out, "--out");
    if (!a.annotations.empty()) require_input(a.annotations, "--annotations");

    RankOptions opts{period.first, period.last, a.top, a.refit_cadence};
    const RankResult r = rank_impacts(load_index_csv(a.index), a.spec, opts);
    for (const auto& u : r.undefined) {
        log.warn(std::string(to_string(u.emotion)) + " " + format_date(u.date) +
                 ": expected value <= 0, differential ratio undefined");
    }
    std::map<Day, std::string> notes;
    if (!a.annotations.empty()) notes = load_annotations(a.annotations);
    write_impact_csv(r.top, a.out, a.annotations.empty() ? nullptr : &notes);
    out << "ranked " << r.evaluated << " (emotion, day) pairs; top " << r.top.size() << " written to " << a.out << '\n';
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string spec;
    std::optional<json> inline_spec;
    std::optional<std::uint64_t> seed;
    std::string lexicon;
    std::string posts_out;
    std::string index_out;
    std::string truth_out;
    CorpusSpec corpus;
};

void cmd_synth(const SynthArgs& a, std::ostream& out, const Log& log) {
    if (a.spec.empty() && !a.inline_spec) throw UsageError("--spec is required");
    if (!a.spec.empty()) require_input(a.spec, "--spec");
    if (a.posts_out.empty() && a.index_out.empty() && a.truth_out.empty()) {
        throw UsageError("nothing to write: give --posts-out, --index-out and/or --truth-out");
    }
    if (!a.posts_out.empty()) {
        require_input(a.lexicon, "--lexicon");
        require_output(a.posts_out, "--posts-out");
    }
    if (!a.index_out.empty()) require_output(a.index_out, "--index-out");
    if (!a.truth_out.empty()) require_output(a.truth_out, "--truth-out");

    SynthSpec spec = synth_spec_from_json(a.inline_spec ? a.inline_spec->dump() : read_text(a.spec));
    if (a.seed) spec.seed = *a.seed;
    try {
        spec.validate();
        if (!a.posts_out.empty()) a.corpus.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }

    const auto series = gen_all_index_series(spec);
    if (!a.index_out.empty()) {
        std::map<Emotion, DayValues> values;
        for (const auto& [e, s] : series) values.emplace(e, s.observed);
        write_index_csv(values, a.index_out);
    }
    if (!a.truth_out.empty()) {
        std::map<Emotion, Decomposition> truth;
        for (const auto& [e, s] : series) truth.emplace(e, s.truth);
        write_decomposition_csv(truth, a.truth_out);
    }
    if (!a.posts_out.empty()) {
        const Lexicon lex = load_lexicon(a.lexicon);
        AtomicFile f(a.posts_out);
        std::size_t n = 0;
        const CorpusTruth truth = gen_corpus(spec, lex, a.corpus, [&](const PostRecord& p) {
            f.stream() << serialize_post(p, a.corpus.utc_offset_minutes) << '\n';
            ++n;
        });
        f.commit();
        log.info("generated " + std::to_string(n) + " posts over " + std::to_string(truth.days.size()) + " days");
    }
    out << "synthesized " << format_date(spec.first) << ".." << format_date(spec.last) << " (seed " << spec.seed
        << ")\n";
}

// ---------------------------------------------------------------- plot

struct PlotArgs {
    std::string input;
    std::string out;
    std::string component = "trend";
    std::vector<std::string> emotions;
    std::string title;
};

void cmd_plot(const PlotArgs& a, std::ostream& out, const Log&) {
    require_input(a.input, "--input");
    require_output(a.out, "--out");
    static const std::vector<std::string> kComponents = {"observed", "trend", "yearly", "weekly", "residual"};
    if (std::find(kComponents.begin(), kComponents.end(), a.component) == kComponents.end()) {
        throw UsageError("--component must be one of observed, trend, yearly, weekly, residual");
    }
    std::string header;
    {
        std::ifstream in(a.input);
        std::getline(in, header);
        if (!header.empty() && header.back() == '\r') header.pop_back();
    }
    const auto cols = csv::split(header);
    const bool is_index = std::find(cols.begin(), cols.end(), "value") != cols.end();
    const bool is_decomp = std::find(cols.begin(), cols.end(), "trend") != cols.end();
    if (!is_index && !is_decomp) throw DataError(a.input + ": neither an index nor a decomposition CSV");

    std::map<Emotion, DayValues> series;
    PlotOptions opts;
    if (is_index) {
        series = load_index_csv(a.input);
        opts.y_label = "index";
    } else {
        for (auto& [e, p] : load_decomposition_csv(a.input)) {
            const DayValues& v = a.component == "observed" ? p.observed
                                 : a.component == "trend"  ? p.trend
                                 : a.component == "yearly" ? p.yearly
                                 : a.component == "weekly" ? p.weekly
                                                           : p.residual;
            series.emplace(e, v);
        }
        opts.y_label = a.component;
    }
    series = select(std::move(series), a.emotions);
    opts.title = a.title;
    std::vector<PlotLine> lines;
    for (auto& [e, v] : series) lines.push_back({std::string(to_string(e)), "", std::move(v)});
    write_file_atomic(a.out, render_svg(lines, opts));
    out << "plotted " << lines.size() << " series to " << a.out << '\n';
}

// ---------------------------------------------------------------- config

std::string scalar_text(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw UsageError("config key '" + key + "' must be a string, number or boolean");
}

bool user_gave(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Splices config-file values in as `--key value` pairs for every option the
// user did not give on the command line. Subcommand sections may hold any of
// the subcommand's options; top-level scalars apply wherever such an option
// exists.
std::vector<std::string> apply_config(const json& cfg, CLI::App* sub, const std::vector<std::string>& args,
                                      std::size_t sub_pos, SynthArgs& synth) {
    std::vector<std::string> injected;
    std::set<std::string> taken;
    auto inject = [&](const std::string& key, const json& v) {
        const std::string flag = "--" + key;
        if (user_gave(args, flag) || taken.contains(key)) return;
        taken.insert(key);
        if (v.is_array()) {
            for (const auto& item : v) {
                injected.push_back(flag);
                injected.push_back(scalar_text(item, key));
            }
            return;
        }
        injected.push_back(flag);
        injected.push_back(scalar_text(v, key));
    };

    const std::string name = sub->get_name();
    if (cfg.contains(name)) {
        const json& section = cfg.at(name);
        if (!section.is_object()) throw UsageError("config section '" + name + "' must be an object");
        for (const auto& [key, v] : section.items()) {
            if (name == "synth" && key == "spec" && v.is_object()) {
                if (!user_gave(args, "--spec")) synth.inline_spec = v;
                taken.insert(key);
                continue;
            }
            if (!sub->get_option_no_throw("--" + key)) {
                throw UsageError("config: unknown key '" + key + "' for " + name);
            }
            inject(key, v);
        }
    }
    for (const auto& [key, v] : cfg.items()) {
        if (v.is_object()) continue;
        if (sub->get_option_no_throw("--" + key)) inject(key, v);
    }
    std::vector<std::string> out(args.begin(), args.begin() + static_cast<long>(sub_pos) + 1);
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), args.begin() + static_cast<long>(sub_pos) + 1, args.end());
    return out;
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Daily emotion indices from social-media posts: counting, indexing, decomposition, impacts"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string log_level = "warn";
    app.add_option("--config", config_path, "JSON file supplying any subset of options; flags override it");
    app.add_option("--log-level", log_level, "quiet, warn or info")->capture_default_str();

    LexiconArgs lex_args;
    auto* lex_cmd = app.add_subcommand("lexicon-validate", "Check category sizes; optionally prune rare words");
    lex_cmd->add_option("--lexicon", lex_args.lexicon, "Lexicon JSON");
    lex_cmd->add_option("--band-min", lex_args.band_min)->capture_default_str();
    lex_cmd->add_option("--band-max", lex_args.band_max)->capture_default_str();
    lex_cmd->add_option("--report", lex_args.report, "Write the report as JSON");
    lex_cmd->add_option("--prune-words", lex_args.prune_words, "Word counts CSV used for pruning");
    lex_cmd->add_option("--prune-totals", lex_args.prune_totals, "Totals CSV used for pruning");
    lex_cmd->add_option("--min-posts", lex_args.min_posts, "Monthly post threshold")->capture_default_str();
    lex_cmd->add_option("--pruned-out", lex_args.pruned_out, "Write the pruned lexicon here");

    CountArgs count_args;
    auto* count_cmd = app.add_subcommand("count", "Filter posts and aggregate daily word counts");
    count_cmd->add_option("--lexicon", count_args.lexicon);
    count_cmd->add_option("--posts", count_args.posts, "JSON Lines post stream");
    count_cmd->add_option("--total-mode", count_args.total_mode, "direct or proxy")->capture_default_str();
    count_cmd->add_option("--tz", count_args.tz, "Day boundary time zone")->capture_default_str();
    count_cmd->add_option("--words-out", count_args.words_out);
    count_cmd->add_option("--totals-out", count_args.totals_out);

    IndexArgs index_args;
    auto* index_cmd = app.add_subcommand("index", "Compute the seven daily emotion indices");
    index_cmd->add_option("--lexicon", index_args.lexicon);
    index_cmd->add_option("--words", index_args.words);
    index_cmd->add_option("--totals", index_args.totals);
    index_cmd->add_option("--alpha", index_args.alpha, "Generalized-mean exponent (> 0)")->capture_default_str();
    index_cmd->add_option("--baseline-start", index_args.baseline_start)->capture_default_str();
    index_cmd->add_option("--baseline-end", index_args.baseline_end)->capture_default_str();
    index_cmd->add_option("--method", index_args.method, "generalized or legacy (z-score of summed ratios)")
        ->capture_default_str();
    index_cmd->add_option("--out", index_args.out);

    DecomposeArgs dec_args;
    auto* dec_cmd = app.add_subcommand("decompose", "Split index series into trend, yearly and weekly parts");
    dec_cmd->add_option("--index", dec_args.index);
    dec_cmd->add_option("--out", dec_args.out);
    dec_cmd->add_option("--fits-out", dec_args.fits_out, "Write fitted models as JSON");
    dec_cmd->add_option("--emotion", dec_args.emotions, "Restrict to these emotions");
    add_model_options(dec_cmd, dec_args.spec);

    ImpactArgs imp_args;
    auto* imp_cmd = app.add_subcommand("impact", "Differential ratios around one event date");
    imp_cmd->add_option("--index", imp_args.index);
    imp_cmd->add_option("--emotion", imp_args.emotion);
    imp_cmd->add_option("--event-date", imp_args.event_date);
    imp_cmd->add_option("--horizon", imp_args.horizon)->capture_default_str();
    imp_cmd->add_option("--fit", imp_args.fit, "Reuse a fitted model (must end before the event)");
    imp_cmd->add_option("--out", imp_args.out);
    imp_cmd->add_option("--annotations", imp_args.annotations, "CSV date,label joined for display");
    add_model_options(imp_cmd, imp_args.spec);

    RankArgs rank_args;
    auto* rank_cmd = app.add_subcommand("rank", "Largest event impacts over a period");
    rank_cmd->add_option("--index", rank_args.index);
    rank_cmd->add_option("--period", rank_args.period, "FIRST:LAST");
    rank_cmd->add_option("--top", rank_args.top)->capture_default_str();
    rank_cmd->add_option("--refit-cadence", rank_args.refit_cadence, "Days between refits")->capture_default_str();
    rank_cmd->add_option("--out", rank_args.out);
    rank_cmd->add_option("--annotations", rank_args.annotations, "CSV date,label joined for display");
    add_model_options(rank_cmd, rank_args.spec);

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic index series and post corpora");
    synth_cmd->add_option("--spec", synth_args.spec, "SynthSpec JSON");
    synth_cmd->add_option("--seed", synth_args.seed, "Override the spec's seed");
    synth_cmd->add_option("--lexicon", synth_args.lexicon, "Lexicon for corpus generation");
    synth_cmd->add_option("--posts-out", synth_args.posts_out, "JSON Lines corpus");
    synth_cmd->add_option("--index-out", synth_args.index_out, "Synthetic index CSV");
    synth_cmd->add_option("--truth-out", synth_args.truth_out, "Ground-truth decomposition CSV");
    synth_cmd->add_option("--posts-per-day", synth_args.corpus.posts_per_day)->capture_default_str();
    synth_cmd->add_option("--url-fraction", synth_args.corpus.url_fraction)->capture_default_str();
    synth_cmd->add_option("--reply-fraction", synth_args.corpus.reply_fraction)->capture_default_str();
    synth_cmd->add_option("--retweet-fraction", synth_args.corpus.retweet_fraction)->capture_default_str();
    synth_cmd->add_option("--mass-media-fraction", synth_args.corpus.mass_media_fraction)->capture_default_str();
    synth_cmd->add_option("--spam-fraction", synth_args.corpus.spam_fraction)->capture_default_str();
    synth_cmd->add_option("--proxy-fraction", synth_args.corpus.proxy_fraction)->capture_default_str();

    PlotArgs plot_args;
    auto* plot_cmd = app.add_subcommand("plot", "Render an index or decomposition CSV as SVG");
    plot_cmd->add_option("--input", plot_args.input);
    plot_cmd->add_option("--out", plot_args.out);
    plot_cmd->add_option("--component", plot_args.component, "Decomposition column to draw")->capture_default_str();
    plot_cmd->add_option("--emotion", plot_args.emotions, "Restrict to these emotions");
    plot_cmd->add_option("--title", plot_args.title);

    Log log{&err};
    try {
        // Pull --config out first so its values can be spliced in before parsing.
        std::vector<std::string> args;
        std::string cfg_file;
        for (std::size_t i = 0; i < raw_args.size(); ++i) {
            if (raw_args[i] == "--config") {
                if (i + 1 >= raw_args.size()) throw UsageError("--config needs a path");
                cfg_file = raw_args[++i];
            } else if (raw_args[i].rfind("--config=", 0) == 0) {
                cfg_file = raw_args[i].substr(9);
            } else {
                args.push_back(raw_args[i]);
            }
        }
        if (!cfg_file.empty()) {
            const auto pos = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
                return app.get_subcommand_no_throw(a) != nullptr;
            });
            if (pos == args.end()) throw UsageError("--config given without a subcommand");
            if (!fs::is_regular_file(cfg_file)) throw UsageError("--config: no such file: " + cfg_file);
            json cfg;
            try {
                cfg = json::parse(read_text(cfg_file));
            } catch (const json::exception& e) {
                throw UsageError("--config: malformed JSON: " + std::string(e.what()));
            }
            if (!cfg.is_object()) throw UsageError("--config: document must be a JSON object");
            args = apply_config(cfg, app.get_subcommand(*pos), args,
                                static_cast<std::size_t>(pos - args.begin()), synth_args);
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    if (log_level == "quiet") {
        log.level = 0;
    } else if (log_level == "warn") {
        log.level = 1;
    } else if (log_level == "info") {
        log.level = 2;
    } else {
        err << "error: --log-level must be quiet, warn or info\n";
        return kExitUsage;
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        if (active == lex_cmd) cmd_lexicon(lex_args, out, log);
        else if (active == count_cmd) cmd_count(count_args, out, log);
        else if (active == index_cmd) cmd_index(index_args, out, log);
        else if (active == dec_cmd) cmd_decompose(dec_args, out, log);
        else if (active == imp_cmd) cmd_impact(imp_args, out, log);
        else if (active == rank_cmd) cmd_rank(rank_args, out, log);
        else if (active == synth_cmd) cmd_synth(synth_args, out, log);
        else if (active == plot_cmd) cmd_plot(plot_args, out, log);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << active->help();
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n\n" << active->help();
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

} // namespace emoidx::cli

#include "emoidx/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <json.hpp>

#include "emoidx/atomic_file.hpp"
#include "emoidx/csv.hpp"
#include "emoidx/error.hpp"

namespace emoidx {

using json = nlohmann::json;

void ModelSpec::validate() const {
    if (n_changepoints < 0) throw ConfigError("n_changepoints must be >= 0");
    if (!(changepoint_range > 0.0 && changepoint_range <= 1.0)) {
        throw ConfigError("changepoint_range must be in (0, 1]");
    }
    if (yearly_order < 0) throw ConfigError("yearly_order must be >= 0");
    if (!(ridge_trend >= 0.0) || !(ridge_seasonal >= 0.0)) throw ConfigError("ridge weights must be >= 0");
    if (!(outlier_mad_k >= 0.0)) throw ConfigError("outlier_mad_k must be >= 0");
}

namespace {

double scaled_time(Day d, Day first, Day last) {
    const double span = static_cast<double>((last - first).count());
    return span > 0.0 ? static_cast<double>((d - first).count()) / span : 0.0;
}

// Fills one design row for day d.
void basis_row(Day d, const ColumnLayout& layout, Day first, Day last, std::span<const Day> changepoints,
               double* row) {
    const double t = scaled_time(d, first, last);
    row[0] = 1.0;
    row[1] = t;
    for (std::size_t j = 0; j < layout.n_changepoints; ++j) {
        row[layout.hinge_begin() + j] = std::max(0.0, t - scaled_time(changepoints[j], first, last));
    }
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(day_number(d)) / kYearDays;
    for (std::size_t m = 1; m <= layout.yearly_order; ++m) {
        const double a = static_cast<double>(m) * phase;
        row[layout.fourier_begin() + 2 * (m - 1)] = std::cos(a);
        row[layout.fourier_begin() + 2 * (m - 1) + 1] = std::sin(a);
    }
    if (layout.weekly) {
        const int wd = weekday_index(d);
        for (int j = 0; j < 6; ++j) {
            row[layout.weekly_begin() + static_cast<std::size_t>(j)] = wd == j ? 1.0 : (wd == 6 ? -1.0 : 0.0);
        }
    }
}

std::vector<Day> place_changepoints(std::span<const Day> days, const ModelSpec& spec) {
    const auto hist = static_cast<std::size_t>(std::floor(static_cast<double>(days.size()) * spec.changepoint_range));
    std::size_t n = static_cast<std::size_t>(spec.n_changepoints);
    if (hist < 2) return {};
    n = std::min(n, hist - 1);
    std::vector<Day> out;
    for (std::size_t j = 1; j <= n; ++j) {
        const auto idx = static_cast<std::size_t>(
            std::llround(static_cast<double>(j) * static_cast<double>(hist - 1) / static_cast<double>(n)));
        out.push_back(days[idx]);
    }
    return out;
}

Eigen::VectorXd penalty_vector(const ColumnLayout& layout, const ModelSpec& spec) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.size()));
    for (std::size_t j = layout.hinge_begin(); j < layout.fourier_begin(); ++j) {
        p[static_cast<Eigen::Index>(j)] = spec.ridge_trend;
    }
    for (std::size_t j = layout.fourier_begin(); j < layout.size(); ++j) {
        p[static_cast<Eigen::Index>(j)] = spec.ridge_seasonal;
    }
    return p;
}

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<long>(mid)));
    }
    return m;
}

} // namespace

Design build_design(std::span<const Day> days, const ModelSpec& spec) {
    spec.validate();
    if (days.size() < kMinFitDays) {
        throw DataError("need at least " + std::to_string(kMinFitDays) + " days to fit, got " +
                        std::to_string(days.size()));
    }
    for (std::size_t i = 1; i < days.size(); ++i) {
        if (!(days[i - 1] < days[i])) throw DataError("design days must be strictly increasing");
    }
    Design d;
    d.first = days.front();
    d.last = days.back();
    d.changepoints = place_changepoints(days, spec);
    d.layout = {d.changepoints.size(), static_cast<std::size_t>(spec.yearly_order), spec.weekly};
    const auto cols = static_cast<Eigen::Index>(d.layout.size());
    // Row-major staging so each row is filled contiguously.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(static_cast<Eigen::Index>(days.size()),
                                                                             cols);
    for (std::size_t i = 0; i < days.size(); ++i) {
        basis_row(days[i], d.layout, d.first, d.last, d.changepoints, m.row(static_cast<Eigen::Index>(i)).data());
    }
    d.matrix = m;
    return d;
}

Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& penalty) {
    // QR on the stacked system [X; sqrt(P)] b = [y; 0].
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    Eigen::Index extra = 0;
    for (Eigen::Index j = 0; j < p; ++j) extra += penalty[j] > 0.0 ? 1 : 0;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + extra, p);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + extra);
    a.topRows(n) = x;
    b.head(n) = y;
    Eigen::Index r = n;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (penalty[j] > 0.0) a(r++, j) = std::sqrt(penalty[j]);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-12);
    if (qr.rank() < p) {
        throw DataError("singular least-squares system (rank " + std::to_string(qr.rank()) + " < " +
                        std::to_string(p) + " columns)");
    }
    return qr.solve(b);
}

namespace {

ModelFit solve_on(const std::vector<Day>& days, const std::vector<double>& values, const ModelSpec& spec) {
    const Design design = build_design(days, spec);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    const Eigen::VectorXd beta = ridge_solve(design.matrix, y, penalty_vector(design.layout, spec));
    ModelFit f;
    f.spec = spec;
    f.layout = design.layout;
    f.first = design.first;
    f.last = design.last;
    f.changepoints = design.changepoints;
    f.coefficients.assign(beta.data(), beta.data() + beta.size());
    f.n_observations = days.size();
    return f;
}

} // namespace

ModelFit fit(const DayValues& series, const ModelSpec& spec) {
    spec.validate();
    if (series.size() < kMinFitDays) {
        throw DataError("need at least " + std::to_string(kMinFitDays) + " non-gap days to fit, got " +
                        std::to_string(series.size()));
    }
    std::vector<Day> days;
    std::vector<double> values;
    days.reserve(series.size());
    values.reserve(series.size());
    for (const auto& [d, v] : series) {
        days.push_back(d);
        values.push_back(v);
    }
    ModelFit first_pass = solve_on(days, values, spec);
    if (spec.outlier_mad_k <= 0.0) return first_pass;

    std::vector<double> residuals(days.size());
    double scale = 0.0;
    for (std::size_t i = 0; i < days.size(); ++i) {
        residuals[i] = values[i] - first_pass.predict(days[i]);
        scale = std::max(scale, std::abs(values[i]));
    }
    const double med = median(residuals);
    std::vector<double> dev(residuals.size());
    for (std::size_t i = 0; i < residuals.size(); ++i) dev[i] = std::abs(residuals[i] - med);
    const double threshold = spec.outlier_mad_k * median(dev);
    // An exact fit leaves only rounding noise in the residuals; nothing to gate.
    if (threshold <= 1e-12 * (1.0 + scale)) return first_pass;

    std::vector<Day> kept_days;
    std::vector<double> kept_values;
    for (std::size_t i = 0; i < days.size(); ++i) {
        if (std::abs(residuals[i]) <= threshold) {
            kept_days.push_back(days[i]);
            kept_values.push_back(values[i]);
        }
    }
    const std::size_t dropped = days.size() - kept_days.size();
    if (dropped == 0 || kept_days.size() < kMinFitDays) return first_pass;
    ModelFit refit = solve_on(kept_days, kept_values, spec);
    refit.n_outliers = dropped;
    return refit;
}

double ModelFit::trend(Day d) const {
    const double t = scaled_time(d, first, last);
    double v = coefficients[0] + coefficients[1] * t;
    for (std::size_t j = 0; j < layout.n_changepoints; ++j) {
        v += coefficients[layout.hinge_begin() + j] * std::max(0.0, t - scaled_time(changepoints[j], first, last));
    }
    return v;
}

double ModelFit::yearly(Day d) const {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(day_number(d)) / kYearDays;
    double v = 0.0;
    for (std::size_t m = 1; m <= layout.yearly_order; ++m) {
        const double a = static_cast<double>(m) * phase;
        v += coefficients[layout.fourier_begin() + 2 * (m - 1)] * std::cos(a) +
             coefficients[layout.fourier_begin() + 2 * (m - 1) + 1] * std::sin(a);
    }
    return v;
}

std::array<double, 7> ModelFit::weekly_effects() const {
    std::array<double, 7> w{};
    if (!layout.weekly) return w;
    double sum = 0.0;
    for (std::size_t j = 0; j < 6; ++j) {
        w[j] = coefficients[layout.weekly_begin() + j];
        sum += w[j];
    }
    w[6] = -sum;
    return w;
}

double ModelFit::weekly(Day d) const {
    if (!layout.weekly) return 0.0;
    return weekly_effects()[static_cast<std::size_t>(weekday_index(d))];
}

double ModelFit::final_slope_per_day() const {
    double slope = coefficients[1];
    for (std::size_t j = 0; j < layout.n_changepoints; ++j) slope += coefficients[layout.hinge_begin() + j];
    const double span = static_cast<double>((last - first).count());
    return span > 0.0 ? slope / span : 0.0;
}

DayValues predict(const ModelFit& fit, std::span<const Day> days) {
    DayValues out;
    for (Day d : days) out[d] = fit.predict(d);
    return out;
}

double Decomposition::identity_error(Day d) const {
    return (((observed.at(d) - trend.at(d)) - yearly.at(d)) - weekly.at(d)) - residual.at(d);
}

Decomposition make_decomposition(const DayValues& observed, const DayValues& trend, const DayValues& yearly,
                                 const DayValues& weekly) {
    Decomposition out{observed, trend, yearly, weekly, {}};
    for (const auto& [d, y] : observed) {
        // Summing components back up can round when they nearly cancel the
        // observation; a subtraction chain identical to identity_error() cannot.
        out.residual.emplace_hint(out.residual.end(), d, ((y - trend.at(d)) - yearly.at(d)) - weekly.at(d));
    }
    return out;
}

DecomposeResult decompose(const DayValues& series, const ModelSpec& spec) {
    DecomposeResult out{fit(series, spec), {}};
    DayValues trend;
    DayValues yearly;
    DayValues weekly;
    for (const auto& [d, v] : series) {
        trend.emplace_hint(trend.end(), d, out.fit.trend(d));
        yearly.emplace_hint(yearly.end(), d, out.fit.yearly(d));
        weekly.emplace_hint(weekly.end(), d, out.fit.weekly(d));
    }
    out.parts = make_decomposition(series, trend, yearly, weekly);
    return out;
}

std::string fit_to_json(const ModelFit& f) {
    json j;
    j["spec"] = {{"n_changepoints", f.spec.n_changepoints}, {"changepoint_range", f.spec.changepoint_range},
                 {"yearly_order", f.spec.yearly_order},     {"weekly", f.spec.weekly},
                 {"ridge_trend", f.spec.ridge_trend},       {"ridge_seasonal", f.spec.ridge_seasonal},
                 {"outlier_mad_k", f.spec.outlier_mad_k}};
    j["train_first"] = format_date(f.first);
    j["train_last"] = format_date(f.last);
    json cps = json::array();
    for (Day d : f.changepoints) cps.push_back(format_date(d));
    j["changepoints"] = cps;
    j["coefficients"] = f.coefficients;
    j["n_observations"] = f.n_observations;
    j["n_outliers"] = f.n_outliers;
    return j.dump(2) + "\n";
}

ModelFit fit_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        ModelFit f;
        const json& s = j.at("spec");
        f.spec.n_changepoints = s.at("n_changepoints").get<int>();
        f.spec.changepoint_range = s.at("changepoint_range").get<double>();
        f.spec.yearly_order = s.at("yearly_order").get<int>();
        f.spec.weekly = s.at("weekly").get<bool>();
        f.spec.ridge_trend = s.at("ridge_trend").get<double>();
        f.spec.ridge_seasonal = s.at("ridge_seasonal").get<double>();
        f.spec.outlier_mad_k = s.at("outlier_mad_k").get<double>();
        f.spec.validate();
        f.first = parse_date(j.at("train_first").get<std::string>());
        f.last = parse_date(j.at("train_last").get<std::string>());
        for (const auto& c : j.at("changepoints")) f.changepoints.push_back(parse_date(c.get<std::string>()));
        f.coefficients = j.at("coefficients").get<std::vector<double>>();
        f.n_observations = j.value("n_observations", std::size_t{0});
        f.n_outliers = j.value("n_outliers", std::size_t{0});
        f.layout = {f.changepoints.size(), static_cast<std::size_t>(f.spec.yearly_order), f.spec.weekly};
        if (f.coefficients.size() != f.layout.size()) {
            throw DataError("model fit: expected " + std::to_string(f.layout.size()) + " coefficients, got " +
                            std::to_string(f.coefficients.size()));
        }
        if (f.last < f.first) throw DataError("model fit: training span is inverted");
        return f;
    } catch (const json::exception& e) {
        throw DataError(std::string("model fit: malformed JSON: ") + e.what());
    } catch (const ConfigError& e) {
        throw DataError(std::string("model fit: invalid spec: ") + e.what());
    }
}

void write_decomposition_csv(const std::map<Emotion, Decomposition>& parts, const std::filesystem::path& path) {
    std::set<Day> days;
    for (const auto& [e, p] : parts) {
        for (const auto& [d, v] : p.observed) days.insert(d);
    }
    AtomicFile f(path);
    auto& out = f.stream();
    out << "date,emotion,observed,trend,yearly,weekly,residual\n";
    for (Day d : days) {
        const std::string date = format_date(d);
        for (const auto& [e, p] : parts) {
            const auto it = p.observed.find(d);
            if (it == p.observed.end()) continue;
            out << date << ',' << to_string(e) << ',' << csv::format_double(it->second) << ','
                << csv::format_double(p.trend.at(d)) << ',' << csv::format_double(p.yearly.at(d)) << ','
                << csv::format_double(p.weekly.at(d)) << ',' << csv::format_double(p.residual.at(d)) << '\n';
        }
    }
    f.commit();
}

std::map<Emotion, Decomposition> load_decomposition_csv(const std::filesystem::path& path) {
    const csv::Table t = csv::read(path);
    const std::size_t c_date = csv::column(t, "date");
    const std::size_t c_emotion = csv::column(t, "emotion");
    const std::array<std::size_t, 5> cols = {csv::column(t, "observed"), csv::column(t, "trend"),
                                             csv::column(t, "yearly"), csv::column(t, "weekly"),
                                             csv::column(t, "residual")};
    std::map<Emotion, Decomposition> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        try {
            const Emotion e = emotion_from_string(row[c_emotion]);
            const Day d = parse_date(row[c_date]);
            Decomposition& p = out[e];
            if (!p.observed.emplace(d, csv::parse_double(row[cols[0]])).second) {
                throw DataError("duplicate row for (" + row[c_date] + ", " + row[c_emotion] + ")");
            }
            p.trend[d] = csv::parse_double(row[cols[1]]);
            p.yearly[d] = csv::parse_double(row[cols[2]]);
            p.weekly[d] = csv::parse_double(row[cols[3]]);
            p.residual[d] = csv::parse_double(row[cols[4]]);
        } catch (const DataError& err) {
            throw DataError(path.string() + ":" + std::to_string(t.lines[r]) + ": " + err.what());
        }
    }
    if (out.empty()) throw DataError(path.string() + ": no decomposition rows");
    return out;
}

} // namespace emoidx

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emoidx/calendar.hpp"
#include "emoidx/emotion.hpp"

namespace emoidx {

inline constexpr double kYearDays = 365.25;
inline constexpr std::size_t kMinFitDays = 14;

struct ModelSpec {
    int n_changepoints = 25;
    double changepoint_range = 0.8;
    int yearly_order = 10;
    bool weekly = true;
    double ridge_trend = 0.05;
    double ridge_seasonal = 1e-4;
    double outlier_mad_k = 5.0;

    // Throws ConfigError.
    void validate() const;
    bool operator==(const ModelSpec&) const = default;
};

// Column layout: [1, t, hinge_1..hinge_C, cos_1, sin_1, ..., cos_M, sin_M,
// dow_0..dow_5]. The seventh weekday (Sunday) is coded -1 in every dow column.
struct ColumnLayout {
    std::size_t n_changepoints = 0;
    std::size_t yearly_order = 0;
    bool weekly = false;

    std::size_t hinge_begin() const { return 2; }
    std::size_t fourier_begin() const { return 2 + n_changepoints; }
    std::size_t weekly_begin() const { return fourier_begin() + 2 * yearly_order; }
    std::size_t size() const { return weekly_begin() + (weekly ? 6 : 0); }
};

struct Design {
    ColumnLayout layout;
    Day first{};
    Day last{};
    std::vector<Day> changepoints;
    Eigen::MatrixXd matrix;  // one row per input day
};

// Throws DataError with fewer than 14 days or non-increasing days.
Design build_design(std::span<const Day> days, const ModelSpec& spec);

struct ModelFit {
    ModelSpec spec;
    ColumnLayout layout;
    Day first{};
    Day last{};
    std::vector<Day> changepoints;
    std::vector<double> coefficients;
    std::size_t n_observations = 0;
    std::size_t n_outliers = 0;  // dropped by the robust refit

    double trend(Day d) const;
    double yearly(Day d) const;
    double weekly(Day d) const;
    double predict(Day d) const { return trend(d) + yearly(d) + weekly(d); }

    // Per-weekday effect, Monday first; sums to zero.
    std::array<double, 7> weekly_effects() const;
    // Slope of the trend, per day, after the last changepoint.
    double final_slope_per_day() const;
};

// Ridge least squares: changepoint deltas penalized by ridge_trend, Fourier
// and weekday coefficients by ridge_seasonal, intercept and slope free.
// Optional single MAD-gated refit. Throws DataError on too few days or a
// singular system.
ModelFit fit(const DayValues& series, const ModelSpec& spec);

// Solves min |y - X b|^2 + sum penalty_i b_i^2. Exposed for verification.
Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& penalty);

DayValues predict(const ModelFit& fit, std::span<const Day> days);

struct Decomposition {
    DayValues observed;
    DayValues trend;
    DayValues yearly;
    DayValues weekly;
    DayValues residual;

    // observed - trend - yearly - weekly - residual, evaluated left to right.
    // Zero on every day: the residual is defined by the same chain.
    double identity_error(Day d) const;
};

// Builds a Decomposition with residual = ((observed - trend) - yearly) - weekly.
Decomposition make_decomposition(const DayValues& observed, const DayValues& trend, const DayValues& yearly,
                                 const DayValues& weekly);

struct DecomposeResult {
    ModelFit fit;
    Decomposition parts;
};

DecomposeResult decompose(const DayValues& series, const ModelSpec& spec);

std::string fit_to_json(const ModelFit& fit);
ModelFit fit_from_json(std::string_view text);

void write_decomposition_csv(const std::map<Emotion, Decomposition>& parts, const std::filesystem::path& path);
std::map<Emotion, Decomposition> load_decomposition_csv(const std::filesystem::path& path);

} // namespace emoidx

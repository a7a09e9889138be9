#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "twotier/timeseries.hpp"

namespace twotier::local {

inline constexpr std::size_t kDefaultWindowLength = 8;
inline constexpr std::size_t kDefaultMaxHarmonic = 2;

/// The n most recent residuals R(m-n+1) ... R(m).
struct ResidualWindow {
    std::vector<double> values;
    std::size_t anchor_index = 0;  // m, sample index of the newest residual

    [[nodiscard]] std::size_t window_length() const noexcept { return values.size(); }
};

/// Least-squares Fourier fit over one residual window.
/// coefficients = [a0, a1, b1, ..., aL, bL].
struct DfsFit {
    std::vector<double> coefficients;
    std::size_t max_harmonic = kDefaultMaxHarmonic;
    std::size_t window_length = kDefaultWindowLength;
    std::size_t anchor_index = 0;

    [[nodiscard]] double a(std::size_t i) const { return coefficients[i == 0 ? 0 : 2 * i - 1]; }
    [[nodiscard]] double b(std::size_t i) const { return coefficients[2 * i]; }
};

struct CorrectedForecast {
    std::vector<double> values;
    std::size_t corrected_from = 0;
};

/// Prediction minus measurement; positive means over-prediction.
constexpr double residual(double predicted, double measured) noexcept { return predicted - measured; }

/// Builds the window ending at `anchor_index` from a forecast and measurement.
ResidualWindow residual_window(std::span<const double> predicted, std::span<const double> measured,
                               std::size_t anchor_index, std::size_t window_length);

/// Row v (1-based): [1, cos(2 pi v/n), sin(2 pi v/n), ..., cos(2 pi L v/n), sin(2 pi L v/n)].
/// Throws Error(Underdetermined) if 2L + 1 > n.
Eigen::MatrixXd design_matrix(std::size_t window_length, std::size_t max_harmonic);

/// Householder QR least squares; never forms (F^T F)^-1.
DfsFit fit_dfs(const ResidualWindow& window, std::size_t max_harmonic = kDefaultMaxHarmonic);

/// Fitted residual at window position k (1-based, any integer; n-periodic).
double eval_dfs(const DfsFit& fit, long long k);

/// Subtracts the periodic extension of the fitted residual from every sample
/// after `current_index`, clamping at zero. Earlier samples are untouched.
CorrectedForecast correct_remaining(std::span<const double> global_forecast, const DfsFit& fit,
                                    std::size_t current_index);

struct CorrectionStep {
    DfsFit fit;
    CorrectedForecast remaining;
};

struct DaySimulation {
    /// Realized one-step-ahead series: sample m+1 takes the correction
    /// computed at m. Samples up to n - 1 equal the global forecast.
    std::vector<double> corrected;
    /// One entry per anchor m = n-1 ... last-1.
    std::vector<CorrectionStep> steps;
    std::size_t window_length = kDefaultWindowLength;
    std::size_t max_harmonic = kDefaultMaxHarmonic;

    /// Fit used to produce corrected[sample], or nullptr if uncorrected.
    [[nodiscard]] const DfsFit* fit_for_sample(std::size_t sample) const noexcept;
};

/// Replays a day sample by sample, refitting on residuals of the global
/// forecast against measurements.
DaySimulation simulate_day(std::span<const double> global_forecast, const DayProfile& measured,
                           std::size_t window_length = kDefaultWindowLength,
                           std::size_t max_harmonic = kDefaultMaxHarmonic);

}  // namespace twotier::local

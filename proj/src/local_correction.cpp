#include "twotier/local_correction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "twotier/error.hpp"

namespace twotier::local {

namespace {

void check_solvable(std::size_t window_length, std::size_t max_harmonic) {
    if (2 * max_harmonic + 1 > window_length) {
        throw Error(ErrorKind::Underdetermined,
                    std::to_string(2 * max_harmonic + 1) + " coefficients exceed window length " +
                        std::to_string(window_length));
    }
}

}  // namespace

ResidualWindow residual_window(std::span<const double> predicted, std::span<const double> measured,
                               std::size_t anchor_index, std::size_t window_length) {
    if (predicted.size() != measured.size()) {
        throw Error(ErrorKind::GridMismatch, "forecast and measurement lengths differ");
    }
    if (window_length == 0 || anchor_index + 1 < window_length || anchor_index >= predicted.size()) {
        throw Error(ErrorKind::IndexOutOfDay, "no full window ends at sample " +
                                                  std::to_string(anchor_index));
    }
    ResidualWindow window;
    window.anchor_index = anchor_index;
    window.values.reserve(window_length);
    for (std::size_t s = anchor_index + 1 - window_length; s <= anchor_index; ++s) {
        window.values.push_back(residual(predicted[s], measured[s]));
    }
    return window;
}

Eigen::MatrixXd design_matrix(std::size_t window_length, std::size_t max_harmonic) {
    check_solvable(window_length, max_harmonic);
    const auto n = static_cast<Eigen::Index>(window_length);
    const auto cols = static_cast<Eigen::Index>(2 * max_harmonic + 1);
    Eigen::MatrixXd f(n, cols);
    for (Eigen::Index v = 1; v <= n; ++v) {
        f(v - 1, 0) = 1.0;
        for (Eigen::Index i = 1; i <= static_cast<Eigen::Index>(max_harmonic); ++i) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((i * v) % n) /
                                 static_cast<double>(n);
            f(v - 1, 2 * i - 1) = std::cos(angle);
            f(v - 1, 2 * i) = std::sin(angle);
        }
    }
    return f;
}

DfsFit fit_dfs(const ResidualWindow& window, std::size_t max_harmonic) {
    const auto n = window.window_length();
    check_solvable(n, max_harmonic);
    const Eigen::Map<const Eigen::VectorXd> s(window.values.data(), static_cast<Eigen::Index>(n));
    if (!s.allFinite()) throw Error(ErrorKind::NumericalFailure, "non-finite residual");

    const Eigen::MatrixXd f = design_matrix(n, max_harmonic);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(f);
    if (qr.rank() != f.cols()) throw Error(ErrorKind::NumericalFailure, "rank-deficient basis");
    const Eigen::VectorXd c = qr.solve(s);
    if (!c.allFinite()) throw Error(ErrorKind::NumericalFailure, "non-finite coefficients");

    return DfsFit{std::vector<double>(c.data(), c.data() + c.size()), max_harmonic, n,
                  window.anchor_index};
}

double eval_dfs(const DfsFit& fit, long long k) {
    const auto n = static_cast<long long>(fit.window_length);
    // reduce first so periodicity holds exactly, not just to rounding
    const long long phase = ((k % n) + n) % n;
    double value = fit.coefficients[0];
    for (std::size_t i = 1; i <= fit.max_harmonic; ++i) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(static_cast<long long>(i) * phase) /
                             static_cast<double>(n);
        value += fit.a(i) * std::cos(angle) + fit.b(i) * std::sin(angle);
    }
    return value;
}

CorrectedForecast correct_remaining(std::span<const double> global_forecast, const DfsFit& fit,
                                    std::size_t current_index) {
    if (current_index + 1 >= global_forecast.size()) {
        throw Error(ErrorKind::IndexOutOfDay, "sample " + std::to_string(current_index) +
                                                  " leaves nothing to correct");
    }
    CorrectedForecast out{std::vector<double>(global_forecast.begin(), global_forecast.end()),
                          current_index + 1};
    const auto n = static_cast<long long>(fit.window_length);
    for (std::size_t l = current_index + 1; l < out.values.size(); ++l) {
        const auto phase = n + static_cast<long long>(l - current_index);
        // residual = forecast - measured, so the expected residual is removed
        out.values[l] = std::max(0.0, global_forecast[l] - eval_dfs(fit, phase));
    }
    return out;
}

const DfsFit* DaySimulation::fit_for_sample(std::size_t sample) const noexcept {
    if (sample < window_length) return nullptr;
    const auto step = sample - window_length;
    return step < steps.size() ? &steps[step].fit : nullptr;
}

DaySimulation simulate_day(std::span<const double> global_forecast, const DayProfile& measured,
                           std::size_t window_length, std::size_t max_harmonic) {
    if (global_forecast.size() != measured.samples.size()) {
        throw Error(ErrorKind::GridMismatch, "forecast has " +
                                                 std::to_string(global_forecast.size()) +
                                                 " samples, measurement " +
                                                 std::to_string(measured.samples.size()));
    }
    check_solvable(window_length, max_harmonic);

    DaySimulation sim;
    sim.window_length = window_length;
    sim.max_harmonic = max_harmonic;
    sim.corrected.assign(global_forecast.begin(), global_forecast.end());

    const auto last = global_forecast.size();
    for (std::size_t m = window_length - 1; m + 1 < last; ++m) {
        const auto window = residual_window(global_forecast, measured.samples, m, window_length);
        auto fit = fit_dfs(window, max_harmonic);
        auto remaining = correct_remaining(global_forecast, fit, m);
        sim.corrected[m + 1] = remaining.values[m + 1];
        sim.steps.push_back(CorrectionStep{std::move(fit), std::move(remaining)});
    }
    return sim;
}

}  // namespace twotier::local

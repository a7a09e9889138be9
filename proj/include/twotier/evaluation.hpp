#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twotier/error.hpp"
#include "twotier/knn.hpp"
#include "twotier/nn.hpp"
#include "twotier/timeseries.hpp"

namespace twotier::eval {

/// Root mean squared error, averaged over the number of samples compared.
double rmse(std::span<const double> predicted, std::span<const double> actual);

/// 100 * (baseline - improved) / baseline; empty when baseline is not positive.
std::optional<double> improvement_percent(double baseline, double improved);

/// One tuning axis, normalized so the largest available RMSE maps to 1.
struct TuneGrid {
    std::string axis;
    std::vector<std::size_t> candidates;
    std::vector<std::optional<double>> raw_rmse;    // empty = unavailable
    std::vector<std::optional<double>> normalized;
    std::optional<std::size_t> best;                // position of the minimum raw RMSE
    double reference_rmse = 0.0;                    // raw value mapped to 1

    [[nodiscard]] std::optional<std::size_t> best_candidate() const {
        if (!best) return std::nullopt;
        return candidates[*best];
    }
};

/// Normalizes and selects the minimum; ties go to the earliest candidate.
TuneGrid make_grid(std::string axis, std::vector<std::size_t> candidates,
                   std::vector<std::optional<double>> raw_rmse);

struct KnnTuning {
    std::vector<std::size_t> depths;
    std::vector<std::size_t> neighbors;
    std::vector<std::vector<std::optional<double>>> raw;  // [depth][neighbor]
    std::size_t best_depth = 0;
    std::size_t best_neighbors = 0;
    TuneGrid depth_grid;     // RMSE over D at the best k
    TuneGrid neighbor_grid;  // RMSE over k at the best D
};

struct NnTuning {
    TuneGrid grid;
    std::vector<std::vector<double>> per_restart;  // [candidate][restart]
};

/// Mean of per-day RMSEs of `forecaster` over the days of `target`.
/// Days whose forecast throws InsufficientHistory are skipped; returns
/// std::nullopt if every day was skipped.
template <typename Forecaster>
std::optional<double> average_day_rmse(const SolarSeries& target, Forecaster&& forecaster);

/// Grid search over (D, k): fit on the train split, score the tune split.
/// Ties are broken by smaller D, then smaller k.
KnnTuning tune_knn(const SolarSeries& series, const DatasetSplit& split,
                   const std::vector<std::size_t>& depth_candidates,
                   const std::vector<std::size_t>& neighbor_candidates);

/// For each hidden size: `restarts` independent LM trainings, tune RMSE
/// averaged across them.
NnTuning tune_nn(const SolarSeries& series, const DatasetSplit& split,
                 const std::vector<std::size_t>& hidden_candidates, const nn::NnConfig& base,
                 std::size_t restarts);

inline constexpr std::array<const char*, 4> kMethodLabels = {"knn", "nn", "knn+local", "nn+local"};

struct DayEval {
    Date date{};
    std::size_t day_index = 0;
    std::array<double, 4> rmse{};  // order of kMethodLabels
};

struct Improvement {
    std::string baseline;
    std::string improved;
    std::optional<double> percent;
};

struct EvalReport {
    std::vector<DayEval> days;
    std::array<double, 4> average{};
    std::vector<Improvement> improvements;
    std::vector<std::string> notices;
};

struct CorrectionParams {
    std::size_t window_length = 8;
    std::size_t max_harmonic = 2;
};

/// Four-way comparison over the days of `test`, with history from `series`.
EvalReport compare_methods(const SolarSeries& series, const SolarSeries& test,
                           const knn::KnnModel& knn_model, const nn::NnModel& nn_model,
                           const CorrectionParams& correction);

void write_report_csv(const EvalReport& report, std::ostream& sink);
void write_report_text(const EvalReport& report, std::ostream& sink);

/// Table layout: title line, candidate row, normalized RMSE row, footnote
/// "RMSE <raw> is normalized to 1".
void write_tune_table(const TuneGrid& grid, const std::string& title, std::ostream& sink);
void write_tune_csv(const KnnTuning& knn, const NnTuning& nn, std::ostream& sink);

// -- implementation of the template ---------------------------------------

template <typename Forecaster>
std::optional<double> average_day_rmse(const SolarSeries& target, Forecaster&& forecaster) {
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& day : target.days()) {
        std::vector<double> predicted;
        try {
            predicted = forecaster(day.day_index);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::InsufficientHistory) continue;
            throw;
        }
        total += rmse(predicted, day.samples);
        ++count;
    }
    if (count == 0) return std::nullopt;
    return total / static_cast<double>(count);
}

}  // namespace twotier::eval

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "twotier/timeseries.hpp"

namespace twotier::knn {

struct KnnConfig {
    std::size_t depth_days = 5;  // D: days of history per context
    std::size_t neighbors = 2;   // k: blended neighbors, at least 2

    /// Throws Error(InvalidArgument) on depth 0 or fewer than 2 neighbors.
    void validate() const;
};

struct TrainingPair {
    std::size_t day_index = 0;  // day the target belongs to
    std::vector<double> context;
    std::vector<double> target;
};

/// Stored (context, next-day) pairs. Immutable after construction.
class KnnModel {
public:
    /// Validates shapes and the k + 1 pair minimum; throws Error otherwise.
    KnnModel(KnnConfig config, std::vector<TrainingPair> pairs);

    [[nodiscard]] const KnnConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::vector<TrainingPair>& pairs() const noexcept { return pairs_; }
    [[nodiscard]] std::size_t context_length() const noexcept { return pairs_.front().context.size(); }
    [[nodiscard]] std::size_t target_length() const noexcept { return pairs_.front().target.size(); }

private:
    KnnConfig config_;
    std::vector<TrainingPair> pairs_;
};

/// One pair per train day that has depth_days predecessors inside `train`.
KnnModel fit(const SolarSeries& train, const KnnConfig& config);

/// Similarity weights for the k nearest neighbors given the k + 1 smallest
/// distances in ascending order. Falls back to uniform weights when all
/// k + 1 distances coincide.
std::vector<double> neighbor_weights(std::span<const double> sorted_distances);

struct Neighbor {
    std::size_t pair_position = 0;
    double distance = 0.0;
};

/// The k + 1 nearest stored pairs, ascending by Euclidean distance with ties
/// broken by ascending day index.
std::vector<Neighbor> nearest(const KnnModel& model, std::span<const double> context);

/// Weighted blend of the k nearest targets.
std::vector<double> predict_day(const KnnModel& model, std::span<const double> context);

/// Day-ahead forecast for `target_day` using the preceding days in `history`.
std::vector<double> forecast(const KnnModel& model, const SolarSeries& history,
                             std::size_t target_day);

}  // namespace twotier::knn

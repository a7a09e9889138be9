#include "twotier/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "twotier/error.hpp"

namespace twotier::knn {

void KnnConfig::validate() const {
    if (depth_days == 0) throw Error(ErrorKind::InvalidArgument, "depth_days must be positive");
    // k = 1 reduces the weighted blend to plain nearest-neighbor lookup
    if (neighbors < 2) throw Error(ErrorKind::InvalidArgument, "neighbors must be at least 2");
}

KnnModel::KnnModel(KnnConfig config, std::vector<TrainingPair> pairs)
    : config_(config), pairs_(std::move(pairs)) {
    config_.validate();
    if (pairs_.size() < config_.neighbors + 1) {
        throw Error(ErrorKind::InsufficientTrainingDays,
                    "need at least " + std::to_string(config_.neighbors + 1) + " pairs, have " +
                        std::to_string(pairs_.size()));
    }
    const auto clen = pairs_.front().context.size();
    const auto tlen = pairs_.front().target.size();
    if (tlen == 0 || clen != config_.depth_days * tlen) {
        throw Error(ErrorKind::DimensionMismatch, "context length must be depth_days x target length");
    }
    for (const auto& p : pairs_) {
        if (p.context.size() != clen || p.target.size() != tlen) {
            throw Error(ErrorKind::DimensionMismatch, "pairs have inconsistent lengths");
        }
    }
}

KnnModel fit(const SolarSeries& train, const KnnConfig& config) {
    config.validate();
    const auto needed = config.depth_days + config.neighbors + 1;
    if (train.size() < needed) {
        throw Error(ErrorKind::InsufficientTrainingDays,
                    "need at least " + std::to_string(needed) + " training days, have " +
                        std::to_string(train.size()));
    }
    std::vector<TrainingPair> pairs;
    pairs.reserve(train.size() - config.depth_days);
    for (std::size_t pos = config.depth_days; pos < train.size(); ++pos) {
        const auto& target = train[pos];
        pairs.push_back(TrainingPair{target.day_index,
                                     day_context(train, target.day_index, config.depth_days),
                                     target.samples});
    }
    return KnnModel(config, std::move(pairs));
}

std::vector<double> neighbor_weights(std::span<const double> sorted_distances) {
    if (sorted_distances.size() < 2) {
        throw Error(ErrorKind::InvalidArgument, "need k + 1 >= 2 distances");
    }
    if (!std::is_sorted(sorted_distances.begin(), sorted_distances.end())) {
        throw Error(ErrorKind::UnsortedDistances, "distances must be ascending");
    }
    const auto k = sorted_distances.size() - 1;
    const double far = sorted_distances[k];
    const double span = far - sorted_distances.front();
    std::vector<double> weights(k, 1.0);
    if (span <= 0.0) return weights;
    for (std::size_t l = 0; l < k; ++l) weights[l] = (far - sorted_distances[l]) / span;
    return weights;
}

std::vector<Neighbor> nearest(const KnnModel& model, std::span<const double> context) {
    if (context.size() != model.context_length()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "context length " + std::to_string(context.size()) + ", model expects " +
                        std::to_string(model.context_length()));
    }
    const auto& pairs = model.pairs();
    std::vector<Neighbor> all(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < context.size(); ++j) {
            const double d = context[j] - pairs[i].context[j];
            sq += d * d;
        }
        all[i] = Neighbor{i, std::sqrt(sq)};
    }
    const auto count = model.config().neighbors + 1;
    std::partial_sort(all.begin(), all.begin() + static_cast<long>(count), all.end(),
                      [&](const Neighbor& a, const Neighbor& b) {
                          if (a.distance != b.distance) return a.distance < b.distance;
                          return pairs[a.pair_position].day_index < pairs[b.pair_position].day_index;
                      });
    all.resize(count);
    return all;
}

std::vector<double> predict_day(const KnnModel& model, std::span<const double> context) {
    const auto near = nearest(model, context);
    std::vector<double> distances(near.size());
    std::transform(near.begin(), near.end(), distances.begin(),
                   [](const Neighbor& n) { return n.distance; });
    const auto weights = neighbor_weights(distances);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

    std::vector<double> out(model.target_length(), 0.0);
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const auto& target = model.pairs()[near[l].pair_position].target;
        const double w = weights[l] / total;
        for (std::size_t m = 0; m < out.size(); ++m) out[m] += w * target[m];
    }
    return out;
}

std::vector<double> forecast(const KnnModel& model, const SolarSeries& history,
                             std::size_t target_day) {
    const auto context = day_context(history, target_day, model.config().depth_days);
    return predict_day(model, context);
}

}  // namespace twotier::knn

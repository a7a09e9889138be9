#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "twotier/timeseries.hpp"

namespace twotier::nn {

struct NnConfig {
    std::size_t hidden_neurons = 6;
    std::size_t restarts = 10;
    double lm_initial_damping = 1e-3;
    double lm_damping_factor = 10.0;
    std::size_t max_iterations = 200;
    double loss_tolerance = 1e-9;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// Damping ceiling; once exceeded the LM loop stops.
inline constexpr double kMaxDamping = 1e10;

using Input = std::array<double, 2>;

/// Two inputs, one tanh hidden layer, linear output. Inputs and output are
/// normalized by scale_max.
///
/// Flat parameter order, used by the Jacobian and the LM solver:
///   hidden weights row-major (h0.x0, h0.x1, h1.x0, ...), hidden biases,
///   output weights, output bias.
struct NnModel {
    static constexpr std::size_t kInputWidth = 2;

    Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor> hidden_weights;
    Eigen::VectorXd hidden_biases;
    Eigen::VectorXd output_weights;
    double output_bias = 0.0;
    double scale_max = 1.0;
    std::size_t samples_per_day = 96;
    NnConfig config;

    [[nodiscard]] std::size_t hidden() const noexcept {
        return static_cast<std::size_t>(hidden_biases.size());
    }
    [[nodiscard]] std::size_t parameter_count() const noexcept { return 4 * hidden() + 1; }

    [[nodiscard]] Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& theta);

    /// Throws Error(InvariantViolation) on non-finite weights, bad shapes or
    /// non-positive scale.
    void validate() const;
};

/// Weights i.i.d. uniform in [-0.5, 0.5]; bit-identical for a given seed.
NnModel build(const NnConfig& config, std::uint64_t seed);

double forward(const NnModel& model, const Input& input);

/// Analytic d forward / d theta; rows follow `batch`.
Eigen::MatrixXd jacobian(const NnModel& model, std::span<const Input> batch);

struct Sample {
    Input input{};
    double target = 0.0;
};

struct TrainTrace {
    std::vector<double> losses;     // sum-squared error of every trial step
    std::vector<bool> accepted;     // parallel to losses
    double initial_loss = 0.0;
    double final_damping = 0.0;

    /// Initial loss followed by the loss after each accepted step.
    [[nodiscard]] std::vector<double> accepted_losses() const;
};

struct TrainResult {
    NnModel model;
    TrainTrace trace;
};

/// Levenberg-Marquardt on the sum of squared errors with damping lambda * I.
TrainResult train_lm(const NnModel& model, std::span<const Sample> samples, const NnConfig& config);

/// Per-instant samples ([P_{d-1}(m), P_{d-2}(m)], P_d(m)), normalized by scale.
std::vector<Sample> day_ahead_samples(const SolarSeries& train, double scale);

double training_rmse(const NnModel& model, std::span<const Sample> samples);

/// Best of `config.restarts` LM runs, selected by training RMSE with ties
/// going to the lowest restart index.
NnModel fit_day_ahead(const SolarSeries& train, const NnConfig& config);

std::vector<double> predict_day(const NnModel& model, const DayProfile& prev_day,
                                const DayProfile& prev_prev_day);

/// Day-ahead forecast for `target_day` from its two predecessors in `history`.
std::vector<double> forecast(const NnModel& model, const SolarSeries& history,
                             std::size_t target_day);

}  // namespace twotier::nn

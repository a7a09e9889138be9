#include "twotier/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twotier/error.hpp"
#include "twotier/random.hpp"

namespace twotier::nn {

namespace {

constexpr double kMinDamping = 1e-15;

Eigen::VectorXd residuals(const NnModel& model, std::span<const Sample> samples) {
    Eigen::VectorXd e(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        e[static_cast<Eigen::Index>(i)] = samples[i].target - forward(model, samples[i].input);
    }
    return e;
}

double sum_squared(const NnModel& model, std::span<const Sample> samples) {
    double sse = 0.0;
    for (const auto& s : samples) {
        const double e = s.target - forward(model, s.input);
        sse += e * e;
    }
    return sse;
}

}  // namespace

void NnConfig::validate() const {
    if (hidden_neurons < 1 || hidden_neurons > 64) {
        throw Error(ErrorKind::InvalidArgument, "hidden_neurons must be in [1, 64]");
    }
    if (restarts < 1) throw Error(ErrorKind::InvalidArgument, "restarts must be positive");
    if (!(lm_initial_damping > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "lm_initial_damping must be positive");
    }
    if (!(lm_damping_factor > 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "lm_damping_factor must exceed 1");
    }
    if (!(loss_tolerance > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "loss_tolerance must be positive");
    }
}

Eigen::VectorXd NnModel::parameters() const {
    const auto h = static_cast<Eigen::Index>(hidden());
    Eigen::VectorXd theta(static_cast<Eigen::Index>(parameter_count()));
    for (Eigen::Index i = 0; i < h; ++i) {
        theta[2 * i] = hidden_weights(i, 0);
        theta[2 * i + 1] = hidden_weights(i, 1);
    }
    theta.segment(2 * h, h) = hidden_biases;
    theta.segment(3 * h, h) = output_weights;
    theta[4 * h] = output_bias;
    return theta;
}

void NnModel::set_parameters(const Eigen::VectorXd& theta) {
    const auto h = static_cast<Eigen::Index>(hidden());
    for (Eigen::Index i = 0; i < h; ++i) {
        hidden_weights(i, 0) = theta[2 * i];
        hidden_weights(i, 1) = theta[2 * i + 1];
    }
    hidden_biases = theta.segment(2 * h, h);
    output_weights = theta.segment(3 * h, h);
    output_bias = theta[4 * h];
}

void NnModel::validate() const {
    const auto h = hidden_biases.size();
    if (h < 1 || h > 64 || hidden_weights.rows() != h || output_weights.size() != h) {
        throw Error(ErrorKind::InvariantViolation, "inconsistent network shape");
    }
    if (!hidden_weights.allFinite() || !hidden_biases.allFinite() || !output_weights.allFinite() ||
        !std::isfinite(output_bias)) {
        throw Error(ErrorKind::InvariantViolation, "non-finite weight");
    }
    if (!(scale_max > 0.0) || !std::isfinite(scale_max)) {
        throw Error(ErrorKind::InvariantViolation, "scale_max must be positive");
    }
    if (samples_per_day == 0) throw Error(ErrorKind::InvariantViolation, "samples_per_day is zero");
}

NnModel build(const NnConfig& config, std::uint64_t seed) {
    config.validate();
    const auto h = static_cast<Eigen::Index>(config.hidden_neurons);
    Rng rng(seed);
    auto draw = [&] { return rng.uniform(-0.5, 0.5); };

    NnModel model;
    model.hidden_weights.resize(h, 2);
    model.hidden_biases.resize(h);
    model.output_weights.resize(h);
    for (Eigen::Index i = 0; i < h; ++i) {
        model.hidden_weights(i, 0) = draw();
        model.hidden_weights(i, 1) = draw();
    }
    for (Eigen::Index i = 0; i < h; ++i) model.hidden_biases[i] = draw();
    for (Eigen::Index i = 0; i < h; ++i) model.output_weights[i] = draw();
    model.output_bias = draw();
    model.config = config;
    model.config.rng_seed = seed;
    return model;
}

double forward(const NnModel& model, const Input& input) {
    double out = model.output_bias;
    for (Eigen::Index i = 0; i < model.hidden_biases.size(); ++i) {
        const double z = model.hidden_weights(i, 0) * input[0] +
                         model.hidden_weights(i, 1) * input[1] + model.hidden_biases[i];
        out += model.output_weights[i] * std::tanh(z);
    }
    return out;
}

Eigen::MatrixXd jacobian(const NnModel& model, std::span<const Input> batch) {
    const auto h = static_cast<Eigen::Index>(model.hidden());
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(batch.size()),
                        static_cast<Eigen::Index>(model.parameter_count()));
    for (std::size_t r = 0; r < batch.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        const auto& x = batch[r];
        for (Eigen::Index i = 0; i < h; ++i) {
            const double a = std::tanh(model.hidden_weights(i, 0) * x[0] +
                                       model.hidden_weights(i, 1) * x[1] + model.hidden_biases[i]);
            const double delta = model.output_weights[i] * (1.0 - a * a);
            jac(row, 2 * i) = delta * x[0];
            jac(row, 2 * i + 1) = delta * x[1];
            jac(row, 2 * h + i) = delta;
            jac(row, 3 * h + i) = a;
        }
        jac(row, 4 * h) = 1.0;
    }
    return jac;
}

std::vector<double> TrainTrace::accepted_losses() const {
    std::vector<double> out{initial_loss};
    for (std::size_t i = 0; i < losses.size(); ++i) {
        if (accepted[i]) out.push_back(losses[i]);
    }
    return out;
}

TrainResult train_lm(const NnModel& model, std::span<const Sample> samples, const NnConfig& config) {
    if (samples.empty()) throw Error(ErrorKind::EmptyInput, "no training samples");
    config.validate();

    TrainResult result{model, {}};
    NnModel& current = result.model;
    TrainTrace& trace = result.trace;

    std::vector<Input> inputs(samples.size());
    std::transform(samples.begin(), samples.end(), inputs.begin(),
                   [](const Sample& s) { return s.input; });

    double lambda = config.lm_initial_damping;
    double loss = sum_squared(current, samples);
    trace.initial_loss = loss;

    for (std::size_t iter = 0; iter < config.max_iterations && loss > 0.0; ++iter) {
        const Eigen::MatrixXd jac = jacobian(current, inputs);
        const Eigen::VectorXd err = residuals(current, samples);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * err;
        const Eigen::VectorXd theta = current.parameters();

        bool accepted = false;
        bool exhausted = false;
        double previous = loss;
        while (!accepted && !exhausted) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal().array() += lambda;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
            Eigen::VectorXd step;
            bool solved = ldlt.info() == Eigen::Success && ldlt.isPositive();
            if (solved) {
                step = ldlt.solve(grad);
                solved = step.allFinite();
            }
            if (!solved) {
                lambda *= config.lm_damping_factor;
                if (lambda > kMaxDamping) {
                    throw Error(ErrorKind::SingularStep, "damped normal equations unsolvable");
                }
                continue;
            }

            NnModel trial = current;
            trial.set_parameters(theta + step);
            const double trial_loss = sum_squared(trial, samples);
            accepted = std::isfinite(trial_loss) && trial_loss < loss;
            trace.losses.push_back(trial_loss);
            trace.accepted.push_back(accepted);
            if (accepted) {
                current = std::move(trial);
                loss = trial_loss;
                lambda = std::max(lambda / config.lm_damping_factor, kMinDamping);
            } else {
                lambda *= config.lm_damping_factor;
                exhausted = lambda > kMaxDamping;
            }
        }
        if (exhausted) break;
        if (previous - loss <= config.loss_tolerance * previous) break;
    }
    trace.final_damping = lambda;
    return result;
}

std::vector<Sample> day_ahead_samples(const SolarSeries& train, double scale) {
    std::vector<Sample> out;
    if (train.size() < 3) return out;
    const auto spd = train.grid().samples_per_day();
    out.reserve((train.size() - 2) * spd);
    for (std::size_t d = 2; d < train.size(); ++d) {
        const auto& today = train[d].samples;
        const auto& prev = train[d - 1].samples;
        const auto& prev2 = train[d - 2].samples;
        for (std::size_t m = 0; m < spd; ++m) {
            out.push_back(Sample{{prev[m] / scale, prev2[m] / scale}, today[m] / scale});
        }
    }
    return out;
}

double training_rmse(const NnModel& model, std::span<const Sample> samples) {
    if (samples.empty()) throw Error(ErrorKind::EmptyInput, "no samples");
    return std::sqrt(sum_squared(model, samples) / static_cast<double>(samples.size()));
}

NnModel fit_day_ahead(const SolarSeries& train, const NnConfig& config) {
    config.validate();
    if (train.size() < 3) {
        throw Error(ErrorKind::InsufficientTrainingDays,
                    "need at least 3 training days, have " + std::to_string(train.size()));
    }
    const double peak = train.max_power();
    const double scale = peak > 0.0 ? peak : 1.0;
    const auto samples = day_ahead_samples(train, scale);

    NnModel best;
    double best_rmse = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < config.restarts; ++r) {
        auto candidate = build(config, derive_seed(config.rng_seed, r));
        candidate.scale_max = scale;
        candidate.samples_per_day = train.grid().samples_per_day();
        auto trained = train_lm(candidate, samples, config).model;
        const double rmse = training_rmse(trained, samples);
        if (r == 0 || rmse < best_rmse) {
            best = std::move(trained);
            best_rmse = rmse;
        }
    }
    best.config = config;
    return best;
}

std::vector<double> predict_day(const NnModel& model, const DayProfile& prev_day,
                                const DayProfile& prev_prev_day) {
    if (prev_day.samples.size() != model.samples_per_day ||
        prev_prev_day.samples.size() != model.samples_per_day) {
        throw Error(ErrorKind::GridMismatch, "day profiles do not match the model grid of " +
                                                 std::to_string(model.samples_per_day) +
                                                 " samples");
    }
    std::vector<double> out(model.samples_per_day);
    for (std::size_t m = 0; m < out.size(); ++m) {
        const Input x{prev_day.samples[m] / model.scale_max,
                      prev_prev_day.samples[m] / model.scale_max};
        out[m] = std::max(0.0, forward(model, x) * model.scale_max);
    }
    return out;
}

std::vector<double> forecast(const NnModel& model, const SolarSeries& history,
                             std::size_t target_day) {
    if (target_day < 2 || !history.contains(target_day - 1) || !history.contains(target_day - 2)) {
        throw Error(ErrorKind::InsufficientHistory,
                    "day " + std::to_string(target_day) + " lacks two preceding days");
    }
    return predict_day(model, history.day(target_day - 1), history.day(target_day - 2));
}

}  // namespace twotier::nn

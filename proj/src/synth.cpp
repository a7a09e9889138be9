#include "twotier/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "twotier/error.hpp"
#include "twotier/random.hpp"

namespace twotier::synth {

namespace {

constexpr int kSmoothRadius = 2;

std::vector<double> smooth(const std::vector<double>& raw) {
    const auto size = static_cast<int>(raw.size());
    std::vector<double> out(raw.size());
    for (int m = 0; m < size; ++m) {
        double sum = 0.0;
        for (int j = -kSmoothRadius; j <= kSmoothRadius; ++j) {
            sum += raw[static_cast<std::size_t>(std::clamp(m + j, 0, size - 1))];
        }
        out[static_cast<std::size_t>(m)] = sum / (2 * kSmoothRadius + 1);
    }
    return out;
}

// Multiplicative attenuation in [0, 1] for one cloudy day.
std::vector<double> attenuation(const SynthConfig& config, double cloudiness, Rng& rng) {
    const auto spd = config.grid.samples_per_day();
    const double overcast =
        cloudiness * rng.uniform(config.overcast_depth_min, config.overcast_depth_max);
    std::vector<double> factor(spd, 1.0 - overcast);
    const int events = std::max(1, rng.poisson(config.cloud_event_rate * cloudiness));
    const int earliest = static_cast<int>(config.sunrise_index) -
                         static_cast<int>(config.event_max_samples) / 2;
    for (int e = 0; e < events; ++e) {
        const int start = rng.uniform_int(earliest, static_cast<int>(config.sunset_index));
        const int length = rng.uniform_int(static_cast<int>(config.event_min_samples),
                                           static_cast<int>(config.event_max_samples));
        const double depth = cloudiness * rng.uniform(config.cloud_depth_min, config.cloud_depth_max);
        for (int m = std::max(start, 0); m < std::min(start + length, static_cast<int>(spd)); ++m) {
            factor[static_cast<std::size_t>(m)] *= 1.0 - depth;
        }
    }
    return smooth(factor);
}

}  // namespace

void SynthConfig::validate() const {
    const auto spd = grid.samples_per_day();
    if (!(peak_power_w > 0.0)) throw Error(ErrorKind::InvalidArgument, "peak_power_w must be positive");
    if (sunrise_index >= sunset_index || sunset_index >= spd) {
        throw Error(ErrorKind::InvalidArgument, "need sunrise < sunset within the day grid");
    }
    if (!(cloudy_probability >= 0.0 && cloudy_probability <= 1.0) ||
        !(min_cloudiness >= 0.0 && min_cloudiness <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "probabilities must lie in [0, 1]");
    }
    if (!(cloud_depth_min >= 0.0 && cloud_depth_min <= cloud_depth_max && cloud_depth_max <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "cloud depth range must lie in [0, 1]");
    }
    if (!(overcast_depth_min >= 0.0 && overcast_depth_min <= overcast_depth_max &&
          overcast_depth_max <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "overcast depth range must lie in [0, 1]");
    }
    if (!(cloud_event_rate >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative event rate");
    if (event_min_samples < 1 || event_min_samples > event_max_samples) {
        throw Error(ErrorKind::InvalidArgument, "bad cloud event length range");
    }
    if (!start_date.ok()) throw Error(ErrorKind::InvalidArgument, "invalid start date");
}

std::string_view to_string(DayLabel label) noexcept {
    return label == DayLabel::Sunny ? "sunny" : "cloudy";
}

std::vector<double> clear_sky(const SynthConfig& config) {
    config.validate();
    std::vector<double> bell(config.grid.samples_per_day(), 0.0);
    const auto width = config.sunset_index - config.sunrise_index;
    for (std::size_t m = config.sunrise_index; m <= config.sunset_index; ++m) {
        const auto j = m - config.sunrise_index;
        // fold onto the rising half so both halves are bit-identical
        const auto folded = std::min(j, width - j);
        bell[m] = folded == 0 ? 0.0
                              : config.peak_power_w *
                                    std::sin(std::numbers::pi * static_cast<double>(folded) /
                                             static_cast<double>(width));
    }
    return bell;
}

SynthResult generate(const SynthConfig& config, std::size_t num_days, std::uint64_t seed) {
    if (num_days == 0) throw Error(ErrorKind::InvalidArgument, "num_days must be at least 1");
    const auto bell = clear_sky(config);
    Rng rng(seed);

    std::vector<DayProfile> days;
    std::vector<DayLabel> labels;
    std::vector<double> cloudiness;
    Date date = config.start_date;
    for (std::size_t d = 0; d < num_days; ++d, date = next_day(date)) {
        DayProfile day{d, date, bell};
        const bool cloudy = rng.uniform() < config.cloudy_probability;
        double level = 0.0;
        if (cloudy) {
            level = rng.uniform(config.min_cloudiness, 1.0);
            const auto factor = attenuation(config, level, rng);
            for (std::size_t m = 0; m < day.samples.size(); ++m) {
                day.samples[m] = std::clamp(bell[m] * factor[m], 0.0, config.peak_power_w);
            }
        }
        days.push_back(std::move(day));
        labels.push_back(cloudy ? DayLabel::Cloudy : DayLabel::Sunny);
        cloudiness.push_back(level);
    }
    return SynthResult{SolarSeries(config.grid, std::move(days)), std::move(labels),
                       std::move(cloudiness)};
}

void export_labels(const SynthResult& result, std::ostream& sink) {
    sink << "date,label\n";
    for (std::size_t i = 0; i < result.labels.size(); ++i) {
        sink << format_date(result.series[i].date) << ',' << to_string(result.labels[i]) << '\n';
    }
}

}  // namespace twotier::synth

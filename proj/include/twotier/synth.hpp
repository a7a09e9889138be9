#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "twotier/timeseries.hpp"

namespace twotier::synth {

/// Parameters of the clear-sky bell and the cloud process. Sample indices
/// refer to `grid`.
struct SynthConfig {
    SamplingGrid grid{900};
    double peak_power_w = 35000.0;
    std::size_t sunrise_index = 26;  // 06:30 on a 15-min grid
    std::size_t sunset_index = 72;   // 18:00
    double cloudy_probability = 0.5;  // chance that a day is cloudy
    double min_cloudiness = 0.3;      // cloudiness of a cloudy day is drawn from [min, 1]
    double cloud_event_rate = 4.0;    // expected events on a fully cloudy day
    double cloud_depth_min = 0.2;     // attenuation fraction of one event
    double cloud_depth_max = 0.8;
    double overcast_depth_min = 0.3;  // day-long attenuation, scaled by cloudiness
    double overcast_depth_max = 0.7;
    std::size_t event_min_samples = 2;
    std::size_t event_max_samples = 32;
    Date start_date{std::chrono::year{2015}, std::chrono::February, std::chrono::day{15}};

    void validate() const;
};

enum class DayLabel { Sunny, Cloudy };

std::string_view to_string(DayLabel label) noexcept;

struct SynthResult {
    SolarSeries series;
    std::vector<DayLabel> labels;       // parallel to series days
    std::vector<double> cloudiness;     // 0 on sunny days
};

/// Half-sine bell between sunrise and sunset, exactly zero outside and
/// exactly symmetric about the midpoint.
std::vector<double> clear_sky(const SynthConfig& config);

/// Deterministic for a given (config, seed). Sunny days equal clear_sky().
SynthResult generate(const SynthConfig& config, std::size_t num_days, std::uint64_t seed);

/// Sidecar `date,label` file.
void export_labels(const SynthResult& result, std::ostream& sink);

}  // namespace twotier::synth

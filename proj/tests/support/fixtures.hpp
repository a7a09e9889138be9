#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <vector>

#include "twotier/timeseries.hpp"

namespace fixtures {

inline twotier::Date date(int y, unsigned m, unsigned d) {
    return twotier::Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

// A series whose sample (day, m) is value(day, m).
inline twotier::SolarSeries series(std::size_t days,
                                   const std::function<double(std::size_t, std::size_t)>& value,
                                   int interval = 900) {
    const twotier::SamplingGrid grid(interval);
    std::vector<twotier::DayProfile> out;
    auto d = date(2015, 2, 15);
    for (std::size_t i = 0; i < days; ++i) {
        twotier::DayProfile p;
        p.day_index = i;
        p.date = d;
        p.samples.resize(grid.samples_per_day());
        for (std::size_t m = 0; m < p.samples.size(); ++m) p.samples[m] = value(i, m);
        out.push_back(std::move(p));
        d = twotier::next_day(d);
    }
    return twotier::SolarSeries(grid, std::move(out));
}

}  // namespace fixtures

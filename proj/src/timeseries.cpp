#include "twotier/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "twotier/error.hpp"
#include "twotier/text.hpp"

namespace twotier {

namespace {

constexpr double kNegativeTolerance = 1.0;  // watts

std::optional<int> parse_digits(std::string_view s) {
    if (s.empty()) return std::nullopt;
    int v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return v;
}

std::optional<Date> try_parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto y = parse_digits(text.substr(0, 4));
    auto m = parse_digits(text.substr(5, 2));
    auto d = parse_digits(text.substr(8, 2));
    if (!y || !m || !d) return std::nullopt;
    Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
              std::chrono::day{static_cast<unsigned>(*d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

struct Timestamp {
    Date date;
    int seconds_of_day;
};

// Accepts YYYY-MM-DDTHH:MM[:SS] with 'T' or a space as separator.
std::optional<Timestamp> parse_timestamp(std::string_view text) {
    text = text::trim(text);
    if (text.size() < 16 || (text[10] != 'T' && text[10] != ' ')) return std::nullopt;
    auto date = try_parse_date(text.substr(0, 10));
    if (!date) return std::nullopt;
    auto clock = text.substr(11);
    if (clock.size() != 5 && clock.size() != 8) return std::nullopt;
    if (clock[2] != ':' || (clock.size() == 8 && clock[5] != ':')) return std::nullopt;
    auto hh = parse_digits(clock.substr(0, 2));
    auto mm = parse_digits(clock.substr(3, 2));
    auto ss = clock.size() == 8 ? parse_digits(clock.substr(6, 2)) : std::optional<int>{0};
    if (!hh || !mm || !ss || *hh > 23 || *mm > 59 || *ss > 59) return std::nullopt;
    return Timestamp{*date, *hh * 3600 + *mm * 60 + *ss};
}

std::string format_clock(int seconds_of_day) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", seconds_of_day / 3600,
                  (seconds_of_day / 60) % 60, seconds_of_day % 60);
    return buf;
}

}  // namespace

Date parse_date(std::string_view text) {
    auto date = try_parse_date(text::trim(text));
    if (!date) throw Error(ErrorKind::MalformedRow, "bad date '" + std::string(text) + "'");
    return *date;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

Date next_day(const Date& date) {
    return Date{std::chrono::sys_days{date} + std::chrono::days{1}};
}

SamplingGrid::SamplingGrid(int sample_interval_seconds) : interval_(sample_interval_seconds) {
    if (interval_ <= 0 || kSecondsPerDay % interval_ != 0) {
        throw Error(ErrorKind::InvalidArgument,
                    "sample interval " + std::to_string(interval_) + " s does not divide a day");
    }
}

SolarSeries::SolarSeries(SamplingGrid grid, std::vector<DayProfile> days)
    : grid_(grid), days_(std::move(days)) {
    const auto spd = grid_.samples_per_day();
    for (std::size_t pos = 0; pos < days_.size(); ++pos) {
        const auto& d = days_[pos];
        if (d.samples.size() != spd) {
            throw Error(ErrorKind::IncompleteDay, format_date(d.date) + " has " +
                                                      std::to_string(d.samples.size()) +
                                                      " samples, expected " + std::to_string(spd));
        }
        for (double v : d.samples) {
            if (!std::isfinite(v) || v < 0.0) {
                throw Error(ErrorKind::InvalidArgument,
                            "non-finite or negative sample on " + format_date(d.date));
            }
        }
        if (pos > 0) {
            const auto& prev = days_[pos - 1];
            if (d.date != next_day(prev.date) || d.day_index != prev.day_index + 1) {
                throw Error(ErrorKind::InvalidArgument,
                            "days not consecutive at " + format_date(d.date));
            }
        }
    }
}

bool SolarSeries::contains(std::size_t day_index) const noexcept {
    return !days_.empty() && day_index >= days_.front().day_index &&
           day_index <= days_.back().day_index;
}

const DayProfile& SolarSeries::day(std::size_t day_index) const {
    if (!contains(day_index)) {
        throw Error(ErrorKind::InsufficientHistory,
                    "day index " + std::to_string(day_index) + " not in series");
    }
    return days_[day_index - days_.front().day_index];
}

std::size_t SolarSeries::find(const Date& date) const noexcept {
    for (std::size_t pos = 0; pos < days_.size(); ++pos) {
        if (days_[pos].date == date) return pos;
    }
    return npos;
}

SolarSeries SolarSeries::slice(std::size_t begin, std::size_t end) const {
    end = std::min(end, days_.size());
    begin = std::min(begin, end);
    return SolarSeries(grid_, std::vector<DayProfile>(days_.begin() + static_cast<long>(begin),
                                                      days_.begin() + static_cast<long>(end)));
}

double SolarSeries::max_power() const noexcept {
    double peak = 0.0;
    for (const auto& d : days_) {
        for (double v : d.samples) peak = std::max(peak, v);
    }
    return peak;
}

SolarSeries ingest_csv(std::istream& source, const SamplingGrid& grid) {
    const auto spd = grid.samples_per_day();
    const int interval = grid.sample_interval_seconds();

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    // per date: samples plus a filled mask
    std::map<std::chrono::sys_days, std::pair<std::vector<double>, std::vector<bool>>> by_date;

    while (std::getline(source, line)) {
        ++line_no;
        auto row = text::trim(line);
        if (line_no == 1 && row.size() >= 3 && row.substr(0, 3) == "\xEF\xBB\xBF") row.remove_prefix(3);
        if (row.empty()) continue;
        if (!header_seen) {
            auto cols = text::split(row, ',');
            if (cols.size() != 2 || text::trim(cols[0]) != "timestamp" ||
                text::trim(cols[1]) != "power_w") {
                throw Error(ErrorKind::MalformedRow, "line 1: expected header 'timestamp,power_w'");
            }
            header_seen = true;
            continue;
        }
        const auto where = "line " + std::to_string(line_no) + ": ";
        auto cols = text::split(row, ',');
        if (cols.size() != 2) throw Error(ErrorKind::MalformedRow, where + "expected 2 columns");
        auto ts = parse_timestamp(cols[0]);
        if (!ts) throw Error(ErrorKind::MalformedRow, where + "bad timestamp");
        auto power = text::parse_double(cols[1]);
        if (!power || !std::isfinite(*power)) {
            throw Error(ErrorKind::MalformedRow, where + "non-numeric power");
        }
        if (ts->seconds_of_day % interval != 0) {
            throw Error(ErrorKind::GridMisalignment,
                        where + format_clock(ts->seconds_of_day) + " is not on the " +
                            std::to_string(interval) + " s grid");
        }
        double value = *power;
        if (value < -kNegativeTolerance) {
            throw Error(ErrorKind::NegativePower, where + "power " + text::format_double(value));
        }
        if (value < 0.0) value = 0.0;

        auto& slot = by_date[std::chrono::sys_days{ts->date}];
        if (slot.first.empty()) {
            slot.first.assign(spd, 0.0);
            slot.second.assign(spd, false);
        }
        const auto m = static_cast<std::size_t>(ts->seconds_of_day / interval);
        if (slot.second[m]) {
            throw Error(ErrorKind::MalformedRow, where + "duplicate timestamp");
        }
        slot.first[m] = value;
        slot.second[m] = true;
    }
    if (!header_seen) throw Error(ErrorKind::MalformedRow, "empty input: missing header");

    std::vector<DayProfile> days;
    if (by_date.empty()) return SolarSeries(grid, std::move(days));

    const auto first = by_date.begin()->first;
    const auto last = by_date.rbegin()->first;
    for (auto d = first; d <= last; d += std::chrono::days{1}) {
        auto it = by_date.find(d);
        if (it == by_date.end()) {
            throw Error(ErrorKind::IncompleteDay, format_date(Date{d}) + " has no samples");
        }
        const auto& mask = it->second.second;
        const auto missing = std::find(mask.begin(), mask.end(), false);
        if (missing != mask.end()) {
            const auto m = static_cast<int>(missing - mask.begin());
            throw Error(ErrorKind::IncompleteDay, format_date(Date{d}) + " is missing sample " +
                                                      format_clock(m * interval));
        }
        days.push_back(DayProfile{days.size(), Date{d}, std::move(it->second.first)});
    }
    return SolarSeries(grid, std::move(days));
}

SolarSeries ingest_csv_file(const std::string& path, const SamplingGrid& grid) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    return ingest_csv(in, grid);
}

void export_csv(const SolarSeries& series, std::ostream& sink) {
    const int interval = series.grid().sample_interval_seconds();
    sink << "timestamp,power_w\n";
    for (const auto& day : series.days()) {
        const auto date = format_date(day.date);
        for (std::size_t m = 0; m < day.samples.size(); ++m) {
            sink << date << 'T' << format_clock(static_cast<int>(m) * interval) << ','
                 << text::format_double(day.samples[m]) << '\n';
        }
    }
}

DatasetSplit split_chronological(const SolarSeries& series, const std::array<double, 3>& ratios) {
    for (double r : ratios) {
        if (!(r >= 0.0 && r <= 1.0)) {
            throw Error(ErrorKind::InvalidArgument, "split ratios must lie in [0, 1]");
        }
    }
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
        throw Error(ErrorKind::InvalidArgument, "split ratios must sum to 1");
    }
    const auto n = series.size();
    if (n < 5) {
        throw Error(ErrorKind::TooFewDays, "need at least 5 days, have " + std::to_string(n));
    }
    // 1e-9 guards products like 100 * 0.29 = 28.999999999999996
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios[0] + 1e-9));
    const auto n_tune = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios[1] + 1e-9));
    if (n_train == 0 || n_tune == 0 || n_train + n_tune >= n) {
        throw Error(ErrorKind::TooFewDays, "a partition of " + std::to_string(n) +
                                               " days would be empty");
    }
    return DatasetSplit{series.slice(0, n_train), series.slice(n_train, n_train + n_tune),
                        series.slice(n_train + n_tune, n), ratios};
}

std::vector<double> day_context(const SolarSeries& series, std::size_t target_day,
                                std::size_t depth_days) {
    if (series.empty() || depth_days == 0 || target_day < depth_days ||
        target_day - depth_days < series.days().front().day_index ||
        target_day - 1 > series.days().back().day_index) {
        throw Error(ErrorKind::InsufficientHistory,
                    "day " + std::to_string(target_day) + " lacks " + std::to_string(depth_days) +
                        " preceding days");
    }
    std::vector<double> context;
    context.reserve(depth_days * series.grid().samples_per_day());
    for (std::size_t d = target_day - depth_days; d < target_day; ++d) {
        const auto& s = series.day(d).samples;
        context.insert(context.end(), s.begin(), s.end());
    }
    return context;
}

}  // namespace twotier

#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace twotier {

using Date = std::chrono::year_month_day;

/// Parses YYYY-MM-DD. Throws Error(MalformedRow) on bad input.
Date parse_date(std::string_view text);
std::string format_date(const Date& date);
Date next_day(const Date& date);

/// Uniform sampling grid within one day.
class SamplingGrid {
public:
    static constexpr int kSecondsPerDay = 86400;

    /// Throws Error(InvalidArgument) unless the interval divides a day.
    explicit SamplingGrid(int sample_interval_seconds = 900);

    [[nodiscard]] int sample_interval_seconds() const noexcept { return interval_; }
    [[nodiscard]] std::size_t samples_per_day() const noexcept {
        return static_cast<std::size_t>(kSecondsPerDay / interval_);
    }

    friend bool operator==(const SamplingGrid&, const SamplingGrid&) = default;

private:
    int interval_;
};

/// One calendar day of power samples in watts.
struct DayProfile {
    std::size_t day_index = 0;
    Date date{};
    std::vector<double> samples;
};

/// Chronologically ordered, gap-free sequence of complete days on one grid.
/// Immutable after construction.
class SolarSeries {
public:
    /// Validates every invariant; throws Error on violation.
    SolarSeries(SamplingGrid grid, std::vector<DayProfile> days);

    [[nodiscard]] const SamplingGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] const std::vector<DayProfile>& days() const noexcept { return days_; }
    [[nodiscard]] std::size_t size() const noexcept { return days_.size(); }
    [[nodiscard]] bool empty() const noexcept { return days_.empty(); }
    [[nodiscard]] const DayProfile& operator[](std::size_t pos) const { return days_[pos]; }

    /// Day by its day_index (not its position). Throws InsufficientHistory
    /// if the index is not stored.
    [[nodiscard]] const DayProfile& day(std::size_t day_index) const;
    [[nodiscard]] bool contains(std::size_t day_index) const noexcept;

    /// Position of the day with the given date, or npos.
    [[nodiscard]] std::size_t find(const Date& date) const noexcept;

    /// Contiguous sub-range [begin, end) by position; day indices preserved.
    [[nodiscard]] SolarSeries slice(std::size_t begin, std::size_t end) const;

    [[nodiscard]] double max_power() const noexcept;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    SamplingGrid grid_;
    std::vector<DayProfile> days_;
};

/// Train/tune/test partitions. Each is a slice of the same underlying series,
/// so day indices remain globally meaningful.
struct DatasetSplit {
    SolarSeries train;
    SolarSeries tune;
    SolarSeries test;
    std::array<double, 3> ratios{};
};

/// Reads `timestamp,power_w` CSV. Rows are grouped by calendar date; every
/// date between the first and last must be complete.
SolarSeries ingest_csv(std::istream& source, const SamplingGrid& grid);
SolarSeries ingest_csv_file(const std::string& path, const SamplingGrid& grid);

/// Mirror of ingest_csv. Powers are written as shortest round-trip decimals.
void export_csv(const SolarSeries& series, std::ostream& sink);

/// Train and tune sizes are floor(N * ratio); test gets the remainder.
DatasetSplit split_chronological(const SolarSeries& series, const std::array<double, 3>& ratios);

/// Concatenation of the depth_days profiles preceding target_day, oldest first.
std::vector<double> day_context(const SolarSeries& series, std::size_t target_day,
                                std::size_t depth_days);

}  // namespace twotier

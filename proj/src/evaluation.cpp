#include "twotier/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "twotier/local_correction.hpp"
#include "twotier/random.hpp"
#include "twotier/text.hpp"

namespace twotier::eval {

double rmse(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size()) {
        throw Error(ErrorKind::LengthMismatch, std::to_string(predicted.size()) + " vs " +
                                                   std::to_string(actual.size()) + " samples");
    }
    if (predicted.empty()) throw Error(ErrorKind::EmptyInput, "rmse of zero samples");
    double sq = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - actual[i];
        sq += d * d;
    }
    return std::sqrt(sq / static_cast<double>(predicted.size()));
}

std::optional<double> improvement_percent(double baseline, double improved) {
    if (!(baseline > 0.0)) return std::nullopt;
    return 100.0 * (baseline - improved) / baseline;
}

TuneGrid make_grid(std::string axis, std::vector<std::size_t> candidates,
                   std::vector<std::optional<double>> raw_rmse) {
    TuneGrid grid{std::move(axis), std::move(candidates), std::move(raw_rmse), {}, {}, 0.0};
    grid.normalized.resize(grid.raw_rmse.size());
    double reference = 0.0;
    for (std::size_t i = 0; i < grid.raw_rmse.size(); ++i) {
        const auto& v = grid.raw_rmse[i];
        if (!v) continue;
        reference = std::max(reference, *v);
        if (!grid.best || *v < *grid.raw_rmse[*grid.best]) grid.best = i;
    }
    grid.reference_rmse = reference;
    for (std::size_t i = 0; i < grid.raw_rmse.size(); ++i) {
        const auto& v = grid.raw_rmse[i];
        if (!v) continue;
        // all-zero grid: every candidate is equally perfect
        grid.normalized[i] = reference > 0.0 ? *v / reference : 1.0;
    }
    return grid;
}

KnnTuning tune_knn(const SolarSeries& series, const DatasetSplit& split,
                   const std::vector<std::size_t>& depth_candidates,
                   const std::vector<std::size_t>& neighbor_candidates) {
    if (split.tune.empty() || depth_candidates.empty() || neighbor_candidates.empty()) {
        throw Error(ErrorKind::InvalidArgument, "empty tune split or candidate list");
    }
    KnnTuning out;
    out.depths = depth_candidates;
    out.neighbors = neighbor_candidates;
    out.raw.assign(depth_candidates.size(),
                   std::vector<std::optional<double>>(neighbor_candidates.size()));

    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (std::size_t di = 0; di < depth_candidates.size(); ++di) {
        for (std::size_t ki = 0; ki < neighbor_candidates.size(); ++ki) {
            const knn::KnnConfig config{depth_candidates[di], neighbor_candidates[ki]};
            std::optional<knn::KnnModel> model;
            try {
                model.emplace(knn::fit(split.train, config));
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::InsufficientTrainingDays) throw;
                continue;
            }
            auto score = average_day_rmse(split.tune, [&](std::size_t day) {
                return knn::forecast(*model, series, day);
            });
            out.raw[di][ki] = score;
            if (!score) continue;
            if (!best) {
                best = {di, ki};
                continue;
            }
            const double incumbent = *out.raw[best->first][best->second];
            const bool better =
                *score < incumbent ||
                (*score == incumbent &&
                 (depth_candidates[di] < depth_candidates[best->first] ||
                  (depth_candidates[di] == depth_candidates[best->first] &&
                   neighbor_candidates[ki] < neighbor_candidates[best->second])));
            if (better) best = {di, ki};
        }
    }
    if (!best) {
        throw Error(ErrorKind::InsufficientTrainingDays, "no (D, k) candidate could be evaluated");
    }
    out.best_depth = depth_candidates[best->first];
    out.best_neighbors = neighbor_candidates[best->second];

    std::vector<std::optional<double>> over_depth;
    for (const auto& row : out.raw) over_depth.push_back(row[best->second]);
    out.depth_grid = make_grid("D", depth_candidates, std::move(over_depth));
    out.neighbor_grid = make_grid("k", neighbor_candidates, out.raw[best->first]);
    return out;
}

NnTuning tune_nn(const SolarSeries& series, const DatasetSplit& split,
                 const std::vector<std::size_t>& hidden_candidates, const nn::NnConfig& base,
                 std::size_t restarts) {
    if (split.tune.empty() || hidden_candidates.empty() || restarts == 0) {
        throw Error(ErrorKind::InvalidArgument, "empty tune split, candidate list or restarts");
    }
    if (split.train.size() < 3) {
        throw Error(ErrorKind::InsufficientTrainingDays, "NN tuning needs at least 3 train days");
    }
    const double peak = split.train.max_power();
    const double scale = peak > 0.0 ? peak : 1.0;
    const auto samples = nn::day_ahead_samples(split.train, scale);

    NnTuning out;
    std::vector<std::optional<double>> averages;
    for (std::size_t ci = 0; ci < hidden_candidates.size(); ++ci) {
        nn::NnConfig config = base;
        config.hidden_neurons = hidden_candidates[ci];
        std::vector<double> runs;
        for (std::size_t r = 0; r < restarts; ++r) {
            const auto seed = derive_seed(base.rng_seed, hidden_candidates[ci] * 1000 + r);
            auto model = nn::build(config, seed);
            model.scale_max = scale;
            model.samples_per_day = series.grid().samples_per_day();
            model = nn::train_lm(model, samples, config).model;
            auto score = average_day_rmse(split.tune, [&](std::size_t day) {
                return nn::forecast(model, series, day);
            });
            if (score) runs.push_back(*score);
        }
        out.per_restart.push_back(runs);
        if (runs.empty()) {
            averages.emplace_back();
        } else {
            double total = 0.0;
            for (double v : runs) total += v;
            averages.emplace_back(total / static_cast<double>(runs.size()));
        }
    }
    out.grid = make_grid("N", hidden_candidates, std::move(averages));
    return out;
}

EvalReport compare_methods(const SolarSeries& series, const SolarSeries& test,
                           const knn::KnnModel& knn_model, const nn::NnModel& nn_model,
                           const CorrectionParams& correction) {
    if (test.empty()) throw Error(ErrorKind::EmptyInput, "empty test split");
    EvalReport report;
    for (const auto& day : test.days()) {
        std::vector<double> knn_global;
        std::vector<double> nn_global;
        try {
            knn_global = knn::forecast(knn_model, series, day.day_index);
            nn_global = nn::forecast(nn_model, series, day.day_index);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InsufficientHistory) throw;
            report.notices.push_back("skipped " + format_date(day.date) + ": insufficient history");
            continue;
        }
        const auto knn_two_tier = local::simulate_day(knn_global, day, correction.window_length,
                                                      correction.max_harmonic);
        const auto nn_two_tier = local::simulate_day(nn_global, day, correction.window_length,
                                                     correction.max_harmonic);
        report.days.push_back(DayEval{day.date, day.day_index,
                                      {rmse(knn_global, day.samples), rmse(nn_global, day.samples),
                                       rmse(knn_two_tier.corrected, day.samples),
                                       rmse(nn_two_tier.corrected, day.samples)}});
    }
    if (report.days.empty()) {
        throw Error(ErrorKind::InsufficientHistory, "no test day has enough history");
    }
    for (std::size_t c = 0; c < 4; ++c) {
        double total = 0.0;
        for (const auto& d : report.days) total += d.rmse[c];
        report.average[c] = total / static_cast<double>(report.days.size());
    }
    report.improvements.push_back(
        {kMethodLabels[0], kMethodLabels[2], improvement_percent(report.average[0], report.average[2])});
    report.improvements.push_back(
        {kMethodLabels[1], kMethodLabels[3], improvement_percent(report.average[1], report.average[3])});
    return report;
}

namespace {

std::string percent_text(const std::optional<double>& p, int decimals) {
    return p ? text::format_fixed(*p, decimals) : std::string("n/a");
}

std::string cell_text(const std::optional<double>& v) {
    if (!v) return "n/a";
    if (*v == 1.0) return "1";
    return text::format_fixed(*v, 3);
}

}  // namespace

void write_report_csv(const EvalReport& report, std::ostream& sink) {
    sink << "date";
    for (const auto* label : kMethodLabels) sink << ',' << label;
    sink << '\n';
    for (const auto& d : report.days) {
        sink << format_date(d.date);
        for (double v : d.rmse) sink << ',' << text::format_double(v);
        sink << '\n';
    }
    sink << "average";
    for (double v : report.average) sink << ',' << text::format_double(v);
    sink << '\n';
    for (const auto& imp : report.improvements) {
        sink << "improvement_percent:" << imp.baseline << "->" << imp.improved << ','
             << (imp.percent ? text::format_double(*imp.percent) : std::string("n/a")) << '\n';
    }
}

void write_report_text(const EvalReport& report, std::ostream& sink) {
    sink << "RMSE COMPARISON OVER TEST DAYS (W)\n";
    sink << std::left << std::setw(12) << "date";
    for (const auto* label : kMethodLabels) sink << std::right << std::setw(12) << label;
    sink << '\n';
    auto row = [&](const std::string& name, const std::array<double, 4>& values) {
        sink << std::left << std::setw(12) << name;
        for (double v : values) sink << std::right << std::setw(12) << text::format_fixed(v, 1);
        sink << '\n';
    };
    for (const auto& d : report.days) row(format_date(d.date), d.rmse);
    row("average", report.average);
    for (const auto& imp : report.improvements) {
        sink << imp.improved << " vs " << imp.baseline << ": " << percent_text(imp.percent, 2)
             << (imp.percent ? " percent improvement\n" : "\n");
    }
    for (const auto& note : report.notices) sink << "note: " << note << '\n';
}

void write_tune_table(const TuneGrid& grid, const std::string& title, std::ostream& sink) {
    sink << title << '\n';
    sink << std::left << std::setw(8) << grid.axis;
    for (auto c : grid.candidates) sink << std::right << std::setw(8) << c;
    sink << '\n' << std::left << std::setw(8) << "RMSE";
    for (const auto& v : grid.normalized) sink << std::right << std::setw(8) << cell_text(v);
    sink << '\n';
    sink << "RMSE " << text::format_fixed(grid.reference_rmse, 1) << " is normalized to 1\n";
}

void write_tune_csv(const KnnTuning& knn, const NnTuning& nn, std::ostream& sink) {
    sink << "method,depth_days,neighbors,hidden_neurons,raw_rmse\n";
    auto value = [](const std::optional<double>& v) {
        return v ? text::format_double(*v) : std::string("n/a");
    };
    for (std::size_t di = 0; di < knn.depths.size(); ++di) {
        for (std::size_t ki = 0; ki < knn.neighbors.size(); ++ki) {
            sink << "knn," << knn.depths[di] << ',' << knn.neighbors[ki] << ",," << value(knn.raw[di][ki])
                 << '\n';
        }
    }
    for (std::size_t i = 0; i < nn.grid.candidates.size(); ++i) {
        sink << "nn,,," << nn.grid.candidates[i] << ',' << value(nn.grid.raw_rmse[i]) << '\n';
    }
}

}  // namespace twotier::eval

#include "twotier/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "twotier/config.hpp"
#include "twotier/error.hpp"
#include "twotier/evaluation.hpp"
#include "twotier/local_correction.hpp"
#include "twotier/persistence.hpp"
#include "twotier/synth.hpp"
#include "twotier/text.hpp"
#include "twotier/timeseries.hpp"

namespace twotier::cli {

namespace fs = std::filesystem;

namespace {

class BadReference : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr std::string_view kKnnFile = "knn.htm-model";
constexpr std::string_view kNnFile = "nn.htm-model";

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::TooFewDays:
        case ErrorKind::InsufficientHistory:
        case ErrorKind::InsufficientTrainingDays:
            return kInsufficientData;
        case ErrorKind::InvalidArgument:
        case ErrorKind::Underdetermined:
            return kUsage;
        default:
            return kIo;
    }
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write " + path.string());
    out << content;
    if (!out.flush()) throw std::ios_base::failure("write failed for " + path.string());
}

std::string dashed(std::string_view key) {
    std::string out(key);
    for (auto& c : out) {
        if (c == '_') c = '-';
    }
    return out;
}

struct Options {
    std::optional<std::string> config_path;
    std::vector<std::pair<std::string, std::string>> overrides;  // (key, flag value)
    std::vector<std::string> flag_values;                         // one per config key

    // subcommand arguments
    std::size_t days = 0;
    std::string out;
    std::string labels;
    std::string data;
    std::string models;
    std::string day;
    std::string report;
    bool knn_only = false;
    bool nn_only = false;
};

RunConfig resolve_config(const Options& opts, const CLI::App& app) {
    RunConfig config;
    if (opts.config_path) config.load_file(*opts.config_path);
    const auto& keys = config_keys();
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (app.count("--" + dashed(keys[i].name)) > 0) config.set(keys[i].name, opts.flag_values[i]);
    }
    config.synth.grid = config.grid();
    return config;
}

SolarSeries load_series(const RunConfig& config, const std::string& path) {
    return ingest_csv_file(path, config.grid());
}

std::string method_summary_header() {
    std::ostringstream s;
    s << std::left << std::setw(10) << "method" << std::right << std::setw(14) << "global_rmse"
      << std::setw(16) << "two_tier_rmse" << std::setw(14) << "improvement" << std::setw(16)
      << "improvement_w" << '\n';
    return s.str();
}

// -- commands ----------------------------------------------------------------

int cmd_synth(const RunConfig& config, const Options& opts, std::ostream& out, std::ostream& err) {
    const auto result = synth::generate(config.synth, opts.days, config.seed);
    std::ostringstream csv;
    export_csv(result.series, csv);
    std::ostringstream labels;
    synth::export_labels(result, labels);

    std::ostream& summary = opts.out.empty() ? err : out;
    if (opts.out.empty()) {
        out << csv.str();
    } else {
        write_file(opts.out, csv.str());
    }
    std::string labels_path = opts.labels;
    if (labels_path.empty() && !opts.out.empty()) {
        fs::path p(opts.out);
        labels_path = (p.parent_path() / (p.stem().string() + ".labels.csv")).string();
    }
    if (!labels_path.empty()) write_file(labels_path, labels.str());

    std::size_t cloudy = 0;
    for (auto l : result.labels) cloudy += l == synth::DayLabel::Cloudy ? 1 : 0;
    summary << "synthesized " << result.series.size() << " days (" << result.series.size() - cloudy
            << " sunny, " << cloudy << " cloudy), seed " << config.seed << '\n';
    if (!opts.out.empty()) summary << "wrote " << opts.out << '\n';
    if (!labels_path.empty()) summary << "wrote " << labels_path << '\n';
    return kSuccess;
}

int cmd_ingest(const RunConfig& config, const Options& opts, std::ostream& out, std::ostream&) {
    const auto series = load_series(config, opts.data);
    out << "days: " << series.size() << '\n';
    out << "samples_per_day: " << series.grid().samples_per_day() << '\n';
    if (!series.empty()) {
        out << "first: " << format_date(series.days().front().date) << '\n';
        out << "last: " << format_date(series.days().back().date) << '\n';
        out << "peak_w: " << text::format_fixed(series.max_power(), 1) << '\n';
    }
    if (!opts.out.empty()) {
        std::ostringstream csv;
        export_csv(series, csv);
        write_file(opts.out, csv.str());
        out << "wrote " << opts.out << '\n';
    }
    return kSuccess;
}

int cmd_tune(const RunConfig& config, const Options& opts, std::ostream& out, std::ostream&) {
    const auto series = load_series(config, opts.data);
    const auto split = split_chronological(series, config.split);
    const auto knn_tuning =
        eval::tune_knn(series, split, config.tune_depths, config.tune_neighbors);
    const auto nn_tuning =
        eval::tune_nn(series, split, config.tune_hidden, config.nn_config(), config.nn.restarts);

    out << "train " << split.train.size() << " days, tune " << split.tune.size() << " days, test "
        << split.test.size() << " days\n\n";
    eval::write_tune_table(knn_tuning.depth_grid,
                           "COMPARISONS OF RMSE OVER D (k = " +
                               std::to_string(knn_tuning.best_neighbors) + ")",
                           out);
    out << '\n';
    eval::write_tune_table(knn_tuning.neighbor_grid,
                           "COMPARISONS OF RMSE OVER k (D = " +
                               std::to_string(knn_tuning.best_depth) + ")",
                           out);
    out << '\n';
    eval::write_tune_table(nn_tuning.grid,
                           "COMPARISON OF RMSE OVER HIDDEN LAYER NEURONS (average of " +
                               std::to_string(config.nn.restarts) + " trainings)",
                           out);
    out << '\n';

    const auto hidden = nn_tuning.grid.best_candidate();
    if (!hidden) throw Error(ErrorKind::InsufficientTrainingDays, "no hidden size could be evaluated");
    std::ostringstream chosen;
    chosen << "# selected on the tune split\n"
           << "depth_days = " << knn_tuning.best_depth << '\n'
           << "neighbors = " << knn_tuning.best_neighbors << '\n'
           << "hidden_neurons = " << *hidden << '\n';
    out << "selected: depth_days = " << knn_tuning.best_depth
        << ", neighbors = " << knn_tuning.best_neighbors << ", hidden_neurons = " << *hidden << '\n';

    const std::string results = opts.out.empty() ? "tuned.conf" : opts.out;
    write_file(results, chosen.str());
    out << "wrote " << results << '\n';
    if (!opts.report.empty()) {
        std::ostringstream csv;
        eval::write_tune_csv(knn_tuning, nn_tuning, csv);
        write_file(opts.report, csv.str());
        out << "wrote " << opts.report << '\n';
    }
    return kSuccess;
}

int cmd_train(const RunConfig& config, const Options& opts, std::ostream& out, std::ostream&) {
    const auto series = load_series(config, opts.data);
    const auto split = split_chronological(series, config.split);
    const fs::path dir(opts.out);
    fs::create_directories(dir);
    if (!opts.nn_only) {
        const auto model = knn::fit(split.train, config.knn);
        const auto path = dir / kKnnFile;
        persistence::save_model_file(model, path);
        out << "wrote " << path.string() << " (D = " << config.knn.depth_days
            << ", k = " << config.knn.neighbors << ", " << model.pairs().size() << " pairs)\n";
    }
    if (!opts.knn_only) {
        const auto model = nn::fit_day_ahead(split.train, config.nn_config());
        const auto path = dir / kNnFile;
        persistence::save_model_file(model, path);
        out << "wrote " << path.string() << " (hidden = " << model.hidden()
            << ", restarts = " << config.nn.restarts << ")\n";
    }
    return kSuccess;
}

struct LoadedModels {
    std::optional<knn::KnnModel> knn;
    std::optional<nn::NnModel> nn;
};

LoadedModels load_models(const std::string& dir, bool require_both) {
    LoadedModels models;
    const fs::path knn_path = fs::path(dir) / kKnnFile;
    const fs::path nn_path = fs::path(dir) / kNnFile;
    if (fs::exists(knn_path) || require_both) {
        models.knn = std::get<knn::KnnModel>(persistence::load_model_file(knn_path));
    }
    if (fs::exists(nn_path) || require_both) {
        models.nn = std::get<nn::NnModel>(persistence::load_model_file(nn_path));
    }
    if (!models.knn && !models.nn) {
        throw std::ios_base::failure("no model files in " + dir);
    }
    return models;
}

void write_trace(const std::vector<double>& global, const DayProfile& measured,
                 const local::DaySimulation& sim, std::ostream& sink) {
    sink << "sample_index,global_w,measured_w,corrected_w,a0";
    for (std::size_t i = 1; i <= sim.max_harmonic; ++i) sink << ",a" << i << ",b" << i;
    sink << '\n';
    for (std::size_t m = 0; m < global.size(); ++m) {
        sink << m << ',' << text::format_double(global[m]) << ','
             << text::format_double(measured.samples[m]) << ','
             << text::format_double(sim.corrected[m]);
        const auto* fit = sim.fit_for_sample(m);
        for (std::size_t c = 0; c < 2 * sim.max_harmonic + 1; ++c) {
            sink << ',';
            if (fit) sink << text::format_double(fit->coefficients[c]);
        }
        sink << '\n';
    }
}

int cmd_simulate(const RunConfig& config, const Options& opts, std::ostream& out, std::ostream&) {
    Date date;
    try {
        date = parse_date(opts.day);
    } catch (const Error&) {
        throw UsageError("--day expects YYYY-MM-DD, got '" + opts.day + "'");
    }
    const auto models = load_models(opts.models, false);
    const auto series = load_series(config, opts.data);
    const auto pos = series.find(date);
    if (pos == SolarSeries::npos) {
        throw BadReference("day " + opts.day + " is not in " + opts.data);
    }
    const auto& day = series[pos];
    const fs::path dir(opts.out.empty() ? "." : opts.out);

    std::ostringstream summary;
    summary << "day " << opts.day << '\n' << method_summary_header();
    auto run_method = [&](std::string_view label, const std::vector<double>& global) {
        const auto sim = local::simulate_day(global, day, config.correction.window_length,
                                             config.correction.max_harmonic);
        std::ostringstream trace;
        write_trace(global, day, sim, trace);
        const auto path = dir / ("trace_" + std::string(label) + "_" + opts.day + ".csv");
        write_file(path, trace.str());

        const double before = eval::rmse(global, day.samples);
        const double after = eval::rmse(sim.corrected, day.samples);
        const auto pct = eval::improvement_percent(before, after);
        summary << std::left << std::setw(10) << label << std::right << std::setw(14)
                << text::format_fixed(before, 1) << std::setw(16) << text::format_fixed(after, 1)
                << std::setw(14) << (pct ? text::format_fixed(*pct, 2) + "%" : std::string("n/a"))
                << std::setw(16) << text::format_fixed(before - after, 1) << '\n';
        return path;
    };

    std::vector<fs::path> written;
    if (models.knn) written.push_back(run_method("knn", knn::forecast(*models.knn, series, day.day_index)));
    if (models.nn) written.push_back(run_method("nn", nn::forecast(*models.nn, series, day.day_index)));
    out << summary.str();
    for (const auto& p : written) out << "wrote " << p.string() << '\n';
    return kSuccess;
}

int cmd_evaluate(const RunConfig& config, const Options& opts, std::ostream& out, std::ostream&) {
    const auto models = load_models(opts.models, true);
    const auto series = load_series(config, opts.data);
    const auto split = split_chronological(series, config.split);
    const auto report =
        eval::compare_methods(series, split.test, *models.knn, *models.nn, config.correction);

    std::ostringstream csv;
    eval::write_report_csv(report, csv);
    std::ostringstream txt;
    eval::write_report_text(report, txt);
    const fs::path dir(opts.out.empty() ? "." : opts.out);
    write_file(dir / "evaluation.csv", csv.str());
    write_file(dir / "evaluation.txt", txt.str());
    out << txt.str();
    out << "wrote " << (dir / "evaluation.csv").string() << '\n';
    out << "wrote " << (dir / "evaluation.txt").string() << '\n';
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-tier day-ahead solar forecasting: k-NN / NN global tier with Fourier "
                 "residual correction"};
    app.name(args.empty() ? "twotier" : fs::path(args.front()).filename().string());
    app.require_subcommand(1);
    app.fallthrough();

    Options opts;
    app.add_option("--config", opts.config_path, "key = value configuration file")->type_name("FILE");
    const auto& keys = config_keys();
    opts.flag_values.resize(keys.size());
    const RunConfig defaults;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        app.add_option("--" + dashed(keys[i].name), opts.flag_values[i],
                       std::string(keys[i].help) + " [default: " + defaults.get(keys[i].name) + "]")
            ->type_name("VALUE")
            ->group("Configuration");
    }

    auto* synth = app.add_subcommand("synth", "generate a synthetic solar dataset");
    synth->add_option("--days", opts.days, "number of days")
        ->required()
        ->check(CLI::Validator(
            [](const std::string& v) { return v == "0" ? std::string("must be at least 1") : std::string(); },
            "N >= 1"));
    synth->add_option("--out", opts.out, "CSV output path (default: standard output)");
    synth->add_option("--labels", opts.labels,
                      "date,label sidecar path (default: <out stem>.labels.csv)");

    auto* ingest = app.add_subcommand("ingest", "validate a timestamp,power_w CSV file");
    ingest->add_option("--data", opts.data, "input CSV")->required();
    ingest->add_option("--out", opts.out, "re-export the validated series");

    auto* tune = app.add_subcommand("tune", "grid-search D, k and hidden neurons on the tune split");
    tune->add_option("--data", opts.data, "input CSV")->required();
    tune->add_option("--out", opts.out, "chosen-parameter config file (default: tuned.conf)");
    tune->add_option("--report", opts.report, "raw tuning RMSE CSV");

    auto* train = app.add_subcommand("train", "fit the global-tier models on the train split");
    train->add_option("--data", opts.data, "input CSV")->required();
    train->add_option("--out", opts.out, "model directory")->required();
    auto* knn_only = train->add_flag("--knn-only", opts.knn_only, "only fit the k-NN model");
    auto* nn_only = train->add_flag("--nn-only", opts.nn_only, "only fit the NN model");
    knn_only->excludes(nn_only);

    auto* simulate = app.add_subcommand("simulate", "replay one day with real-time correction");
    simulate->add_option("--models", opts.models, "model directory")->required();
    simulate->add_option("--data", opts.data, "input CSV")->required();
    simulate->add_option("--day", opts.day, "YYYY-MM-DD")->required();
    simulate->add_option("--out", opts.out, "trace output directory (default: .)");

    auto* evaluate = app.add_subcommand("evaluate", "compare all four methods over the test split");
    evaluate->add_option("--models", opts.models, "model directory")->required();
    evaluate->add_option("--data", opts.data, "input CSV")->required();
    evaluate->add_option("--out", opts.out, "report output directory (default: .)");

    std::vector<const char*> argv;
    const std::string fallback = "twotier";
    if (args.empty()) argv.push_back(fallback.c_str());
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        const auto config = resolve_config(opts, app);
        if (synth->parsed()) return cmd_synth(config, opts, out, err);
        if (ingest->parsed()) return cmd_ingest(config, opts, out, err);
        if (tune->parsed()) return cmd_tune(config, opts, out, err);
        if (train->parsed()) return cmd_train(config, opts, out, err);
        if (simulate->parsed()) return cmd_simulate(config, opts, out, err);
        if (evaluate->parsed()) return cmd_evaluate(config, opts, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const BadReference& e) {
        err << "error: " << e.what() << '\n';
        return kBadReference;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::ios_base::failure& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIo;
    }
    return kUsage;
}

}  // namespace twotier::cli

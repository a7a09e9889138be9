#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "twotier/cli.hpp"
#include "twotier/error.hpp"
#include "twotier/evaluation.hpp"
#include "twotier/knn.hpp"
#include "twotier/local_correction.hpp"
#include "twotier/nn.hpp"
#include "twotier/persistence.hpp"
#include "twotier/synth.hpp"

namespace py = pybind11;
using namespace twotier;

namespace {

using Days = std::vector<std::vector<double>>;

// Consecutive days starting 2015-01-01; the grid follows the day length.
SolarSeries series_from(const Days& days) {
    if (days.empty() || days.front().empty()) throw Error(ErrorKind::EmptyInput, "no days given");
    const auto spd = static_cast<int>(days.front().size());
    if (SamplingGrid::kSecondsPerDay % spd != 0) {
        throw Error(ErrorKind::InvalidArgument, "samples per day must divide 86400");
    }
    const SamplingGrid grid(SamplingGrid::kSecondsPerDay / spd);
    std::vector<DayProfile> profiles;
    Date date{std::chrono::year{2015}, std::chrono::January, std::chrono::day{1}};
    for (std::size_t i = 0; i < days.size(); ++i, date = next_day(date)) {
        profiles.push_back({i, date, days[i]});
    }
    return SolarSeries(grid, std::move(profiles));
}

Days days_of(const SolarSeries& series) {
    Days out;
    for (const auto& d : series.days()) out.push_back(d.samples);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-tier day-ahead solar forecasting";

    py::register_exception<Error>(m, "TwotierError", PyExc_ValueError);

    m.def("rmse", [](const std::vector<double>& p, const std::vector<double>& a) { return eval::rmse(p, a); },
          py::arg("predicted"), py::arg("actual"));
    m.def("improvement_percent", &eval::improvement_percent, py::arg("baseline"), py::arg("improved"));

    // -- global tier ---------------------------------------------------------
    m.def("neighbor_weights",
          [](const std::vector<double>& d) { return knn::neighbor_weights(d); }, py::arg("sorted_distances"));

    py::class_<knn::KnnModel>(m, "KnnModel")
        .def_property_readonly("depth_days", [](const knn::KnnModel& k) { return k.config().depth_days; })
        .def_property_readonly("neighbors", [](const knn::KnnModel& k) { return k.config().neighbors; })
        .def_property_readonly("pair_count", [](const knn::KnnModel& k) { return k.pairs().size(); })
        .def("predict", [](const knn::KnnModel& k, const std::vector<double>& context) {
            return knn::predict_day(k, context);
        }, py::arg("context"), "Blend of the k nearest targets for a concatenated D-day context.")
        .def("forecast", [](const knn::KnnModel& k, const Days& history, std::size_t target_day) {
            return knn::forecast(k, series_from(history), target_day);
        }, py::arg("history"), py::arg("target_day"));

    m.def("fit_knn", [](const Days& train, std::size_t depth_days, std::size_t neighbors) {
        return knn::fit(series_from(train), {depth_days, neighbors});
    }, py::arg("train"), py::arg("depth_days") = 5, py::arg("neighbors") = 2);

    py::class_<nn::NnModel>(m, "NnModel")
        .def_property_readonly("hidden_neurons", &nn::NnModel::hidden)
        .def_property_readonly("scale_max", [](const nn::NnModel& n) { return n.scale_max; })
        .def("parameters", &nn::NnModel::parameters)
        .def("forward", [](const nn::NnModel& n, double x0, double x1) { return nn::forward(n, {x0, x1}); },
             py::arg("x0"), py::arg("x1"), "Normalized network output.")
        .def("predict", [](const nn::NnModel& n, const std::vector<double>& prev, const std::vector<double>& prev2) {
            const DayProfile a{1, {}, prev};
            const DayProfile b{0, {}, prev2};
            return nn::predict_day(n, a, b);
        }, py::arg("prev_day"), py::arg("prev_prev_day"));

    m.def("fit_nn", [](const Days& train, std::size_t hidden, std::size_t restarts, std::uint64_t seed) {
        nn::NnConfig c;
        c.hidden_neurons = hidden;
        c.restarts = restarts;
        c.rng_seed = seed;
        return nn::fit_day_ahead(series_from(train), c);
    }, py::arg("train"), py::arg("hidden_neurons") = 6, py::arg("restarts") = 10, py::arg("seed") = 1);

    // -- local tier ----------------------------------------------------------
    m.def("design_matrix", &local::design_matrix, py::arg("window_length") = 8, py::arg("max_harmonic") = 2);

    py::class_<local::DfsFit>(m, "DfsFit")
        .def_readonly("coefficients", &local::DfsFit::coefficients)
        .def_readonly("window_length", &local::DfsFit::window_length)
        .def_readonly("max_harmonic", &local::DfsFit::max_harmonic)
        .def("a", &local::DfsFit::a)
        .def("b", &local::DfsFit::b)
        .def("__call__", [](const local::DfsFit& f, long long k) { return local::eval_dfs(f, k); }, py::arg("k"));

    m.def("fit_dfs", [](const std::vector<double>& window, std::size_t max_harmonic) {
        if (window.empty()) throw Error(ErrorKind::EmptyInput, "empty window");
        return local::fit_dfs({window, window.size() - 1}, max_harmonic);
    }, py::arg("window"), py::arg("max_harmonic") = 2);

    m.def("simulate_day", [](const std::vector<double>& global, const std::vector<double>& measured,
                             std::size_t window_length, std::size_t max_harmonic) {
        const DayProfile day{0, {}, measured};
        return local::simulate_day(global, day, window_length, max_harmonic).corrected;
    }, py::arg("global_forecast"), py::arg("measured"), py::arg("window_length") = 8, py::arg("max_harmonic") = 2,
       "One-step-ahead corrected series for one day.");

    // -- data and persistence ------------------------------------------------
    m.def("generate", [](std::size_t num_days, std::uint64_t seed, double cloudy_probability) {
        synth::SynthConfig c;
        c.cloudy_probability = cloudy_probability;
        const auto r = synth::generate(c, num_days, seed);
        py::dict out;
        std::vector<std::string> dates, labels;
        for (std::size_t i = 0; i < r.series.size(); ++i) {
            dates.push_back(format_date(r.series[i].date));
            labels.emplace_back(synth::to_string(r.labels[i]));
        }
        out["dates"] = dates;
        out["days"] = days_of(r.series);
        out["labels"] = labels;
        out["cloudiness"] = r.cloudiness;
        return out;
    }, py::arg("num_days"), py::arg("seed") = 1, py::arg("cloudy_probability") = 0.5);

    m.def("save_model", [](const knn::KnnModel& k) { return persistence::save_model_string(k); });
    m.def("save_model", [](const nn::NnModel& n) { return persistence::save_model_string(n); });
    m.def("load_model", [](const std::string& text) -> py::object {
        auto model = persistence::load_model_string(text);
        if (auto* k = std::get_if<knn::KnnModel>(&model)) return py::cast(std::move(*k));
        return py::cast(std::get<nn::NnModel>(std::move(model)));
    }, py::arg("text"));

    m.def("run_cli", [](std::vector<std::string> args) {
        args.insert(args.begin(), "twotier");
        std::ostringstream out, err;
        int code = 0;
        {
            py::gil_scoped_release release;
            code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Runs the command line; returns (exit_code, stdout, stderr).");
}

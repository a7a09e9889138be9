#include "twotier/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "twotier/text.hpp"

namespace twotier {

namespace {

struct Entry {
    ConfigKey key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    throw ConfigError("invalid value '" + std::string(value) + "' for '" + std::string(key) +
                      "' (expected " + std::string(expected) + ")");
}

template <typename T>
T as_unsigned(std::string_view key, std::string_view value) {
    if (value.starts_with('+')) value.remove_prefix(1);
    T v{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || value.front() == '-' || ec != std::errc{} || ptr != value.data() + value.size()) {
        bad_value(key, value, "a non-negative integer");
    }
    return v;
}

double as_real(std::string_view key, std::string_view value) {
    auto v = text::parse_double(value);
    if (!v) bad_value(key, value, "a number");
    return *v;
}

// "1-8" or "2,3,4" or a mix: "1-3,6"
std::vector<std::size_t> as_list(std::string_view key, std::string_view value) {
    std::vector<std::size_t> out;
    for (auto item : text::split(value, ',')) {
        item = text::trim(item);
        const auto dash = item.find('-');
        if (dash == std::string_view::npos) {
            out.push_back(as_unsigned<std::size_t>(key, item));
            continue;
        }
        const auto lo = as_unsigned<std::size_t>(key, item.substr(0, dash));
        const auto hi = as_unsigned<std::size_t>(key, item.substr(dash + 1));
        if (lo > hi) bad_value(key, value, "ascending ranges");
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
    }
    if (out.empty()) bad_value(key, value, "a non-empty list");
    return out;
}

std::string list_text(const std::vector<std::size_t>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(values[i]);
    }
    return out;
}

#define TT_UNSIGNED(NAME, HELP, FIELD)                                                          \
    Entry {                                                                                     \
        {NAME, HELP},                                                                           \
            [](RunConfig& c, std::string_view v) { c.FIELD = as_unsigned<decltype(c.FIELD)>(NAME, v); }, \
            [](const RunConfig& c) { return std::to_string(c.FIELD); }                          \
    }

#define TT_REAL(NAME, HELP, FIELD)                                               \
    Entry {                                                                      \
        {NAME, HELP}, [](RunConfig& c, std::string_view v) { c.FIELD = as_real(NAME, v); }, \
            [](const RunConfig& c) { return text::format_double(c.FIELD); }     \
    }

#define TT_LIST(NAME, HELP, FIELD)                                               \
    Entry {                                                                      \
        {NAME, HELP}, [](RunConfig& c, std::string_view v) { c.FIELD = as_list(NAME, v); }, \
            [](const RunConfig& c) { return list_text(c.FIELD); }               \
    }

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        TT_UNSIGNED("sample_interval_seconds", "sampling interval T_s in seconds", sample_interval_seconds),
        TT_REAL("split_train", "fraction of days used for training", split[0]),
        TT_REAL("split_tune", "fraction of days used for tuning", split[1]),
        TT_REAL("split_test", "fraction of days used for testing", split[2]),
        TT_UNSIGNED("depth_days", "k-NN context depth D in days", knn.depth_days),
        TT_UNSIGNED("neighbors", "k-NN neighbors k (>= 2)", knn.neighbors),
        TT_UNSIGNED("hidden_neurons", "NN hidden layer size", nn.hidden_neurons),
        TT_UNSIGNED("restarts", "NN training restarts", nn.restarts),
        TT_REAL("lm_initial_damping", "Levenberg-Marquardt initial damping", nn.lm_initial_damping),
        TT_REAL("lm_damping_factor", "Levenberg-Marquardt damping factor", nn.lm_damping_factor),
        TT_UNSIGNED("max_iterations", "Levenberg-Marquardt iteration budget", nn.max_iterations),
        TT_REAL("loss_tolerance", "relative loss improvement that stops training", nn.loss_tolerance),
        TT_UNSIGNED("seed", "master random seed", seed),
        TT_UNSIGNED("window_length", "residual window length n", correction.window_length),
        TT_UNSIGNED("max_harmonic", "highest Fourier harmonic L", correction.max_harmonic),
        TT_LIST("tune_depths", "D candidates, e.g. 1-8", tune_depths),
        TT_LIST("tune_neighbors", "k candidates, e.g. 2-4", tune_neighbors),
        TT_LIST("tune_hidden", "hidden size candidates, e.g. 3-8", tune_hidden),
        TT_REAL("peak_power_w", "synthetic plant peak power in watts", synth.peak_power_w),
        TT_UNSIGNED("sunrise_index", "synthetic sunrise sample index", synth.sunrise_index),
        TT_UNSIGNED("sunset_index", "synthetic sunset sample index", synth.sunset_index),
        TT_REAL("cloudy_probability", "probability that a synthetic day is cloudy", synth.cloudy_probability),
        TT_REAL("min_cloudiness", "lower bound of a cloudy day's cloudiness", synth.min_cloudiness),
        TT_REAL("cloud_event_rate", "expected cloud events on a fully cloudy day", synth.cloud_event_rate),
        TT_REAL("cloud_depth_min", "minimum attenuation of one cloud event", synth.cloud_depth_min),
        TT_REAL("cloud_depth_max", "maximum attenuation of one cloud event", synth.cloud_depth_max),
        TT_REAL("overcast_depth_min", "minimum day-long overcast attenuation", synth.overcast_depth_min),
        TT_REAL("overcast_depth_max", "maximum day-long overcast attenuation", synth.overcast_depth_max),
        TT_UNSIGNED("event_min_samples", "shortest cloud event in samples", synth.event_min_samples),
        TT_UNSIGNED("event_max_samples", "longest cloud event in samples", synth.event_max_samples),
        Entry{{"start_date", "first synthetic date, YYYY-MM-DD"},
              [](RunConfig& c, std::string_view v) {
                  try {
                      c.synth.start_date = parse_date(v);
                  } catch (const Error&) {
                      bad_value("start_date", v, "YYYY-MM-DD");
                  }
              },
              [](const RunConfig& c) { return format_date(c.synth.start_date); }},
    };
    return table;
}

#undef TT_UNSIGNED
#undef TT_REAL
#undef TT_LIST

const Entry& lookup(std::string_view key) {
    for (const auto& e : entries()) {
        if (e.key.name == key) return e;
    }
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> out;
        for (const auto& e : entries()) out.push_back(e.key);
        return out;
    }();
    return keys;
}

void RunConfig::set(std::string_view key, std::string_view value) {
    lookup(text::trim(key)).set(*this, text::trim(value));
    if (key == "sample_interval_seconds") synth.grid = grid();
}

std::string RunConfig::get(std::string_view key) const { return lookup(key).get(*this); }

void RunConfig::load_text(std::string_view text_in, std::string_view origin) {
    std::size_t line_no = 0;
    for (auto line : text::split(text_in, '\n')) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        try {
            set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void RunConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    load_text(buf.str(), path.string());
}

std::string RunConfig::to_text() const {
    std::string out;
    for (const auto& e : entries()) {
        out += std::string(e.key.name) + " = " + e.get(*this) + "\n";
    }
    return out;
}

}  // namespace twotier

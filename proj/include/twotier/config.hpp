#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "twotier/evaluation.hpp"
#include "twotier/knn.hpp"
#include "twotier/nn.hpp"
#include "twotier/synth.hpp"
#include "twotier/timeseries.hpp"

namespace twotier {

/// Raised for unknown keys and unparsable values. The CLI reports it as a
/// usage error.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every tunable of the pipeline. Defaults follow the reference setup:
/// 15-min grid, 60/20/20 split, D = 5, k = 2, 6 hidden neurons, 10 restarts,
/// n = 8, L = 2.
struct RunConfig {
    int sample_interval_seconds = 900;
    std::array<double, 3> split{0.6, 0.2, 0.2};
    knn::KnnConfig knn{};
    nn::NnConfig nn{};
    std::uint64_t seed = 1;
    eval::CorrectionParams correction{};
    std::vector<std::size_t> tune_depths{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<std::size_t> tune_neighbors{2, 3, 4};
    std::vector<std::size_t> tune_hidden{3, 4, 5, 6, 7, 8};
    synth::SynthConfig synth{};

    [[nodiscard]] SamplingGrid grid() const { return SamplingGrid(sample_interval_seconds); }

    /// nn config with the run seed applied.
    [[nodiscard]] nn::NnConfig nn_config() const {
        auto c = nn;
        c.rng_seed = seed;
        return c;
    }

    /// Sets one key from its text form. Throws ConfigError.
    void set(std::string_view key, std::string_view value);
    [[nodiscard]] std::string get(std::string_view key) const;

    /// Reads `key = value` lines; '#' starts a comment.
    void load_file(const std::filesystem::path& path);
    void load_text(std::string_view text, std::string_view origin = "<config>");

    /// All keys with their current values, one `key = value` per line.
    [[nodiscard]] std::string to_text() const;
};

struct ConfigKey {
    std::string_view name;
    std::string_view help;
};

/// Documented keys in display order.
const std::vector<ConfigKey>& config_keys();

}  // namespace twotier

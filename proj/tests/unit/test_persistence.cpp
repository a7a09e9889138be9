#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "twotier/error.hpp"
#include "twotier/persistence.hpp"

using namespace twotier;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

const fs::path kData = TWOTIER_TEST_DATA;

knn::KnnModel golden_knn() {
    return knn::KnnModel({1, 2}, {{1, {0, 0}, {10, 20}}, {2, {10, 20}, {20, 30.5}}, {3, {20, 30.5}, {0.125, 0.1}}});
}

nn::NnModel golden_nn() {
    nn::NnConfig c;
    c.hidden_neurons = 2;
    c.rng_seed = 1;
    auto m = nn::build(c, 1);
    m.hidden_weights << 0.5, -0.25, 1, 2;
    m.hidden_biases << 0.1, -0.3;
    m.output_weights << 0.75, -0.5;
    m.output_bias = 0.2;
    m.scale_max = 1000;
    m.samples_per_day = 4;
    m.config = c;
    return m;
}

ErrorKind load_error(const std::string& text) {
    try {
        (void)persistence::load_model_string(text);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected load to fail");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("checksum is FNV-1a 64") {
    CHECK(persistence::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(persistence::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("golden k-NN file matches the writer byte for byte") {
    const auto golden = read_file(kData / "golden_knn.htm-model");
    CHECK(persistence::save_model_string(golden_knn()) == golden);
    const auto model = std::get<knn::KnnModel>(persistence::load_model_string(golden));
    CHECK(model.config().depth_days == 1);
    CHECK(model.pairs().size() == 3);
    CHECK(model.pairs()[1].target == std::vector<double>{20, 30.5});
}

TEST_CASE("golden NN file matches the writer byte for byte") {
    const auto golden = read_file(kData / "golden_nn.htm-model");
    CHECK(persistence::save_model_string(golden_nn()) == golden);
    const auto model = std::get<nn::NnModel>(persistence::load_model_string(golden));
    CHECK(model.hidden() == 2);
    CHECK(model.scale_max == 1000.0);
    // 0.75 tanh(0.1) - 0.5 tanh(1.2) + 0.2
    CHECK_THAT(nn::forward(model, {0.3, 0.6}), Catch::Matchers::WithinAbs(-0.14207630753736072, 1e-15));
}

TEST_CASE("trained model round-trips with identical outputs") {
    const auto s = fixtures::series(8, [](std::size_t d, std::size_t m) { return double((d * 5 + m) % 11) * 321.7; });
    nn::NnConfig cfg;
    cfg.restarts = 2;
    cfg.rng_seed = 99;
    const auto model = nn::fit_day_ahead(s, cfg);
    const auto text = persistence::save_model_string(model);
    const auto back = std::get<nn::NnModel>(persistence::load_model_string(text));
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const nn::Input x{u(gen), u(gen)};
        REQUIRE(nn::forward(back, x) == nn::forward(model, x));
    }
    CHECK(persistence::save_model_string(back) == text);
}

TEST_CASE("file save is atomic and loadable") {
    const auto dir = fs::temp_directory_path() / "twotier_persistence_test";
    fs::create_directories(dir);
    const auto path = dir / ("knn" + std::string(persistence::kFileExtension));
    persistence::save_model_file(golden_knn(), path);
    CHECK_FALSE(fs::exists(dir / "knn.htm-model.tmp"));
    CHECK(std::holds_alternative<knn::KnnModel>(persistence::load_model_file(path)));
    fs::remove_all(dir);
    CHECK_THROWS_AS(persistence::load_model_file(dir / "missing.htm-model"), std::ios_base::failure);
}

TEST_CASE("damaged files are rejected") {
    const auto good = persistence::save_model_string(golden_knn());

    auto corrupted = good;
    corrupted[corrupted.size() - 3] = '7';
    CHECK(load_error(corrupted) == ErrorKind::ChecksumMismatch);

    CHECK(load_error(good.substr(0, good.size() - 10)) == ErrorKind::ParseError);
    CHECK(load_error(good.substr(0, 20)) == ErrorKind::ParseError);
    CHECK(load_error(good + "extra\n") == ErrorKind::ParseError);
    CHECK(load_error("not a model\n") == ErrorKind::ParseError);

    auto future = good;
    future.replace(future.find("version 1"), 9, "version 2");
    CHECK(load_error(future) == ErrorKind::UnsupportedVersion);
}

TEST_CASE("payloads that break model invariants are rejected") {
    const auto payload = persistence::encode_payload(golden_knn());

    auto negative = payload;
    negative.replace(negative.find("depth_days 1"), 12, "depth_days -1");
    CHECK(load_error(persistence::wrap_envelope("knn", negative)) == ErrorKind::InvariantViolation);

    auto one_neighbor = payload;
    one_neighbor.replace(one_neighbor.find("neighbors 2"), 11, "neighbors 1");
    CHECK(load_error(persistence::wrap_envelope("knn", one_neighbor)) == ErrorKind::InvariantViolation);

    auto nn_payload = persistence::encode_payload(golden_nn());
    nn_payload.replace(nn_payload.find("scale_max 1000"), 14, "scale_max -1");
    CHECK(load_error(persistence::wrap_envelope("nn", nn_payload)) == ErrorKind::InvariantViolation);

    CHECK(load_error(persistence::wrap_envelope("svm", payload)) == ErrorKind::ParseError);
}

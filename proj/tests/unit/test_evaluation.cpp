#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "twotier/error.hpp"
#include "twotier/evaluation.hpp"
#include "twotier/synth.hpp"
#include "twotier/text.hpp"

using namespace twotier;
using Catch::Matchers::WithinAbs;

TEST_CASE("rmse hand values and errors") {
    CHECK_THAT(eval::rmse(std::vector<double>{3, 1}, std::vector<double>{1, 1}), WithinAbs(std::sqrt(2.0), 1e-12));
    CHECK(eval::rmse(std::vector<double>{4, 5}, std::vector<double>{4, 5}) == 0.0);
    try {
        (void)eval::rmse(std::vector<double>{1}, std::vector<double>{1, 2});
        FAIL("expected LengthMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::LengthMismatch);
    }
    CHECK_THROWS_AS(eval::rmse(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST_CASE("rmse matches the summation oracle") {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(0.0, 35000.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> a(96), b(96);
        for (auto& v : a) v = u(gen);
        for (auto& v : b) v = u(gen);
        REQUIRE_THAT(eval::rmse(a, b), WithinAbs(oracle::rmse(a, b), 1e-12 * oracle::rmse(a, b) + 1e-12));
    }
}

TEST_CASE("improvement percent") {
    CHECK_THAT(*eval::improvement_percent(100, 72), WithinAbs(28.0, 1e-12));
    CHECK_FALSE(eval::improvement_percent(0, 0));
}

TEST_CASE("grids normalize so the largest cell is exactly one") {
    const auto g = eval::make_grid("D", {1, 2, 3}, {4.0, 2.0, std::nullopt});
    CHECK(g.normalized[0] == 1.0);
    CHECK(g.normalized[1] == 0.5);
    CHECK_FALSE(g.normalized[2]);
    CHECK(g.best_candidate() == 2);
    CHECK(g.reference_rmse == 4.0);

    const auto single = eval::make_grid("k", {2}, {123.0});
    CHECK(single.normalized[0] == 1.0);
    CHECK(single.best_candidate() == 2);

    const auto tie = eval::make_grid("k", {2, 3}, {5.0, 5.0});
    CHECK(tie.best_candidate() == 2);
}

TEST_CASE("tune table layout") {
    const auto g = eval::make_grid("D", {1, 2}, {4943.6, 2471.8});
    std::ostringstream out;
    eval::write_tune_table(g, "RMSE OVER D", out);
    const auto text = out.str();
    CHECK(text.find("RMSE OVER D\n") == 0);
    CHECK(text.find("0.500") != std::string::npos);
    CHECK(text.find("RMSE 4943.6 is normalized to 1\n") != std::string::npos);
}

TEST_CASE("tuning grids have the requested shape and are deterministic") {
    const auto data = synth::generate(synth::SynthConfig{}, 50, 1);
    const auto split = split_chronological(data.series, {0.6, 0.2, 0.2});
    const std::vector<std::size_t> depths{1, 2, 3, 4, 5, 6, 7, 8};
    const std::vector<std::size_t> neighbors{2, 3, 4};
    const auto t = eval::tune_knn(data.series, split, depths, neighbors);
    REQUIRE(t.raw.size() == 8);
    for (const auto& row : t.raw) REQUIRE(row.size() == 3);
    CHECK(t.depth_grid.candidates == depths);
    CHECK(t.neighbor_grid.candidates == neighbors);

    double best = INFINITY;
    for (std::size_t d = 0; d < 8; ++d) {
        for (std::size_t k = 0; k < 3; ++k) {
            if (t.raw[d][k] && *t.raw[d][k] < best) best = *t.raw[d][k];
        }
    }
    CHECK(t.raw[t.best_depth - 1][t.best_neighbors - 2] == best);

    nn::NnConfig base;
    base.rng_seed = 1;
    const std::vector<std::size_t> hidden{3, 4};
    const auto a = eval::tune_nn(data.series, split, hidden, base, 2);
    const auto b = eval::tune_nn(data.series, split, hidden, base, 2);
    CHECK(a.grid.raw_rmse == b.grid.raw_rmse);
    CHECK(a.per_restart.size() == 2);
    CHECK(a.per_restart[0].size() == 2);
}

TEST_CASE("perfect forecasts give zero errors and no improvement") {
    // Identical days: the k-NN blend and the local tier are both exact.
    const auto bell = synth::clear_sky(synth::SynthConfig{});
    const auto s = fixtures::series(20, [&](std::size_t, std::size_t m) { return bell[m]; });
    const auto split = split_chronological(s, {0.6, 0.2, 0.2});
    const auto knn_model = knn::fit(split.train, {2, 2});
    auto nn_model = nn::build(nn::NnConfig{}, 1);
    nn_model.scale_max = 1.0;
    const auto report = eval::compare_methods(s, split.test, knn_model, nn_model, {});
    CHECK(report.average[0] == 0.0);
    CHECK(report.average[2] == 0.0);
    REQUIRE(report.improvements.size() == 2);
    CHECK_FALSE(report.improvements[0].percent);

    std::ostringstream csv;
    eval::write_report_csv(report, csv);
    CHECK(csv.str().find("improvement_percent:knn->knn+local,n/a") != std::string::npos);
}

TEST_CASE("report improvements are recomputable from its rows") {
    const auto data = synth::generate(synth::SynthConfig{}, 30, 4);
    const auto split = split_chronological(data.series, {0.6, 0.2, 0.2});
    const auto knn_model = knn::fit(split.train, {3, 2});
    nn::NnConfig cfg;
    cfg.restarts = 2;
    const auto nn_model = nn::fit_day_ahead(split.train, cfg);
    const auto report = eval::compare_methods(data.series, split.test, knn_model, nn_model, {});

    std::ostringstream csv;
    eval::write_report_csv(report, csv);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "date,knn,nn,knn+local,nn+local");
    std::array<double, 4> sums{};
    std::size_t rows = 0;
    std::array<double, 4> avg{};
    std::array<double, 2> pct{};
    while (std::getline(in, line)) {
        const auto f = text::split(line, ',');
        if (f[0] == "average") {
            for (int i = 0; i < 4; ++i) avg[i] = *text::parse_double(f[i + 1]);
        } else if (f[0].starts_with("improvement_percent:knn")) {
            pct[0] = *text::parse_double(f[1]);
        } else if (f[0].starts_with("improvement_percent:nn")) {
            pct[1] = *text::parse_double(f[1]);
        } else {
            for (int i = 0; i < 4; ++i) sums[i] += *text::parse_double(f[i + 1]);
            ++rows;
        }
    }
    CHECK(rows == split.test.size());
    for (int i = 0; i < 4; ++i) CHECK_THAT(avg[i], WithinAbs(sums[i] / double(rows), 1e-9));
    CHECK_THAT(pct[0], WithinAbs(100.0 * (avg[0] - avg[2]) / avg[0], 1e-9));
    CHECK_THAT(pct[1], WithinAbs(100.0 * (avg[1] - avg[3]) / avg[1], 1e-9));
}

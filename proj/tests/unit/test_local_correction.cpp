#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "twotier/error.hpp"
#include "twotier/evaluation.hpp"
#include "twotier/local_correction.hpp"
#include "twotier/synth.hpp"

using namespace twotier;
using Catch::Matchers::WithinAbs;

namespace {

const double kPi = std::acos(-1.0);

local::ResidualWindow window_of(std::vector<double> values) {
    const auto anchor = values.size() - 1;
    return {std::move(values), anchor};
}

DayProfile day_of(std::vector<double> samples) {
    return DayProfile{0, fixtures::date(2015, 3, 1), std::move(samples)};
}

}  // namespace

TEST_CASE("residual sign convention") {
    STATIC_REQUIRE(local::residual(100, 100) == 0);
    STATIC_REQUIRE(local::residual(120, 100) == 20);
    STATIC_REQUIRE(local::residual(0, 50) == -50);
}

TEST_CASE("residual window takes the n newest residuals") {
    const std::vector<double> pred{10, 20, 30, 40, 50};
    const std::vector<double> meas{1, 2, 3, 4, 5};
    const auto w = local::residual_window(pred, meas, 3, 3);
    CHECK(w.values == std::vector<double>{18, 27, 36});
    CHECK(w.anchor_index == 3);
    CHECK_THROWS_AS(local::residual_window(pred, meas, 1, 3), Error);
    CHECK_THROWS_AS(local::residual_window(pred, meas, 5, 3), Error);
    const std::vector<double> short_meas{1, 2};
    CHECK_THROWS_AS(local::residual_window(pred, short_meas, 1, 2), Error);
}

TEST_CASE("design matrix shape, columns and Gram matrix") {
    const auto f = local::design_matrix(8, 2);
    REQUIRE(f.rows() == 8);
    REQUIRE(f.cols() == 5);
    CHECK(f.col(0).isOnes());
    const auto ref = oracle::fourier_basis(8, 2);
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 5; ++c) REQUIRE_THAT(f(r, c), WithinAbs(ref[r][c], 1e-15));
    }
    const Eigen::MatrixXd gram = f.transpose() * f;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            if (i != j) REQUIRE_THAT(gram(i, j), WithinAbs(0.0, 1e-12));
        }
    }
    CHECK_THAT(gram(0, 0), WithinAbs(8.0, 1e-12));
    CHECK_THAT(gram(1, 1), WithinAbs(4.0, 1e-12));

    try {
        (void)local::design_matrix(4, 2);
        FAIL("expected Underdetermined");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Underdetermined);
    }
}

TEST_CASE("constant window fits a0 only") {
    const auto fit = local::fit_dfs(window_of(std::vector<double>(8, 123.5)), 2);
    CHECK_THAT(fit.a(0), WithinAbs(123.5, 1e-12));
    for (std::size_t i = 1; i <= 2; ++i) {
        CHECK(std::abs(fit.a(i)) < 1e-12);
        CHECK(std::abs(fit.b(i)) < 1e-12);
    }
}

TEST_CASE("a signal inside the basis is recovered exactly") {
    std::vector<double> w(8);
    for (int v = 1; v <= 8; ++v) w[v - 1] = 3 + 2 * std::cos(2 * kPi * v / 8) - std::cos(4 * kPi * v / 8);
    const auto fit = local::fit_dfs(window_of(w), 2);
    const std::vector<double> want{3, 2, 0, -1, 0};
    for (std::size_t i = 0; i < 5; ++i) CHECK_THAT(fit.coefficients[i], WithinAbs(want[i], 1e-9));
}

TEST_CASE("fit matches the pseudo-inverse oracle") {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(-5000.0, 5000.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t harmonics = 1 + gen() % 3;
        const std::size_t n = 2 * harmonics + 1 + gen() % 10;
        std::vector<double> w(n);
        for (auto& v : w) v = u(gen);
        const auto fit = local::fit_dfs(window_of(w), harmonics);
        const auto ref = oracle::pseudo_inverse_fit(w, harmonics);
        for (std::size_t i = 0; i < ref.size(); ++i) REQUIRE_THAT(fit.coefficients[i], WithinAbs(ref[i], 1e-8));
    }
}

TEST_CASE("evaluation reproduces the projection and is n-periodic") {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    std::vector<double> w(8);
    for (auto& v : w) v = u(gen);
    const auto fit = local::fit_dfs(window_of(w), 2);
    const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(fit.coefficients.data(), 5);
    const Eigen::VectorXd projection = local::design_matrix(8, 2) * c;
    for (long long k = 1; k <= 8; ++k) {
        CHECK_THAT(local::eval_dfs(fit, k), WithinAbs(projection[k - 1], 1e-9));
        CHECK_THAT(local::eval_dfs(fit, k + 8), WithinAbs(local::eval_dfs(fit, k), 1e-9));
    }

    local::DfsFit flat{{5, 0, 0, 0, 0}, 2, 8, 7};
    for (long long k = -3; k < 30; ++k) CHECK(local::eval_dfs(flat, k) == 5.0);
}

TEST_CASE("correct_remaining subtracts the fitted residual and clamps") {
    const std::vector<double> global{1000, 1000, 1000, 1000, 50, 300};
    local::DfsFit plus200{{200, 0, 0}, 1, 3, 2};
    const auto out = local::correct_remaining(global, plus200, 2);
    CHECK(out.corrected_from == 3);
    CHECK(out.values == std::vector<double>{1000, 1000, 1000, 800, 0, 100});

    local::DfsFit zero{{0, 0, 0}, 1, 3, 2};
    CHECK(local::correct_remaining(global, zero, 2).values == global);

    CHECK_THROWS_AS(local::correct_remaining(global, zero, 5), Error);
}

TEST_CASE("simulating a perfect forecast changes nothing") {
    const auto bell = synth::clear_sky(synth::SynthConfig{});
    const auto sim = local::simulate_day(bell, day_of(bell));
    CHECK(sim.corrected == bell);
    CHECK(sim.steps.size() == 96 - 8);
    CHECK(sim.fit_for_sample(7) == nullptr);
    REQUIRE(sim.fit_for_sample(8) != nullptr);
    CHECK(sim.fit_for_sample(8)->anchor_index == 7);
}

TEST_CASE("constant bias is removed from sample n onward") {
    std::vector<double> measured(96);
    for (std::size_t m = 0; m < 96; ++m) measured[m] = 5000.0 + 10.0 * double(m);
    std::vector<double> global(96);
    for (std::size_t m = 0; m < 96; ++m) global[m] = measured[m] + 100.0;
    const auto sim = local::simulate_day(global, day_of(measured));
    for (std::size_t m = 0; m < 8; ++m) CHECK(sim.corrected[m] == global[m]);
    for (std::size_t m = 8; m < 96; ++m) REQUIRE(std::abs(sim.corrected[m] - measured[m]) < 1e-9);
}

TEST_CASE("a cloudy synthetic day improves under correction") {
    synth::SynthConfig cfg;
    cfg.cloudy_probability = 1.0;
    const auto data = synth::generate(cfg, 1, 5);
    const auto global = synth::clear_sky(cfg);
    const auto sim = local::simulate_day(global, data.series[0]);
    CHECK(eval::rmse(sim.corrected, data.series[0].samples) < eval::rmse(global, data.series[0].samples));
    for (double v : sim.corrected) REQUIRE(v >= 0.0);
}

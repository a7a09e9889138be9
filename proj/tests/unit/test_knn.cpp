#include <catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "twotier/error.hpp"
#include "twotier/knn.hpp"

using namespace twotier;
using Catch::Matchers::WithinAbs;

namespace {

// Context i is (positions[i], 0, ...), so its distance to the origin is |positions[i]|.
knn::KnnModel one_dim_model(const std::vector<double>& positions,
                            const std::vector<std::vector<double>>& targets, std::size_t k = 2) {
    std::vector<knn::TrainingPair> pairs;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        std::vector<double> context(targets[i].size(), 0.0);
        context[0] = positions[i];
        pairs.push_back({i, context, targets[i]});
    }
    return knn::KnnModel({1, k}, pairs);
}

std::vector<double> origin(const knn::KnnModel& model) {
    return std::vector<double>(model.context_length(), 0.0);
}

ErrorKind error_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("neighbor weights follow the distance formula") {
    const std::vector<double> a{1, 2, 4};
    const auto w = knn::neighbor_weights(a);
    REQUIRE(w.size() == 2);
    CHECK(w[0] == 1.0);
    CHECK_THAT(w[1], WithinAbs(2.0 / 3.0, 1e-15));

    const std::vector<double> b{0, 5, 10};
    CHECK(knn::neighbor_weights(b) == std::vector<double>{1.0, 0.5});

    const std::vector<double> c{3, 3, 3};
    CHECK(knn::neighbor_weights(c) == std::vector<double>{1.0, 1.0});

    const std::vector<double> unsorted{2, 1, 4};
    CHECK(error_of([&] { (void)knn::neighbor_weights(unsorted); }) == ErrorKind::UnsortedDistances);
}

TEST_CASE("hand example blends to [14, 24]") {
    const auto model = one_dim_model({1, 2, 4}, {{10, 20}, {20, 30}, {90, 90}});
    const auto p = knn::predict_day(model, origin(model));
    REQUIRE(p.size() == 2);
    CHECK_THAT(p[0], WithinAbs(14.0, 1e-12));
    CHECK_THAT(p[1], WithinAbs(24.0, 1e-12));
}

TEST_CASE("identical targets give that target regardless of distances") {
    const auto model = one_dim_model({1, 7, 30, 2}, {{5, 6}, {5, 6}, {5, 6}, {5, 6}}, 3);
    auto query = origin(model);
    query[0] = 11.0;
    const auto p = knn::predict_day(model, query);
    CHECK_THAT(p[0], WithinAbs(5.0, 1e-12));
    CHECK_THAT(p[1], WithinAbs(6.0, 1e-12));
}

TEST_CASE("distance ties are broken by day index") {
    const auto model = one_dim_model({1, -1, 3, -3}, {{1}, {2}, {3}, {4}});
    const auto n = knn::nearest(model, origin(model));
    REQUIRE(n.size() == 3);
    CHECK(n[0].pair_position == 0);
    CHECK(n[1].pair_position == 1);
    CHECK(n[2].pair_position == 2);
}

TEST_CASE("prediction matches the brute-force oracle on random instances") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + gen() % 3;
        const std::size_t count = k + 1 + gen() % 6;
        const std::size_t depth = 1 + gen() % 3;
        const std::size_t width = 1 + gen() % 3;
        const std::size_t dim = depth * width;
        std::vector<knn::TrainingPair> pairs;
        std::vector<oracle::KnnPair> ref;
        for (std::size_t i = 0; i < count; ++i) {
            std::vector<double> ctx(dim), tgt(width);
            for (auto& v : ctx) v = std::round(u(gen));
            for (auto& v : tgt) v = u(gen);
            pairs.push_back({i, ctx, tgt});
            ref.push_back({i, ctx, tgt});
        }
        std::vector<double> q(dim);
        for (auto& v : q) v = std::round(u(gen));
        const knn::KnnModel model({depth, k}, pairs);
        const auto got = knn::predict_day(model, q);
        const auto want = oracle::knn_predict(ref, q, k);
        for (std::size_t j = 0; j < got.size(); ++j) REQUIRE_THAT(got[j], WithinAbs(want[j], 1e-9));
    }
}

TEST_CASE("fit builds one pair per eligible day") {
    const auto train = fixtures::series(30, [](std::size_t d, std::size_t m) { return double(d * m); });
    const auto model = knn::fit(train, {5, 2});
    CHECK(model.pairs().size() == 25);
    CHECK(model.context_length() == 480);
    CHECK(model.target_length() == 96);
    CHECK(model.pairs().front().day_index == 5);
    CHECK(model.pairs().front().target == train[5].samples);
}

TEST_CASE("fit needs D + k + 1 days") {
    const auto train = fixtures::series(7, [](std::size_t, std::size_t) { return 1.0; });
    CHECK(error_of([&] { (void)knn::fit(train, {5, 2}); }) == ErrorKind::InsufficientTrainingDays);
    const auto eight = fixtures::series(8, [](std::size_t, std::size_t) { return 1.0; });
    CHECK(knn::fit(eight, {5, 2}).pairs().size() == 3);
}

TEST_CASE("config validation and shape errors") {
    CHECK_THROWS_AS(knn::KnnConfig({0, 2}).validate(), Error);
    CHECK_THROWS_AS(knn::KnnConfig({5, 1}).validate(), Error);
    const auto model = one_dim_model({1, 2, 4}, {{1}, {2}, {3}});
    const std::vector<double> wrong{1.0, 2.0, 3.0};
    CHECK(error_of([&] { (void)knn::predict_day(model, wrong); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("forecast uses the preceding days of the history") {
    const auto s = fixtures::series(12, [](std::size_t d, std::size_t m) { return double((d % 3) * 100 + m); });
    const auto model = knn::fit(s.slice(0, 10), {2, 2});
    const auto f = knn::forecast(model, s, 10);
    CHECK(f.size() == 96);
    CHECK(error_of([&] { (void)knn::forecast(model, s, 1); }) == ErrorKind::InsufficientHistory);
}

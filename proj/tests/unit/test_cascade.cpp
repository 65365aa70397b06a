#include <doctest.h>

#include <cmath>

#include "sdf/cascade.hpp"
#include "sdf/errors.hpp"
#include "sdf/streams.hpp"

using namespace sdf;

namespace {

CascadeConfig small(std::size_t layers, std::size_t trees, std::uint64_t seed) {
    CascadeConfig c;
    c.layers = layers;
    c.forest.ensemble_size = trees;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("layer input dimensions") {
    const std::vector<double> x5(5, 0.5);
    const std::vector<ClassVector> four_m4(4, ClassVector(4, 0.25));
    CHECK(layer_input(1, x5, four_m4).size() == 21);

    const std::vector<double> x10(10, 1.0);
    const std::vector<ClassVector> four_m2(4, ClassVector{0.3, 0.7});
    const auto in = layer_input(2, x10, four_m2);
    CHECK(in.size() == 18);
    CHECK(in[0] == 0.3);
    CHECK(in[7] == 0.7);
    CHECK(std::vector<double>(in.begin() + 8, in.end()) == x10);

    CHECK(layer_input(0, x5, {}) == x5);
    CHECK_THROWS_AS(layer_input(0, x5, four_m4), ContractError);
    CHECK_THROWS_AS(layer_input(1, x5, std::vector<ClassVector>(3, ClassVector{0.5, 0.5})), ContractError);
    CHECK_THROWS_AS(layer_input(1, x5, {}), ContractError);
}

TEST_CASE("class vectors come first in forest order") {
    const std::vector<double> x{9, 8};
    const std::vector<ClassVector> prev{{1, 0}, {0, 1}, {0.5, 0.5}, {0.2, 0.8}};
    CHECK(layer_input(1, x, prev) == std::vector<double>{1, 0, 0, 1, 0.5, 0.5, 0.2, 0.8, 9, 8});
}

TEST_CASE("layer subspace sizes") {
    CHECK(layer_subspace_sizes(21) == std::array<std::size_t, 4>{5, 5, 10, 15});
    CHECK(layer_subspace_sizes(3) == std::array<std::size_t, 4>{2, 2, 1, 2});
    CHECK(layer_subspace_sizes(1) == std::array<std::size_t, 4>{1, 1, 1, 1});
    for (std::size_t d = 1; d < 100; ++d)
        for (auto m : layer_subspace_sizes(d)) {
            CHECK(m >= 1);
            CHECK(m <= d);
        }
}

TEST_CASE("layer schemas and dimension discipline") {
    const auto base = make_preset("SEA", 1, 1)->schema();
    StreamingDeepForest model(base, small(3, 2, 1));
    CHECK(model.schema_of_layer(0).num_features() == 3);
    CHECK(model.schema_of_layer(1).num_features() == 11);
    CHECK(model.schema_of_layer(2).num_features() == 11);
    auto stream = make_preset("SEA_a", 1, 300);
    while (auto inst = stream->next()) {
        const auto pass = model.forward(inst->x);
        REQUIRE(pass.inputs[0].size() == 3);
        REQUIRE(pass.inputs[1].size() == 11);
        REQUIRE(pass.inputs[2].size() == 11);
        REQUIRE(is_probability_vector(pass.prediction, 1e-9));
        model.train(pass, *inst->y);
    }
    CHECK_THROWS_AS(model.forward(std::vector<double>{1.0}), ContractError);
    CHECK_THROWS_AS(model.train(Instance{{1, 2, 3}, std::nullopt}), ContractError);
    CHECK_THROWS_AS(StreamingDeepForest(base, small(0, 2, 1)), ConfigError);
}

TEST_CASE("single layer predicts the mean of its four forests") {
    auto stream = make_preset("AGRAWAL", 2, 400);
    StreamingDeepForest model(stream->schema(), small(1, 3, 2));
    while (auto inst = stream->next()) {
        const auto p = model.predict_proba(inst->x);
        ClassVector mean(2, 0.0);
        for (std::size_t f = 0; f < 4; ++f) {
            const auto q = model.forest(0, f).predict_proba(inst->x);
            for (int c = 0; c < 2; ++c) mean[c] += q[c] / 4.0;
        }
        for (int c = 0; c < 2; ++c) REQUIRE(p[c] == doctest::Approx(mean[c]).epsilon(1e-12));
        model.train(*inst);
    }
}

TEST_CASE("two-layer model equals a hand-wired composition") {
    auto stream = make_preset("SEA_a", 5, 100);
    const Schema base = stream->schema();
    const CascadeConfig cfg = small(2, 4, 5);
    StreamingDeepForest model(base, cfg);

    std::vector<std::vector<AdaptiveRandomForest>> manual(2);
    for (std::size_t l = 0; l < 2; ++l) {
        auto s = std::make_shared<const Schema>(layer_schema(base, l));
        const auto sizes = layer_subspace_sizes(s->num_features());
        for (std::size_t f = 0; f < 4; ++f) {
            ArfConfig fc = cfg.forest;
            fc.tree.subspace_size = sizes[f];
            fc.seed = derive_seed(cfg.seed, l, f);
            manual[l].emplace_back(s, fc);
        }
    }
    while (auto inst = stream->next()) {
        std::vector<ClassVector> out0;
        for (auto& f : manual[0]) out0.push_back(f.predict_proba(inst->x));
        const auto in1 = layer_input(1, inst->x, out0);
        ClassVector expected(2, 0.0);
        for (auto& f : manual[1]) {
            const auto q = f.predict_proba(in1);
            for (int c = 0; c < 2; ++c) expected[c] += q[c] / 4.0;
        }
        const auto got = model.predict_proba(inst->x);
        for (int c = 0; c < 2; ++c) REQUIRE(got[c] == doctest::Approx(expected[c]).epsilon(1e-12));

        for (auto& f : manual[0]) f.train(inst->x, *inst->y);
        for (auto& f : manual[1]) f.train(in1, *inst->y);
        model.train(*inst);
    }
    for (std::size_t l = 0; l < 2; ++l)
        for (std::size_t f = 0; f < 4; ++f) CHECK(model.forest(l, f).fingerprint() == manual[l][f].fingerprint());
}

TEST_CASE("one training step on an empty model raises the label's posterior") {
    auto stream = make_preset("RBF", 3, 20);
    for (int i = 0; i < 20; ++i) {
        const auto inst = stream->next();
        StreamingDeepForest model(stream->schema(), small(2, 3, 10 + i));
        const auto before = model.forward(inst->x);
        model.train(*inst);
        const auto after = model.forward(inst->x);
        for (std::size_t f = 0; f < 4; ++f)
            CHECK(after.votes[0][f].combined[*inst->y] >= before.votes[0][f].combined[*inst->y]);
    }
}

TEST_CASE("parallel forest updates match sequential ones") {
    auto run = [](std::size_t threads) {
        auto stream = make_preset("AGR_a", 3, 1500);
        CascadeConfig c = small(2, 3, 3);
        c.threads = threads;
        StreamingDeepForest model(stream->schema(), c);
        while (auto inst = stream->next()) model.train(*inst);
        std::string all;
        for (std::size_t l = 0; l < 2; ++l)
            for (std::size_t f = 0; f < 4; ++f) all += model.forest(l, f).fingerprint();
        return all;
    };
    CHECK(run(1) == run(4));
}

TEST_CASE("predict breaks ties toward the lowest class") {
    const auto base = make_preset("RBF", 1, 1)->schema();
    StreamingDeepForest model(base, small(1, 1, 1));
    CHECK(model.predict(std::vector<double>(10, 0.5)) == 0);
    const auto summary = model.summary();
    CHECK(summary.find("layers: 1") != std::string::npos);
}

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdf/active.hpp"
#include "sdf/adwin.hpp"
#include "sdf/cascade.hpp"
#include "sdf/classifier.hpp"
#include "sdf/errors.hpp"
#include "sdf/hoeffding.hpp"
#include "sdf/prequential.hpp"
#include "sdf/ranking.hpp"
#include "sdf/streams.hpp"

namespace py = pybind11;

namespace {

std::unique_ptr<sdf::Stream> open_stream(const std::string& name, std::uint64_t seed, std::uint64_t length,
                                         const std::map<std::string, std::string>& params) {
    if (params.empty() && sdf::is_preset(name)) return sdf::make_preset(name, seed, length);
    auto kv = params;
    kv.try_emplace("kind", name);
    kv.try_emplace("seed", std::to_string(seed));
    kv.try_emplace("length", std::to_string(length));
    return sdf::create_generator(sdf::generator_config_from(kv));
}

// Materializes a stream as (X, y) lists.
py::tuple generate(const std::string& name, std::uint64_t seed, std::uint64_t length,
                   const std::map<std::string, std::string>& params) {
    auto stream = open_stream(name, seed, length, params);
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    while (auto inst = stream->next()) {
        xs.push_back(std::move(inst->x));
        ys.push_back(*inst->y);
    }
    return py::make_tuple(xs, ys);
}

sdf::ArfConfig forest_config(std::size_t trees, double lambda, std::uint64_t seed) {
    sdf::ArfConfig c;
    c.ensemble_size = trees;
    c.lambda = lambda;
    c.seed = seed;
    return c;
}

py::dict summary_dict(const sdf::PrequentialSummary& s) {
    py::dict d;
    d["instances"] = s.instances;
    d["correct"] = s.correct;
    d["labels"] = s.labels;
    d["accuracy"] = s.accuracy;
    d["label_fraction"] = s.label_fraction;
    d["warnings"] = s.drift.warnings;
    d["drifts"] = s.drift.drifts;
    d["wall_seconds"] = s.wall_seconds;
    return d;
}

py::dict prequential(const std::string& stream_name, std::uint64_t length, std::string model, std::size_t layers,
                     std::size_t trees, std::optional<std::string> strategy, double budget, double step,
                     std::uint64_t window, std::uint64_t seed) {
    auto stream = open_stream(stream_name, seed, length, {});
    std::unique_ptr<sdf::Classifier> clf;
    const auto arf = forest_config(trees, 6.0, seed);
    if (model == "sdf") {
        sdf::CascadeConfig c;
        c.layers = layers;
        c.forest = arf;
        c.seed = seed;
        clf = std::make_unique<sdf::CascadeClassifier>(stream->schema(), c);
    } else if (model == "arf") {
        clf = std::make_unique<sdf::ForestClassifier>(stream->schema(), arf);
    } else if (model == "ht") {
        sdf::TreeConfig t;
        t.seed = seed;
        clf = std::make_unique<sdf::TreeClassifier>(stream->schema(), t);
    } else {
        throw sdf::ConfigError("model", "expected sdf, arf or ht");
    }
    sdf::PrequentialOptions opts;
    if (strategy) opts.strategy = sdf::Strategy{sdf::parse_strategy(*strategy)};
    opts.budget = budget;
    opts.step = step;
    opts.window = window;
    opts.seed = seed;
    opts.keep_records = false;
    const auto result = sdf::run_prequential(*clf, *stream, opts);
    py::dict out = summary_dict(result.summary);
    py::list windows;
    for (const auto& w : result.windows) {
        py::dict r;
        r["end"] = w.end;
        r["accuracy"] = w.accuracy;
        r["cumulative_accuracy"] = w.cumulative_accuracy;
        r["label_fraction"] = w.label_fraction;
        windows.append(r);
    }
    out["windows"] = windows;
    return out;
}

sdf::RankMatrix rank_matrix(const std::vector<std::string>& methods, const std::vector<std::string>& datasets,
                            const std::vector<std::vector<double>>& accuracy) {
    sdf::RankMatrix m{methods, datasets, accuracy};
    m.validate();
    return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Streaming Deep Forest core";

    py::register_exception<sdf::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<sdf::DataError>(m, "DataError", PyExc_RuntimeError);
    py::register_exception<sdf::SchemaError>(m, "SchemaError", PyExc_RuntimeError);
    py::register_exception<sdf::ContractError>(m, "ContractError", PyExc_RuntimeError);

    py::class_<sdf::Feature>(m, "Feature")
        .def_readonly("name", &sdf::Feature::name)
        .def_readonly("values", &sdf::Feature::values)
        .def_property_readonly("nominal", &sdf::Feature::is_nominal);

    py::class_<sdf::Schema, std::shared_ptr<sdf::Schema>>(m, "Schema")
        .def_property_readonly("name", &sdf::Schema::name)
        .def_property_readonly("features", &sdf::Schema::features)
        .def_property_readonly("class_labels", &sdf::Schema::class_labels)
        .def_property_readonly("num_features", &sdf::Schema::num_features)
        .def_property_readonly("num_classes", &sdf::Schema::num_classes);

    m.def(
        "stream_schema",
        [](const std::string& name) { return std::make_shared<sdf::Schema>(open_stream(name, 1, 1, {})->schema()); },
        py::arg("name"));
    m.def("generate", &generate, py::arg("name"), py::arg("seed") = 1, py::arg("length") = 1000,
          py::arg("params") = std::map<std::string, std::string>{},
          "Materialize a preset or generator as (X, y) lists.");
    m.def("successor_probability", &sdf::successor_probability, py::arg("t"), py::arg("position"), py::arg("width"));

    m.def("hoeffding_bound", &sdf::hoeffding_bound, py::arg("range"), py::arg("confidence"), py::arg("n"));

    py::class_<sdf::HoeffdingTree>(m, "HoeffdingTree")
        .def(py::init([](const std::string& stream, double grace_period, double split_confidence,
                         double tie_threshold, std::uint64_t seed) {
                 sdf::TreeConfig c;
                 c.grace_period = grace_period;
                 c.split_confidence = split_confidence;
                 c.tie_threshold = tie_threshold;
                 c.seed = seed;
                 auto schema = std::make_shared<const sdf::Schema>(open_stream(stream, 1, 1, {})->schema());
                 return std::make_unique<sdf::HoeffdingTree>(schema, c);
             }),
             py::arg("stream") = "SEA", py::arg("grace_period") = 50.0, py::arg("split_confidence") = 0.01,
             py::arg("tie_threshold") = 0.05, py::arg("seed") = 1)
        .def(
            "train", [](sdf::HoeffdingTree& t, const std::vector<double>& x, int y, double w) { t.train(x, y, w); },
            py::arg("x"), py::arg("y"), py::arg("weight") = 1.0)
        .def("predict_proba",
             [](const sdf::HoeffdingTree& t, const std::vector<double>& x) { return t.predict_proba(x); })
        .def_property_readonly("node_count", &sdf::HoeffdingTree::node_count)
        .def_property_readonly("leaf_count", &sdf::HoeffdingTree::leaf_count)
        .def_property_readonly("depth", &sdf::HoeffdingTree::depth)
        .def_property_readonly("split_count", &sdf::HoeffdingTree::split_count)
        .def("dump", &sdf::HoeffdingTree::dump);

    py::class_<sdf::Adwin>(m, "Adwin")
        .def(py::init<double, std::size_t>(), py::arg("delta") = 0.002, py::arg("max_buckets") = 5)
        .def("add", &sdf::Adwin::add, py::arg("value"))
        .def_property_readonly("estimate", &sdf::Adwin::estimate)
        .def_property_readonly("width", &sdf::Adwin::width)
        .def_property_readonly("variance", &sdf::Adwin::variance)
        .def_property_readonly("detections", &sdf::Adwin::detections)
        .def("reset", &sdf::Adwin::reset);

    py::class_<sdf::StreamingDeepForest>(m, "StreamingDeepForest")
        .def(py::init([](const std::string& stream, std::size_t layers, std::size_t trees, double lambda,
                         std::uint64_t seed) {
                 sdf::CascadeConfig c;
                 c.layers = layers;
                 c.forest = forest_config(trees, lambda, seed);
                 c.seed = seed;
                 return std::make_unique<sdf::StreamingDeepForest>(open_stream(stream, 1, 1, {})->schema(), c);
             }),
             py::arg("stream") = "SEA", py::arg("layers") = 3, py::arg("trees") = 50, py::arg("lambda_") = 6.0,
             py::arg("seed") = 1)
        .def("predict_proba",
             [](const sdf::StreamingDeepForest& f, const std::vector<double>& x) { return f.predict_proba(x); })
        .def("predict", [](const sdf::StreamingDeepForest& f, const std::vector<double>& x) { return f.predict(x); })
        .def(
            "train",
            [](sdf::StreamingDeepForest& f, const std::vector<double>& x, int y) {
                const auto r = f.train(x, y);
                return py::make_tuple(r.warnings, r.drifts);
            },
            py::arg("x"), py::arg("y"))
        .def_property_readonly("layers", &sdf::StreamingDeepForest::layers)
        .def("summary", &sdf::StreamingDeepForest::summary);

    m.def("layer_subspace_sizes", &sdf::layer_subspace_sizes, py::arg("input_dim"));
    m.def(
        "layer_input",
        [](std::size_t layer, const std::vector<double>& x, const std::vector<sdf::ClassVector>& prev) {
            return sdf::layer_input(layer, x, prev);
        },
        py::arg("layer"), py::arg("x"), py::arg("prev") = std::vector<sdf::ClassVector>{});

    py::class_<sdf::BudgetState>(m, "BudgetState")
        .def(py::init<double, double>(), py::arg("budget"), py::arg("step") = 0.01)
        .def_readwrite("labels", &sdf::BudgetState::labels)
        .def_readwrite("seen", &sdf::BudgetState::seen)
        .def_readwrite("budget", &sdf::BudgetState::budget)
        .def_readwrite("threshold", &sdf::BudgetState::threshold)
        .def_readwrite("step", &sdf::BudgetState::step)
        .def_property_readonly("label_fraction", &sdf::BudgetState::label_fraction);

    py::class_<sdf::Rng>(m, "Rng").def(py::init<std::uint64_t>(), py::arg("seed") = 1);

    m.def(
        "decide",
        [](const std::string& strategy, const std::vector<double>& posterior, sdf::BudgetState& state, sdf::Rng& rng,
           double ss_b) {
            return sdf::decide(sdf::Strategy{sdf::parse_strategy(strategy), ss_b}, posterior, state, rng);
        },
        py::arg("strategy"), py::arg("posterior"), py::arg("state"), py::arg("rng"), py::arg("ss_b") = 0.1,
        "One query decision; updates state in place.");
    m.def(
        "threshold_limit_oracle",
        [](double a, double b, double s, std::optional<double> theta, std::size_t iterations) {
            return sdf::threshold_limit_oracle(sdf::ThresholdRecurrence{a, b, s, theta.value_or(b)}, iterations);
        },
        py::arg("a"), py::arg("b"), py::arg("s"), py::arg("theta") = py::none(), py::arg("iterations") = 1000);
    m.def(
        "label_fraction_simulation",
        [](const std::string& strategy, double budget, double a, double b, std::size_t n, std::uint64_t seed,
           double step) {
            return sdf::label_fraction_simulation(sdf::Strategy{sdf::parse_strategy(strategy)}, budget, a, b, n, seed,
                                                  step);
        },
        py::arg("strategy"), py::arg("budget"), py::arg("a") = 0.5, py::arg("b") = 1.0, py::arg("n") = 10000,
        py::arg("seed") = 1, py::arg("step") = 0.01);

    m.def("run_prequential", &prequential, py::arg("stream"), py::arg("length"), py::arg("model") = "sdf",
          py::arg("layers") = 3, py::arg("trees") = 50, py::arg("strategy") = py::none(), py::arg("budget") = 1.0,
          py::arg("step") = 0.01, py::arg("window") = 1000, py::arg("seed") = 1,
          "Test-then-train run; returns the summary with per-window records.");

    m.def(
        "average_ranks",
        [](const std::vector<std::string>& methods, const std::vector<std::string>& datasets,
           const std::vector<std::vector<double>>& accuracy) {
            return sdf::average_ranks(rank_matrix(methods, datasets, accuracy));
        },
        py::arg("methods"), py::arg("datasets"), py::arg("accuracy"));
    m.def("nemenyi_q", &sdf::nemenyi_q, py::arg("k"), py::arg("alpha") = 0.05);
    m.def(
        "friedman_nemenyi",
        [](const std::vector<std::string>& methods, const std::vector<std::string>& datasets,
           const std::vector<std::vector<double>>& accuracy, double alpha) {
            const auto r = sdf::friedman_nemenyi(rank_matrix(methods, datasets, accuracy), alpha);
            py::dict d;
            d["mean_ranks"] = r.mean_ranks;
            d["chi_square"] = r.chi_square;
            d["p_value"] = r.p_value;
            d["reject"] = r.reject;
            d["q_alpha"] = r.q_alpha;
            d["critical_distance"] = r.critical_distance;
            return d;
        },
        py::arg("methods"), py::arg("datasets"), py::arg("accuracy"), py::arg("alpha") = 0.05);
}

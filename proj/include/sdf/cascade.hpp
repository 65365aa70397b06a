#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sdf/arf.hpp"
#include "sdf/parallel.hpp"
#include "sdf/schema.hpp"

namespace sdf {

inline constexpr std::size_t kForestsPerLayer = 4;

struct CascadeConfig {
    std::size_t layers = 3;
    // Template for every forest; subspace_size and seed are set per forest.
    ArfConfig forest;
    std::size_t threads = 1;
    std::uint64_t seed = 1;

    CascadeConfig() { forest.ensemble_size = 50; }
    void validate() const;
};

// Subspace sizes of the four forests for a layer input of dimension d:
// floor(sqrt d)+1, floor(log2 d)+1, floor(d/2), round(0.7 d), each clamped to [1, d].
std::array<std::size_t, kForestsPerLayer> layer_subspace_sizes(std::size_t input_dim);

// Layer 0 consumes x unchanged; deeper layers consume [cv1 | cv2 | cv3 | cv4 | x].
// prev must be empty for layer 0 and hold exactly four class vectors otherwise.
std::vector<double> layer_input(std::size_t layer, std::span<const double> x, std::span<const ClassVector> prev);

// Schema seen by a layer: the base schema for layer 0, otherwise 4M numeric
// class-vector features followed by the base features.
Schema layer_schema(const Schema& base, std::size_t layer);

// Layered ensemble of Adaptive Random Forests; four forests per layer, each
// layer fed the previous layer's class vectors concatenated with x.
class StreamingDeepForest {
public:
    // Everything a forward pass produced; train(pass, y) reuses it.
    struct ForwardPass {
        std::vector<std::vector<double>> inputs;                       // per layer
        std::vector<std::array<ForestVotes, kForestsPerLayer>> votes;  // per layer, pre-update
        ClassVector prediction;
    };

    StreamingDeepForest(const Schema& schema, CascadeConfig config);

    ForwardPass forward(std::span<const double> x) const;
    ClassVector predict_proba(std::span<const double> x) const;
    // argmax, ties to the lowest class index
    int predict(std::span<const double> x) const;

    // Updates layers 0..L-1 in order, each on the input built from the
    // pre-update outputs of the layer before it.
    DriftReport train(const Instance& instance);
    DriftReport train(std::span<const double> x, int label);
    // pass must come from forward() on the same x with no update in between.
    DriftReport train(const ForwardPass& pass, int label);

    std::size_t layers() const noexcept { return layers_.size(); }
    const AdaptiveRandomForest& forest(std::size_t layer, std::size_t index) const { return layers_.at(layer).at(index); }
    const Schema& schema() const noexcept { return *schemas_.front(); }
    const Schema& schema_of_layer(std::size_t layer) const { return *schemas_.at(layer); }
    const CascadeConfig& config() const noexcept { return config_; }
    const DriftReport& totals() const noexcept { return totals_; }

    // Layer count, per-forest tree counts and drift counters as key: value text.
    std::string summary() const;

private:
    CascadeConfig config_;
    std::vector<std::shared_ptr<const Schema>> schemas_;
    std::shared_ptr<WorkerPool> pool_;
    std::vector<std::vector<AdaptiveRandomForest>> layers_;
    DriftReport totals_;
};

}  // namespace sdf

#include "sdf/cascade.hpp"

#include <cmath>
#include <sstream>

#include "sdf/errors.hpp"

namespace sdf {

void CascadeConfig::validate() const {
    if (layers < 1) throw ConfigError("layers", "must be >= 1");
    if (forest.ensemble_size < 1) throw ConfigError("trees", "must be >= 1");
}

std::array<std::size_t, kForestsPerLayer> layer_subspace_sizes(std::size_t d) {
    const double dd = static_cast<double>(d);
    auto clamp = [d](double m) { return std::clamp<std::size_t>(static_cast<std::size_t>(m), 1, d); };
    return {clamp(std::floor(std::sqrt(dd)) + 1), clamp(std::floor(std::log2(dd)) + 1), clamp(std::floor(dd / 2)),
            clamp(std::round(0.7 * dd))};
}

std::vector<double> layer_input(std::size_t layer, std::span<const double> x, std::span<const ClassVector> prev) {
    if (layer == 0) {
        if (!prev.empty()) throw ContractError("layer_input: layer 0 takes no class vectors");
        return {x.begin(), x.end()};
    }
    if (prev.size() != kForestsPerLayer)
        throw ContractError("layer_input: layer " + std::to_string(layer) + " needs exactly 4 class vectors, got " +
                            std::to_string(prev.size()));
    std::vector<double> out;
    out.reserve(prev.size() * prev.front().size() + x.size());
    for (const auto& cv : prev) out.insert(out.end(), cv.begin(), cv.end());
    out.insert(out.end(), x.begin(), x.end());
    return out;
}

Schema layer_schema(const Schema& base, std::size_t layer) {
    if (layer == 0) return base;
    std::vector<Feature> features;
    for (std::size_t f = 0; f < kForestsPerLayer; ++f)
        for (std::size_t c = 0; c < base.num_classes(); ++c)
            features.push_back(Feature::numeric("cv" + std::to_string(f + 1) + "_" + base.class_labels()[c]));
    for (const auto& feat : base.features()) features.push_back(feat);
    return Schema(base.name() + "/layer" + std::to_string(layer), std::move(features), base.class_labels());
}

StreamingDeepForest::StreamingDeepForest(const Schema& schema, CascadeConfig config) : config_(std::move(config)) {
    config_.validate();
    if (config_.threads > 1) pool_ = std::make_shared<WorkerPool>(config_.threads);
    for (std::size_t l = 0; l < config_.layers; ++l) {
        auto layer_s = std::make_shared<const Schema>(layer_schema(schema, l));
        const auto sizes = layer_subspace_sizes(layer_s->num_features());
        std::vector<AdaptiveRandomForest> forests;
        forests.reserve(kForestsPerLayer);
        for (std::size_t f = 0; f < kForestsPerLayer; ++f) {
            ArfConfig fc = config_.forest;
            fc.tree.subspace_size = sizes[f];
            fc.seed = derive_seed(config_.seed, l, f);
            fc.threads = 1;
            forests.emplace_back(layer_s, fc, pool_);
        }
        schemas_.push_back(std::move(layer_s));
        layers_.push_back(std::move(forests));
    }
}

StreamingDeepForest::ForwardPass StreamingDeepForest::forward(std::span<const double> x) const {
    if (x.size() != schemas_.front()->num_features())
        throw ContractError("StreamingDeepForest: instance has the wrong feature count");
    ForwardPass pass;
    pass.inputs.reserve(layers_.size());
    pass.votes.resize(layers_.size());
    std::vector<ClassVector> prev;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        pass.inputs.push_back(layer_input(l, x, prev));
        prev.clear();
        for (std::size_t f = 0; f < kForestsPerLayer; ++f) {
            pass.votes[l][f] = layers_[l][f].vote(pass.inputs[l]);
            prev.push_back(pass.votes[l][f].combined);
        }
    }
    const std::size_t m = schemas_.front()->num_classes();
    pass.prediction.assign(m, 0.0);
    for (const auto& cv : prev)
        for (std::size_t c = 0; c < m; ++c) pass.prediction[c] += cv[c] / static_cast<double>(kForestsPerLayer);
    normalize(pass.prediction);
    return pass;
}

ClassVector StreamingDeepForest::predict_proba(std::span<const double> x) const { return forward(x).prediction; }

int StreamingDeepForest::predict(std::span<const double> x) const {
    return static_cast<int>(argmax(predict_proba(x)));
}

DriftReport StreamingDeepForest::train(const Instance& instance) {
    if (!instance.y) throw ContractError("StreamingDeepForest::train needs a labeled instance");
    return train(instance.x, *instance.y);
}

DriftReport StreamingDeepForest::train(std::span<const double> x, int label) { return train(forward(x), label); }

DriftReport StreamingDeepForest::train(const ForwardPass& pass, int label) {
    if (pass.inputs.size() != layers_.size()) throw ContractError("StreamingDeepForest::train: pass/layer mismatch");
    DriftReport report;
    for (std::size_t l = 0; l < layers_.size(); ++l)
        for (std::size_t f = 0; f < kForestsPerLayer; ++f)
            report += layers_[l][f].train(pass.inputs[l], label, pass.votes[l][f]);
    totals_ += report;
    return report;
}

std::string StreamingDeepForest::summary() const {
    std::ostringstream out;
    out << "layers: " << layers_.size() << "\n";
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        out << "layer " << l << ": input_dim=" << schemas_[l]->num_features() << "\n";
        for (std::size_t f = 0; f < kForestsPerLayer; ++f) {
            const auto& forest = layers_[l][f];
            std::size_t nodes = 0;
            std::size_t warning = 0;
            for (std::size_t t = 0; t < forest.size(); ++t) {
                nodes += forest.member(t).tree().node_count();
                warning += forest.member(t).in_warning() ? 1 : 0;
            }
            out << "  forest " << f << ": trees=" << forest.size()
                << " subspace=" << forest.config().tree.subspace_size << " nodes=" << nodes
                << " in_warning=" << warning << " warnings=" << forest.totals().warnings
                << " drifts=" << forest.totals().drifts << "\n";
        }
    }
    out << "total_warnings: " << totals_.warnings << "\n";
    out << "total_drifts: " << totals_.drifts << "\n";
    return out.str();
}

}  // namespace sdf

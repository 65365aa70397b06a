#include "sdf/arf.hpp"

#include <cmath>
#include <sstream>

#include "sdf/errors.hpp"

namespace sdf {

std::size_t default_subspace_size(std::size_t num_features) {
    const auto m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(num_features)))) + 1;
    return std::min(m, num_features);
}

void ArfConfig::validate(std::size_t num_features) const {
    if (ensemble_size < 1) throw ConfigError("ensemble_size", "must be >= 1");
    if (!(lambda > 0.0)) throw ConfigError("lambda", "must be > 0");
    if (!(warning_delta > 0.0 && warning_delta < 1.0)) throw ConfigError("warning_delta", "must be in (0, 1)");
    if (!(drift_delta > 0.0 && drift_delta < 1.0)) throw ConfigError("drift_delta", "must be in (0, 1)");
    if (!(drift_delta < warning_delta)) throw ConfigError("drift_delta", "must be smaller than warning_delta");
    tree.validate(num_features);
}

ArfMember::ArfMember(std::shared_ptr<const Schema> schema, const TreeConfig& tree, double warning_delta,
                     double drift_delta, std::uint64_t seed)
    : schema_(std::move(schema)),
      tree_config_(tree),
      seed_(seed),
      rng_(seed),
      warning_(warning_delta),
      drift_(drift_delta) {
    tree_ = fresh_tree(tree_id_);
}

std::unique_ptr<HoeffdingTree> ArfMember::fresh_tree(std::uint64_t& id) {
    id = trees_created_++;
    TreeConfig c = tree_config_;
    c.seed = derive_seed(seed_, id, 7);
    return std::make_unique<HoeffdingTree>(schema_, c);
}

double ArfMember::weight() const noexcept {
    return warning_.width() ? 1.0 - warning_.estimate() : 0.0;
}

void ArfMember::on_warning() { background_ = fresh_tree(background_id_); }

void ArfMember::on_drift() {
    if (background_) {
        tree_ = std::move(background_);
        tree_id_ = background_id_;
    } else {
        tree_ = fresh_tree(tree_id_);
    }
    warning_.reset();
    drift_.reset();
}

DriftReport ArfMember::train(std::span<const double> x, int label, const ClassVector& votes, double lambda,
                             bool detect, bool background_learning) {
    DriftReport report;
    const bool correct = argmax(votes) == static_cast<std::size_t>(label);
    const unsigned k = poisson(rng_, lambda);
    if (k > 0) {
        tree_->train(x, label, k, votes);
        if (background_) background_->train(x, label, k);
    }
    const double error = correct ? 0.0 : 1.0;
    if (!detect) {
        // keeps the weight estimate current
        warning_.add(error);
        return report;
    }
    // Only a rise in the error estimate counts as a signal.
    const double warn_before = warning_.estimate();
    if (warning_.add(error) && background_learning && warning_.estimate() > warn_before) {
        on_warning();
        ++report.warnings;
    }
    const double drift_before = drift_.estimate();
    if (drift_.add(error) && drift_.estimate() > drift_before) {
        on_drift();
        ++report.drifts;
    }
    return report;
}

std::string ArfMember::fingerprint() const {
    std::ostringstream out;
    out << "tree " << tree_id_ << "\n" << tree_->dump();
    if (background_) out << "background " << background_id_ << "\n" << background_->dump();
    out.precision(17);
    out << "warning " << warning_.width() << " " << warning_.total() << " drift " << drift_.width() << " "
        << drift_.total() << "\n";
    return out.str();
}

ClassVector combine_votes(const std::vector<ClassVector>& posteriors, const std::vector<double>& weights) {
    const std::size_t m = posteriors.front().size();
    ClassVector out(m, 0.0);
    double total = 0.0;
    for (double w : weights) total += w;
    const bool uniform = !(total > 0.0);
    for (std::size_t t = 0; t < posteriors.size(); ++t) {
        const double w = uniform ? 1.0 : weights[t];
        if (w == 0.0) continue;
        for (std::size_t c = 0; c < m; ++c) out[c] += w * posteriors[t][c];
    }
    normalize(out);
    return out;
}

AdaptiveRandomForest::AdaptiveRandomForest(std::shared_ptr<const Schema> schema, ArfConfig config,
                                           std::shared_ptr<WorkerPool> pool)
    : schema_(std::move(schema)), config_(config), pool_(std::move(pool)) {
    if (!schema_) throw ContractError("AdaptiveRandomForest needs a schema");
    if (config_.tree.subspace_size == 0) config_.tree.subspace_size = default_subspace_size(schema_->num_features());
    config_.validate(schema_->num_features());
    if (!pool_ && config_.threads > 1) pool_ = std::make_shared<WorkerPool>(config_.threads);
    members_.reserve(config_.ensemble_size);
    for (std::size_t i = 0; i < config_.ensemble_size; ++i)
        members_.emplace_back(schema_, config_.tree, config_.warning_delta, config_.drift_delta,
                              derive_seed(config_.seed, i, 1));
}

ForestVotes AdaptiveRandomForest::vote(std::span<const double> x) const {
    ForestVotes out;
    out.members.resize(members_.size());
    auto body = [&](std::size_t i) { out.members[i] = members_[i].tree().predict_proba(x); };
    if (pool_) {
        pool_->parallel_for(members_.size(), body);
    } else {
        for (std::size_t i = 0; i < members_.size(); ++i) body(i);
    }
    std::vector<double> weights(members_.size());
    for (std::size_t i = 0; i < members_.size(); ++i) weights[i] = members_[i].weight();
    out.combined = combine_votes(out.members, weights);
    return out;
}

ClassVector AdaptiveRandomForest::predict_proba(std::span<const double> x) const { return vote(x).combined; }

DriftReport AdaptiveRandomForest::train(const Instance& instance) {
    if (!instance.y) throw ContractError("AdaptiveRandomForest::train needs a labeled instance");
    return train(instance.x, *instance.y);
}

DriftReport AdaptiveRandomForest::train(std::span<const double> x, int label) { return train(x, label, vote(x)); }

DriftReport AdaptiveRandomForest::train(std::span<const double> x, int label, const ForestVotes& votes) {
    if (label < 0 || static_cast<std::size_t>(label) >= schema_->num_classes())
        throw ContractError("AdaptiveRandomForest::train: label out of range");
    std::vector<DriftReport> reports(members_.size());
    auto body = [&](std::size_t i) {
        reports[i] = members_[i].train(x, label, votes.members[i], config_.lambda, config_.drift_detection,
                                       config_.background_learning);
    };
    if (pool_) {
        pool_->parallel_for(members_.size(), body);
    } else {
        for (std::size_t i = 0; i < members_.size(); ++i) body(i);
    }
    DriftReport sum;
    for (const auto& r : reports) sum += r;
    totals_ += sum;
    return sum;
}

std::string AdaptiveRandomForest::fingerprint() const {
    std::string out;
    for (const auto& m : members_) out += m.fingerprint();
    return out;
}

}  // namespace sdf

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdf/adwin.hpp"
#include "sdf/hoeffding.hpp"
#include "sdf/parallel.hpp"
#include "sdf/random.hpp"
#include "sdf/schema.hpp"

namespace sdf {

struct DriftReport {
    std::size_t warnings = 0;
    std::size_t drifts = 0;

    DriftReport& operator+=(const DriftReport& o) {
        warnings += o.warnings;
        drifts += o.drifts;
        return *this;
    }
    bool operator==(const DriftReport&) const = default;
};

struct ArfConfig {
    std::size_t ensemble_size = 50;
    TreeConfig tree;  // tree.subspace_size 0 selects floor(sqrt(d)) + 1
    double lambda = 6.0;
    double warning_delta = 1e-4;
    double drift_delta = 1e-5;
    bool drift_detection = true;
    bool background_learning = true;
    std::size_t threads = 1;
    std::uint64_t seed = 1;

    void validate(std::size_t num_features) const;
};

// floor(sqrt(d)) + 1, capped at d.
std::size_t default_subspace_size(std::size_t num_features);

class ArfMember {
public:
    ArfMember(std::shared_ptr<const Schema> schema, const TreeConfig& tree, double warning_delta,
              double drift_delta, std::uint64_t seed);

    const HoeffdingTree& tree() const noexcept { return *tree_; }
    const HoeffdingTree* background() const noexcept { return background_.get(); }
    bool in_warning() const noexcept { return background_ != nullptr; }

    // Serial numbers; a new tree gets the next id from this member's counter.
    std::uint64_t tree_id() const noexcept { return tree_id_; }
    std::optional<std::uint64_t> background_id() const {
        return background_ ? std::optional(background_id_) : std::nullopt;
    }

    // Prequential correctness: 1 - warning-detector error estimate; 0 when the
    // detector is empty.
    double weight() const noexcept;

    const Adwin& warning_detector() const noexcept { return warning_; }
    const Adwin& drift_detector() const noexcept { return drift_; }

    // One online-bagging step. votes are this member's pre-update posterior on x.
    DriftReport train(std::span<const double> x, int label, const ClassVector& votes, double lambda,
                      bool detect, bool background_learning);

    // Detector events, also reachable directly.
    void on_warning();
    void on_drift();

    std::string fingerprint() const;

private:
    std::unique_ptr<HoeffdingTree> fresh_tree(std::uint64_t& id);

    std::shared_ptr<const Schema> schema_;
    TreeConfig tree_config_;
    std::uint64_t seed_;
    Rng rng_;
    std::uint64_t trees_created_ = 0;
    std::unique_ptr<HoeffdingTree> tree_;
    std::unique_ptr<HoeffdingTree> background_;
    std::uint64_t tree_id_ = 0;
    std::uint64_t background_id_ = 0;
    Adwin warning_;
    Adwin drift_;
};

// Member posteriors together with their weighted combination.
struct ForestVotes {
    ClassVector combined;
    std::vector<ClassVector> members;
};

// Adaptive Random Forest: online-bagged Hoeffding trees, each with a warning
// and a drift detector and a background tree grown during warnings.
class AdaptiveRandomForest {
public:
    AdaptiveRandomForest(std::shared_ptr<const Schema> schema, ArfConfig config,
                         std::shared_ptr<WorkerPool> pool = nullptr);

    ClassVector predict_proba(std::span<const double> x) const;
    ForestVotes vote(std::span<const double> x) const;

    DriftReport train(const Instance& instance);
    DriftReport train(std::span<const double> x, int label);
    // Reuses member votes already computed on this x by vote().
    DriftReport train(std::span<const double> x, int label, const ForestVotes& votes);

    std::size_t size() const noexcept { return members_.size(); }
    const ArfMember& member(std::size_t i) const { return members_.at(i); }
    ArfMember& member(std::size_t i) { return members_.at(i); }

    const ArfConfig& config() const noexcept { return config_; }
    const Schema& schema() const noexcept { return *schema_; }
    const DriftReport& totals() const noexcept { return totals_; }

    // Use the given pool for member-parallel work (nullptr runs sequentially).
    void set_pool(std::shared_ptr<WorkerPool> pool) { pool_ = std::move(pool); }

    std::string fingerprint() const;

private:
    std::shared_ptr<const Schema> schema_;
    ArfConfig config_;
    std::shared_ptr<WorkerPool> pool_;
    std::vector<ArfMember> members_;
    DriftReport totals_;
};

// Weighted average of member posteriors; uniform weights when all are zero.
ClassVector combine_votes(const std::vector<ClassVector>& posteriors, const std::vector<double>& weights);

}  // namespace sdf

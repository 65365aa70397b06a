#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sdf/random.hpp"
#include "sdf/schema.hpp"

namespace sdf {

enum class LeafPrediction { majority_class, naive_bayes, adaptive };

struct TreeConfig {
    double grace_period = 50.0;
    double split_confidence = 0.01;
    double tie_threshold = 0.05;
    std::size_t subspace_size = 0;  // features per leaf; 0 means all
    LeafPrediction leaf_prediction = LeafPrediction::adaptive;
    int numeric_split_points = 10;
    double min_branch_fraction = 0.01;
    std::uint64_t seed = 1;

    // Throws ConfigError for out-of-range values given d input features.
    void validate(std::size_t num_features) const;
};

// epsilon = sqrt(range^2 ln(1/confidence) / (2 n)). Throws std::domain_error
// unless n > 0, range > 0 and confidence in (0, 1).
double hoeffding_bound(double range, double confidence, double n);

// Entropy in bits of an unnormalized class distribution.
double entropy(std::span<const double> dist);

// Information gain of a partition. Returns -inf when fewer than two branches
// hold at least min_branch_fraction of the total weight.
double info_gain(std::span<const double> pre, const std::vector<std::vector<double>>& post,
                 double min_branch_fraction);

// Weighted incremental Gaussian (Welford).
class GaussianEstimator {
public:
    void add(double value, double weight);
    double weight() const noexcept { return weight_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return weight_ > 1.0 ? var_sum_ / (weight_ - 1.0) : 0.0; }
    double variance_sum() const noexcept { return var_sum_; }
    double std_dev() const;
    double density(double value) const;
    // Estimated weight below, at and above value.
    std::array<double, 3> split_weights(double value) const;

private:
    double weight_ = 0.0;
    double mean_ = 0.0;
    double var_sum_ = 0.0;
};

struct NumericObserver {
    std::vector<GaussianEstimator> per_class;
    std::vector<double> min;
    std::vector<double> max;
};

struct NominalObserver {
    std::size_t values = 0;
    std::vector<double> counts;  // counts[value * M + class]

    double count(std::size_t value, std::size_t cls, std::size_t num_classes) const {
        return counts[value * num_classes + cls];
    }
};

struct FeatureObserver {
    std::size_t feature = 0;
    bool nominal = false;
    NumericObserver numeric;
    NominalObserver categorical;
};

struct LeafStats {
    std::vector<double> class_counts;
    std::vector<std::size_t> active;  // sorted feature ids, fixed at creation
    std::vector<FeatureObserver> observers;  // one per active feature
    double weight_at_last_attempt = 0.0;
    double nb_correct = 0.0;
    double mc_correct = 0.0;

    double total_weight() const;
};

struct SplitCandidate {
    long feature = -1;  // -1 is the "do not split" candidate
    bool nominal = false;
    double threshold = 0.0;
    double merit = 0.0;
    std::vector<std::vector<double>> branches;
};

struct SplitEvaluation {
    SplitCandidate best;
    SplitCandidate second;
    double range = 0.0;
    double epsilon = 0.0;
    double weight = 0.0;
    bool should_split = false;
};

// Ranks all candidate splits of a leaf. Pure function of the leaf statistics.
SplitEvaluation evaluate_split(const LeafStats& leaf, std::size_t num_classes, const TreeConfig& config);

// Naive Bayes posterior from leaf statistics over the leaf's active features.
ClassVector naive_bayes_posterior(const LeafStats& leaf, std::span<const double> x);

// Hoeffding tree with Naive Bayes leaves; each leaf draws its own random
// feature subspace when it is created. Children of a split start empty.
class HoeffdingTree {
public:
    using SplitObserver = std::function<void(const LeafStats&, const SplitEvaluation&)>;

    HoeffdingTree(std::shared_ptr<const Schema> schema, TreeConfig config);

    // Requires instance.y; weight must be >= 0 (0 is a no-op).
    void train(const Instance& instance, double weight = 1.0);
    void train(std::span<const double> x, int label, double weight = 1.0);
    // Same, with predict_proba(x) of the current tree supplied by the caller.
    void train(std::span<const double> x, int label, double weight, const ClassVector& current_posterior);

    ClassVector predict_proba(std::span<const double> x) const;

    const LeafStats& leaf_for(std::span<const double> x) const;

    // Called with the leaf statistics just before a split replaces the leaf.
    void set_split_observer(SplitObserver observer) { on_split_ = std::move(observer); }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t leaf_count() const;
    std::size_t depth() const;
    std::size_t split_count() const noexcept { return splits_; }

    double weight_trained() const noexcept { return weight_trained_; }
    double frozen_weight() const noexcept { return frozen_weight_; }
    double leaf_weight_sum() const;

    const Schema& schema() const noexcept { return *schema_; }
    const TreeConfig& config() const noexcept { return config_; }

    // Indented text rendering of the structure.
    std::string dump() const;

private:
    struct Node {
        long feature = -1;
        bool nominal = false;
        double threshold = 0.0;
        std::vector<std::size_t> children;
        std::unique_ptr<LeafStats> leaf;
    };

    std::size_t route(std::span<const double> x) const;
    std::unique_ptr<LeafStats> new_leaf();
    void attempt_split(std::size_t node);
    void train_impl(std::span<const double> x, int label, double weight, const ClassVector* posterior);
    ClassVector leaf_posterior(const LeafStats& leaf, std::span<const double> x) const;

    std::shared_ptr<const Schema> schema_;
    TreeConfig config_;
    std::size_t subspace_;
    Rng rng_;
    std::vector<Node> nodes_;
    std::size_t splits_ = 0;
    double weight_trained_ = 0.0;
    double frozen_weight_ = 0.0;
    SplitObserver on_split_;
};

}  // namespace sdf

#include "sdf/hoeffding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sdf/errors.hpp"

namespace sdf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Information gain with the parent entropy precomputed.
double gain_given(double pre_entropy, const std::vector<std::vector<double>>& post, double min_branch_fraction) {
    std::array<double, 8> small{};
    std::vector<double> large;
    double* weights = small.data();
    if (post.size() > small.size()) {
        large.resize(post.size());
        weights = large.data();
    }
    double total = 0.0;
    for (std::size_t i = 0; i < post.size(); ++i) {
        weights[i] = std::accumulate(post[i].begin(), post[i].end(), 0.0);
        total += weights[i];
    }
    if (total <= 0.0) return kNegInf;
    int big = 0;
    for (std::size_t i = 0; i < post.size(); ++i)
        if (weights[i] / total > min_branch_fraction) ++big;
    if (big < 2) return kNegInf;
    double post_entropy = 0.0;
    for (std::size_t i = 0; i < post.size(); ++i) post_entropy += weights[i] / total * entropy(post[i]);
    return pre_entropy - post_entropy;
}

SplitCandidate best_numeric_split(const FeatureObserver& obs, double pre_entropy, std::size_t num_classes,
                                  const TreeConfig& config) {
    SplitCandidate best;
    best.feature = static_cast<long>(obs.feature);
    best.merit = kNegInf;
    const auto& num = obs.numeric;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (num.per_class[c].weight() <= 0.0) continue;
        lo = std::min(lo, num.min[c]);
        hi = std::max(hi, num.max[c]);
    }
    if (!(lo < hi)) return best;
    const double bin = (hi - lo) / (config.numeric_split_points + 1);
    std::vector<std::vector<double>> branches(2, std::vector<double>(num_classes));
    auto fill = [&](double v) {
        std::fill(branches[0].begin(), branches[0].end(), 0.0);
        std::fill(branches[1].begin(), branches[1].end(), 0.0);
        for (std::size_t c = 0; c < num_classes; ++c) {
            const auto& est = num.per_class[c];
            if (est.weight() <= 0.0) continue;
            if (v < num.min[c]) {
                branches[1][c] += est.weight();
            } else if (v >= num.max[c]) {
                branches[0][c] += est.weight();
            } else {
                const auto w = est.split_weights(v);
                branches[0][c] += w[0] + w[1];
                branches[1][c] += w[2];
            }
        }
    };
    for (int i = 1; i <= config.numeric_split_points; ++i) {
        const double v = lo + bin * i;
        if (!(v > lo && v < hi)) continue;
        fill(v);
        const double merit = gain_given(pre_entropy, branches, config.min_branch_fraction);
        if (merit > best.merit) {
            best.merit = merit;
            best.threshold = v;
        }
    }
    if (best.merit > kNegInf) {
        fill(best.threshold);
        best.branches = std::move(branches);
    }
    return best;
}

SplitCandidate nominal_split(const FeatureObserver& obs, double pre_entropy, std::size_t num_classes,
                             const TreeConfig& config) {
    SplitCandidate cand;
    cand.feature = static_cast<long>(obs.feature);
    cand.nominal = true;
    cand.branches.assign(obs.categorical.values, std::vector<double>(num_classes));
    for (std::size_t v = 0; v < obs.categorical.values; ++v)
        for (std::size_t c = 0; c < num_classes; ++c) cand.branches[v][c] = obs.categorical.count(v, c, num_classes);
    cand.merit = gain_given(pre_entropy, cand.branches, config.min_branch_fraction);
    return cand;
}

}  // namespace

void TreeConfig::validate(std::size_t num_features) const {
    if (!(grace_period >= 1.0)) throw ConfigError("grace_period", "must be >= 1");
    if (!(split_confidence > 0.0 && split_confidence < 1.0))
        throw ConfigError("split_confidence", "must be in (0, 1)");
    if (!(tie_threshold >= 0.0)) throw ConfigError("tie_threshold", "must be >= 0");
    if (subspace_size > num_features) throw ConfigError("subspace_size", "must not exceed the feature count");
    if (numeric_split_points < 1) throw ConfigError("numeric_split_points", "must be >= 1");
    if (!(min_branch_fraction >= 0.0 && min_branch_fraction < 0.5))
        throw ConfigError("min_branch_fraction", "must be in [0, 0.5)");
}

double hoeffding_bound(double range, double confidence, double n) {
    if (!(n > 0.0)) throw std::domain_error("hoeffding_bound: n must be > 0");
    if (!(range > 0.0)) throw std::domain_error("hoeffding_bound: range must be > 0");
    if (!(confidence > 0.0 && confidence < 1.0)) throw std::domain_error("hoeffding_bound: confidence must be in (0, 1)");
    return std::sqrt(range * range * std::log(1.0 / confidence) / (2.0 * n));
}

double entropy(std::span<const double> dist) {
    const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double w : dist) {
        if (w > 0.0) {
            const double p = w / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

double info_gain(std::span<const double> pre, const std::vector<std::vector<double>>& post,
                 double min_branch_fraction) {
    return gain_given(entropy(pre), post, min_branch_fraction);
}

void GaussianEstimator::add(double value, double weight) {
    if (weight <= 0.0) return;
    if (weight_ > 0.0) {
        weight_ += weight;
        const double last = mean_;
        mean_ += weight * (value - last) / weight_;
        var_sum_ += weight * (value - last) * (value - mean_);
    } else {
        mean_ = value;
        weight_ = weight;
    }
}

double GaussianEstimator::std_dev() const { return std::sqrt(variance()); }

double GaussianEstimator::density(double value) const {
    if (weight_ <= 0.0) return 0.0;
    const double sd = std_dev();
    if (sd > 0.0) {
        const double diff = value - mean_;
        return std::exp(-(diff * diff) / (2.0 * sd * sd)) / (std::sqrt(2.0 * M_PI) * sd);
    }
    return value == mean_ ? 1.0 : 0.0;
}

std::array<double, 3> GaussianEstimator::split_weights(double value) const {
    const double equal = density(value) * weight_;
    const double sd = std_dev();
    double less = 0.0;
    if (sd > 0.0) {
        less = normal_cdf((value - mean_) / sd) * weight_ - equal;
    } else if (value < mean_) {
        less = weight_ - equal;
    }
    const double greater = std::max(0.0, weight_ - equal - less);
    return {less, equal, greater};
}

double LeafStats::total_weight() const { return std::accumulate(class_counts.begin(), class_counts.end(), 0.0); }

SplitEvaluation evaluate_split(const LeafStats& leaf, std::size_t num_classes, const TreeConfig& config) {
    SplitEvaluation out;
    const double pre_entropy = entropy(leaf.class_counts);
    std::vector<SplitCandidate> candidates;
    candidates.reserve(leaf.observers.size() + 1);
    candidates.emplace_back();  // no split, merit 0
    for (const auto& obs : leaf.observers) {
        candidates.push_back(obs.nominal ? nominal_split(obs, pre_entropy, num_classes, config)
                                         : best_numeric_split(obs, pre_entropy, num_classes, config));
    }
    // stable: among equal merits the earlier (null split, then lower feature id) ranks higher
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const SplitCandidate& a, const SplitCandidate& b) { return a.merit > b.merit; });
    out.best = candidates[0];
    out.second = candidates[1];
    out.weight = leaf.total_weight();
    out.range = std::log2(static_cast<double>(std::max<std::size_t>(num_classes, 2)));
    out.epsilon = hoeffding_bound(out.range, config.split_confidence, out.weight);
    out.should_split = out.best.feature >= 0 &&
                       (out.best.merit - out.second.merit > out.epsilon || out.epsilon < config.tie_threshold);
    return out;
}

ClassVector naive_bayes_posterior(const LeafStats& leaf, std::span<const double> x) {
    const std::size_t m = leaf.class_counts.size();
    const double total = leaf.total_weight();
    ClassVector out(m, 0.0);
    if (total <= 0.0) {
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(m));
        return out;
    }
    ClassVector& logp = out;
    for (std::size_t c = 0; c < m; ++c)
        logp[c] = leaf.class_counts[c] > 0.0 ? std::log(leaf.class_counts[c] / total) : kNegInf;
    for (const auto& obs : leaf.observers) {
        const double v = x[obs.feature];
        if (obs.nominal) {
            const auto value = static_cast<std::size_t>(v);
            const double vals = static_cast<double>(obs.categorical.values);
            for (std::size_t c = 0; c < m; ++c) {
                if (logp[c] == kNegInf) continue;
                const double count = value < obs.categorical.values ? obs.categorical.count(value, c, m) : 0.0;
                logp[c] += std::log((count + 1.0) / (leaf.class_counts[c] + vals));
            }
        } else {
            for (std::size_t c = 0; c < m; ++c) {
                if (logp[c] == kNegInf) continue;
                const double dens = obs.numeric.per_class[c].density(v);
                logp[c] = dens > 0.0 ? logp[c] + std::log(dens) : kNegInf;
            }
        }
    }
    const double top = *std::max_element(logp.begin(), logp.end());
    if (top == kNegInf) {
        out = leaf.class_counts;
        normalize(out);
        return out;
    }
    for (std::size_t c = 0; c < m; ++c) out[c] = logp[c] == kNegInf ? 0.0 : std::exp(logp[c] - top);
    normalize(out);
    return out;
}

HoeffdingTree::HoeffdingTree(std::shared_ptr<const Schema> schema, TreeConfig config)
    : schema_(std::move(schema)), config_(config), rng_(config.seed) {
    if (!schema_) throw ContractError("HoeffdingTree needs a schema");
    config_.validate(schema_->num_features());
    subspace_ = config_.subspace_size == 0 ? schema_->num_features() : config_.subspace_size;
    nodes_.emplace_back();
    nodes_[0].leaf = new_leaf();
}

std::unique_ptr<LeafStats> HoeffdingTree::new_leaf() {
    const std::size_t d = schema_->num_features();
    const std::size_t m = schema_->num_classes();
    auto leaf = std::make_unique<LeafStats>();
    leaf->class_counts.assign(m, 0.0);
    std::vector<std::size_t> ids(d);
    std::iota(ids.begin(), ids.end(), 0);
    if (subspace_ < d) {
        for (std::size_t i = 0; i < subspace_; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform_int(rng_, static_cast<int>(d - i)));
            std::swap(ids[i], ids[j]);
        }
        ids.resize(subspace_);
        std::sort(ids.begin(), ids.end());
    }
    leaf->active = ids;
    for (std::size_t f : ids) {
        FeatureObserver obs;
        obs.feature = f;
        const Feature& feat = schema_->feature(f);
        obs.nominal = feat.is_nominal();
        if (obs.nominal) {
            obs.categorical.values = feat.cardinality();
            obs.categorical.counts.assign(feat.cardinality() * m, 0.0);
        } else {
            obs.numeric.per_class.resize(m);
            obs.numeric.min.assign(m, std::numeric_limits<double>::infinity());
            obs.numeric.max.assign(m, -std::numeric_limits<double>::infinity());
        }
        leaf->observers.push_back(std::move(obs));
    }
    return leaf;
}

std::size_t HoeffdingTree::route(std::span<const double> x) const {
    std::size_t node = 0;
    while (!nodes_[node].leaf) {
        const Node& n = nodes_[node];
        const double v = x[static_cast<std::size_t>(n.feature)];
        if (n.nominal) {
            const auto branch = static_cast<std::size_t>(v);
            node = n.children[std::min(branch, n.children.size() - 1)];
        } else {
            node = n.children[v <= n.threshold ? 0 : 1];
        }
    }
    return node;
}

const LeafStats& HoeffdingTree::leaf_for(std::span<const double> x) const { return *nodes_[route(x)].leaf; }

void HoeffdingTree::train(const Instance& instance, double weight) {
    if (!instance.y) throw ContractError("HoeffdingTree::train needs a labeled instance");
    train(instance.x, *instance.y, weight);
}

void HoeffdingTree::train(std::span<const double> x, int label, double weight) { train_impl(x, label, weight, nullptr); }

void HoeffdingTree::train(std::span<const double> x, int label, double weight, const ClassVector& current_posterior) {
    train_impl(x, label, weight, &current_posterior);
}

void HoeffdingTree::train_impl(std::span<const double> x, int label, double weight, const ClassVector* posterior) {
    if (!(weight >= 0.0)) throw std::domain_error("HoeffdingTree::train: weight must be >= 0");
    if (label < 0 || static_cast<std::size_t>(label) >= schema_->num_classes())
        throw ContractError("HoeffdingTree::train: label out of range");
    if (x.size() != schema_->num_features()) throw ContractError("HoeffdingTree::train: wrong feature count");
    if (weight == 0.0) return;
    const std::size_t node = route(x);
    LeafStats& leaf = *nodes_[node].leaf;
    const auto y = static_cast<std::size_t>(label);
    const std::size_t m = schema_->num_classes();

    if (config_.leaf_prediction == LeafPrediction::adaptive) {
        if (argmax(leaf.class_counts) == y) leaf.mc_correct += weight;
        // in naive Bayes mode the current posterior is the naive Bayes posterior
        const bool nb_mode = leaf.nb_correct >= leaf.mc_correct;
        const std::size_t nb_guess = posterior && nb_mode ? argmax(*posterior) : argmax(naive_bayes_posterior(leaf, x));
        if (nb_guess == y) leaf.nb_correct += weight;
    }
    leaf.class_counts[y] += weight;
    for (auto& obs : leaf.observers) {
        const double v = x[obs.feature];
        if (obs.nominal) {
            obs.categorical.counts[static_cast<std::size_t>(v) * m + y] += weight;
        } else {
            obs.numeric.per_class[y].add(v, weight);
            obs.numeric.min[y] = std::min(obs.numeric.min[y], v);
            obs.numeric.max[y] = std::max(obs.numeric.max[y], v);
        }
    }
    weight_trained_ += weight;

    const double seen = leaf.total_weight();
    if (seen - leaf.weight_at_last_attempt >= config_.grace_period) {
        leaf.weight_at_last_attempt = seen;
        attempt_split(node);
    }
}

void HoeffdingTree::attempt_split(std::size_t node) {
    const LeafStats& leaf = *nodes_[node].leaf;
    const auto nonzero = std::count_if(leaf.class_counts.begin(), leaf.class_counts.end(), [](double w) { return w > 0; });
    if (nonzero < 2) return;
    const SplitEvaluation eval = evaluate_split(leaf, schema_->num_classes(), config_);
    if (!eval.should_split) return;
    if (on_split_) on_split_(leaf, eval);

    frozen_weight_ += leaf.total_weight();
    const std::size_t branches = eval.best.branches.size();
    std::vector<std::size_t> children;
    for (std::size_t b = 0; b < branches; ++b) {
        children.push_back(nodes_.size());
        nodes_.emplace_back();
        nodes_.back().leaf = new_leaf();
    }
    Node& n = nodes_[node];
    n.leaf.reset();
    n.feature = eval.best.feature;
    n.nominal = eval.best.nominal;
    n.threshold = eval.best.threshold;
    n.children = std::move(children);
    ++splits_;
}

ClassVector HoeffdingTree::leaf_posterior(const LeafStats& leaf, std::span<const double> x) const {
    const bool use_nb = config_.leaf_prediction == LeafPrediction::naive_bayes ||
                        (config_.leaf_prediction == LeafPrediction::adaptive && leaf.nb_correct >= leaf.mc_correct);
    if (use_nb) return naive_bayes_posterior(leaf, x);
    ClassVector out = leaf.class_counts;
    normalize(out);
    return out;
}

ClassVector HoeffdingTree::predict_proba(std::span<const double> x) const {
    if (x.size() != schema_->num_features()) throw ContractError("HoeffdingTree::predict_proba: wrong feature count");
    return leaf_posterior(*nodes_[route(x)].leaf, x);
}

std::size_t HoeffdingTree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf != nullptr; }));
}

std::size_t HoeffdingTree::depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [node, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        for (std::size_t c : nodes_[node].children) stack.emplace_back(c, d + 1);
    }
    return best;
}

double HoeffdingTree::leaf_weight_sum() const {
    double sum = 0.0;
    for (const auto& n : nodes_)
        if (n.leaf) sum += n.leaf->total_weight();
    return sum;
}

std::string HoeffdingTree::dump() const {
    std::ostringstream out;
    out.precision(17);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [node, indent] = stack.back();
        stack.pop_back();
        const Node& n = nodes_[node];
        out << std::string(indent * 2, ' ');
        if (n.leaf) {
            out << "leaf [";
            for (std::size_t c = 0; c < n.leaf->class_counts.size(); ++c)
                out << (c ? " " : "") << n.leaf->class_counts[c];
            out << "] features {";
            for (std::size_t i = 0; i < n.leaf->active.size(); ++i) out << (i ? " " : "") << n.leaf->active[i];
            out << "}\n";
            continue;
        }
        const std::string& name = schema_->feature(static_cast<std::size_t>(n.feature)).name;
        if (n.nominal) {
            out << "split " << name << " (nominal, " << n.children.size() << " branches)\n";
        } else {
            out << "split " << name << " <= " << n.threshold << "\n";
        }
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.emplace_back(*it, indent + 1);
    }
    return out.str();
}

}  // namespace sdf

#include "sdf/schema.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "sdf/errors.hpp"

namespace sdf {

Schema::Schema(std::string name, std::vector<Feature> features, std::vector<std::string> class_labels)
    : name_(std::move(name)), features_(std::move(features)), labels_(std::move(class_labels)) {
    if (labels_.size() < 2) throw SchemaError("schema '" + name_ + "' needs at least 2 classes");
    if (features_.empty()) throw SchemaError("schema '" + name_ + "' needs at least 1 feature");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw SchemaError("duplicate class label in schema '" + name_ + "'");
    for (const auto& f : features_) {
        if (f.is_nominal() && f.values.empty())
            throw SchemaError("nominal feature '" + f.name + "' has an empty value set");
    }
}

bool Schema::compatible_with(const Schema& other) const {
    return features_ == other.features_ && labels_ == other.labels_;
}

void Schema::check(const Instance& instance) const {
    if (instance.x.size() != features_.size())
        throw DataError("instance has " + std::to_string(instance.x.size()) + " features, schema '" + name_ +
                        "' expects " + std::to_string(features_.size()));
    for (std::size_t i = 0; i < features_.size(); ++i) {
        const double v = instance.x[i];
        if (!features_[i].is_nominal()) {
            if (std::isnan(v)) throw DataError("feature '" + features_[i].name + "' is NaN");
            continue;
        }
        if (v < 0 || v != std::floor(v) || v >= static_cast<double>(features_[i].cardinality()))
            throw DataError("nominal index out of range for feature '" + features_[i].name + "'");
    }
    if (instance.y && (*instance.y < 0 || static_cast<std::size_t>(*instance.y) >= labels_.size()))
        throw DataError("class index " + std::to_string(*instance.y) + " out of range");
}

std::size_t argmax(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

bool is_probability_vector(std::span<const double> v, double tolerance) {
    if (v.empty()) return false;
    double sum = 0.0;
    for (double p : v) {
        if (!(p >= 0.0) || !std::isfinite(p)) return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= tolerance;
}

void normalize(std::vector<double>& v) {
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    if (sum > 0.0 && std::isfinite(sum)) {
        for (double& p : v) p /= sum;
    } else {
        std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(v.size()));
    }
}

}  // namespace sdf

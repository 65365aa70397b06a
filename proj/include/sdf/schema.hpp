#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sdf {

enum class FeatureKind { numeric, nominal };

struct Feature {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    std::vector<std::string> values;  // nominal only

    static Feature numeric(std::string name) { return {std::move(name), FeatureKind::numeric, {}}; }
    static Feature nominal(std::string name, std::vector<std::string> values) {
        return {std::move(name), FeatureKind::nominal, std::move(values)};
    }

    bool is_nominal() const noexcept { return kind == FeatureKind::nominal; }
    std::size_t cardinality() const noexcept { return values.size(); }
    bool operator==(const Feature&) const = default;
};

// Nominal features carry their value index as an exact small integer.
struct Instance {
    std::vector<double> x;
    std::optional<int> y;
};

// Posterior over the M classes; entries >= 0 and summing to 1.
using ClassVector = std::vector<double>;

class Schema {
public:
    Schema() = default;
    // Throws SchemaError when M < 2, d < 1, a nominal value set is empty or labels repeat.
    Schema(std::string name, std::vector<Feature> features, std::vector<std::string> class_labels);

    const std::string& name() const noexcept { return name_; }
    const std::vector<Feature>& features() const noexcept { return features_; }
    const Feature& feature(std::size_t i) const { return features_.at(i); }
    const std::vector<std::string>& class_labels() const noexcept { return labels_; }
    std::size_t num_features() const noexcept { return features_.size(); }
    std::size_t num_classes() const noexcept { return labels_.size(); }

    // Same feature kinds, cardinalities, names and labels; the relation name may differ.
    bool compatible_with(const Schema& other) const;

    // Throws DataError when x has the wrong length, a nominal index is out of
    // range or y >= M.
    void check(const Instance& instance) const;

private:
    std::string name_;
    std::vector<Feature> features_;
    std::vector<std::string> labels_;
};

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> v);

bool is_probability_vector(std::span<const double> v, double tolerance = 1e-9);

// Divides by the sum; all-zero input becomes uniform.
void normalize(std::vector<double>& v);

}  // namespace sdf

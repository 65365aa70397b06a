#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "sdf/schema.hpp"

namespace sdf {

// Single-consumer instance source. next() returns std::nullopt at end of
// stream; I/O and content problems are thrown as exceptions instead.
class Stream {
public:
    virtual ~Stream() = default;
    virtual const Schema& schema() const = 0;
    virtual std::optional<Instance> next() = 0;
};

enum class GeneratorKind { sea, agrawal, rbf, hyperplane, rtg };

std::string_view to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(std::string_view name);

// SEA: three uniform features in [0, 10); class 0 iff f1 + f2 <= threshold.
struct SeaParams {
    double threshold = 8.0;
    int noise_percent = 10;
};

// AGRAWAL: nine loan-applicant attributes, one of ten label functions.
struct AgrawalParams {
    int function = 1;
    double perturbation = 0.05;
};

// Random RBF: Gaussian clusters around random centroids, optional centroid drift.
struct RbfParams {
    int centroids = 50;
    int classes = 5;
    int features = 10;
    double drift_speed = 0.0;
    int drifting_centroids = 50;
};

// Rotating hyperplane: class 1 iff sum w_i x_i >= sum w_i / 2.
struct HyperplaneParams {
    int features = 10;
    double mag_change = 0.0;
    int drift_features = 2;
    int noise_percent = 5;
    int sigma_percent = 10;
};

// Random tree generator: labels from a randomly grown decision tree.
struct RtgParams {
    int classes = 2;
    int nominal_features = 5;
    int numeric_features = 5;
    int values_per_nominal = 5;
    int max_depth = 5;
    int first_leaf_level = 3;
    double leaf_fraction = 0.15;
};

struct GeneratorConfig {
    GeneratorKind kind = GeneratorKind::sea;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> length;
    SeaParams sea;
    AgrawalParams agrawal;
    RbfParams rbf;
    HyperplaneParams hyperplane;
    RtgParams rtg;

    // Throws ConfigError naming the offending field.
    void validate() const;
};

// Builds a config from "key = value" pairs, e.g. kind=sea, seed=3,
// sea.threshold=9, agrawal.function=2. Unknown keys throw ConfigError.
GeneratorConfig generator_config_from(const std::map<std::string, std::string>& values);

// Reads "key = value" lines; '#' starts a comment, blank lines and
// "[section]" headers are skipped.
std::map<std::string, std::string> read_key_value_file(const std::string& path);

std::unique_ptr<Stream> create_generator(const GeneratorConfig& config);

struct DriftSpec {
    std::uint64_t position = 1;  // p, 1-based instance index of the midpoint
    std::uint64_t width = 1;     // w; 1 is an abrupt switch
    GeneratorConfig successor;
};

// P(draw from successor) at 1-based index t.
double successor_probability(std::uint64_t t, std::uint64_t position, std::uint64_t width);

// Sigmoid mixture of two streams with identical schemas. The mixing draws use
// their own generator seeded from mixing_seed.
std::unique_ptr<Stream> drift_wrap(std::unique_ptr<Stream> base, std::unique_ptr<Stream> successor,
                                   std::uint64_t position, std::uint64_t width, std::uint64_t mixing_seed);
std::unique_ptr<Stream> drift_wrap(std::unique_ptr<Stream> base, const DriftSpec& spec);

// Caps a stream at n instances.
std::unique_ptr<Stream> take(std::unique_ptr<Stream> base, std::uint64_t n);

// Named benchmark streams: SEA_a, SEA_g, AGR_a, AGR_g, RBF_m, RBF_f, HYPER,
// RTG, plus the plain kinds (SEA, AGRAWAL, RBF, HYPERPLANE). Drift positions
// scale with length: abrupt/gradual variants switch concept at length/4,
// length/2 and 3*length/4; gradual width is length/20.
std::unique_ptr<Stream> make_preset(std::string_view name, std::uint64_t seed, std::uint64_t length);
bool is_preset(std::string_view name);

enum class DatasetFormat { csv, arff };

struct DatasetOptions {
    // CSV: defaults to the column named "class". ARFF: defaults to an
    // attribute named "class", else the last attribute.
    std::optional<std::string> class_column;
};

// Unknown nominal values and malformed rows throw DataError with the line;
// a missing class column throws SchemaError.
std::unique_ptr<Stream> load_dataset(const std::string& path, DatasetFormat format,
                                     const DatasetOptions& options = {});
DatasetFormat format_from_path(const std::string& path);

}  // namespace sdf

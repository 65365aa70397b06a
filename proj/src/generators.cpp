#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>

#include "sdf/errors.hpp"
#include "sdf/random.hpp"
#include "sdf/streams.hpp"

namespace sdf {

namespace {

std::vector<std::string> numbered(std::string_view prefix, int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(std::string(prefix) + std::to_string(i + 1));
    return out;
}

std::vector<std::string> value_names(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back("v" + std::to_string(i + 1));
    return out;
}

std::vector<Feature> numeric_features(std::string_view prefix, int n) {
    std::vector<Feature> out;
    for (auto& name : numbered(prefix, n)) out.push_back(Feature::numeric(name));
    return out;
}

bool percent_hit(Rng& rng, int percent) {
    return percent > 0 && 1 + uniform_int(rng, 100) <= percent;
}

class Generator : public Stream {
public:
    Generator(Schema schema, std::optional<std::uint64_t> length)
        : schema_(std::move(schema)), remaining_(length) {}

    const Schema& schema() const override { return schema_; }

    std::optional<Instance> next() override {
        if (remaining_) {
            if (*remaining_ == 0) return std::nullopt;
            --*remaining_;
        }
        return draw();
    }

protected:
    virtual Instance draw() = 0;

private:
    Schema schema_;
    std::optional<std::uint64_t> remaining_;
};

class SeaGenerator final : public Generator {
public:
    explicit SeaGenerator(const GeneratorConfig& c)
        : Generator(Schema("SEA", numeric_features("f", 3), {"groupA", "groupB"}), c.length),
          params_(c.sea), rng_(c.seed) {}

protected:
    Instance draw() override {
        Instance out;
        out.x = {10.0 * uniform01(rng_), 10.0 * uniform01(rng_), 10.0 * uniform01(rng_)};
        int label = out.x[0] + out.x[1] <= params_.threshold ? 0 : 1;
        if (percent_hit(rng_, params_.noise_percent)) label = 1 - label;
        out.y = label;
        return out;
    }

private:
    SeaParams params_;
    Rng rng_;
};

// Label functions of the AGRAWAL generator; 0 = groupA, 1 = groupB.
//  1: age < 40 or age >= 60
//  2: salary band that depends on the age bracket
//  3: education level set that depends on the age bracket
//  4: salary band selected by age bracket and education level
//  5: loan band selected by age bracket and salary band
//  6: salary + commission band by age bracket
//  7: 2/3 (salary + commission) - loan/5 - 20000 > 0
//  8: 2/3 (salary + commission) - 5000 elevel - 20000 > 0
//  9: 2/3 (salary + commission) - 5000 elevel - loan/5 - 10000 > 0
// 10: 2/3 (salary + commission) - 5000 elevel + equity/5 - 10000 > 0,
//     equity = hvalue (hyears - 20) / 10 when hyears >= 20
struct AgrawalRecord {
    double salary, commission, age;
    int elevel, car, zipcode;
    double hvalue, hyears, loan;
};

int agrawal_label(int function, const AgrawalRecord& r) {
    auto in = [](double v, double lo, double hi) { return lo <= v && v <= hi; };
    const double age = r.age;
    const int e = r.elevel;
    switch (function) {
    case 1:
        return (age < 40 || 60 <= age) ? 0 : 1;
    case 2:
        if (age < 40) return in(r.salary, 50000, 100000) ? 0 : 1;
        if (age < 60) return in(r.salary, 75000, 125000) ? 0 : 1;
        return in(r.salary, 25000, 75000) ? 0 : 1;
    case 3:
        if (age < 40) return (e == 0 || e == 1) ? 0 : 1;
        if (age < 60) return (e == 1 || e == 2 || e == 3) ? 0 : 1;
        return (e == 2 || e == 3 || e == 4) ? 0 : 1;
    case 4:
        if (age < 40) {
            if (e == 0 || e == 1) return in(r.salary, 25000, 75000) ? 0 : 1;
            return in(r.salary, 50000, 100000) ? 0 : 1;
        }
        if (age < 60) {
            if (e == 1 || e == 2 || e == 3) return in(r.salary, 50000, 100000) ? 0 : 1;
            return in(r.salary, 75000, 125000) ? 0 : 1;
        }
        if (e == 2 || e == 3 || e == 4) return in(r.salary, 50000, 100000) ? 0 : 1;
        return in(r.salary, 25000, 75000) ? 0 : 1;
    case 5:
        if (age < 40) {
            if (in(r.salary, 50000, 100000)) return in(r.loan, 100000, 300000) ? 0 : 1;
            return in(r.loan, 200000, 400000) ? 0 : 1;
        }
        if (age < 60) {
            if (in(r.salary, 75000, 125000)) return in(r.loan, 200000, 400000) ? 0 : 1;
            return in(r.loan, 300000, 500000) ? 0 : 1;
        }
        if (in(r.salary, 25000, 75000)) return in(r.loan, 300000, 500000) ? 0 : 1;
        return in(r.loan, 100000, 300000) ? 0 : 1;
    case 6: {
        const double total = r.salary + r.commission;
        if (age < 40) return in(total, 50000, 100000) ? 0 : 1;
        if (age < 60) return in(total, 75000, 125000) ? 0 : 1;
        return in(total, 25000, 75000) ? 0 : 1;
    }
    case 7:
        return 2.0 * (r.salary + r.commission) / 3.0 - r.loan / 5.0 - 20000.0 > 0 ? 0 : 1;
    case 8:
        return 2.0 * (r.salary + r.commission) / 3.0 - 5000.0 * e - 20000.0 > 0 ? 0 : 1;
    case 9:
        return 2.0 * (r.salary + r.commission) / 3.0 - 5000.0 * e - r.loan / 5.0 - 10000.0 > 0 ? 0 : 1;
    case 10: {
        const double equity = r.hyears >= 20 ? r.hvalue * (r.hyears - 20.0) / 10.0 : 0.0;
        return 2.0 * (r.salary + r.commission) / 3.0 - 5000.0 * e + equity / 5.0 - 10000.0 > 0 ? 0 : 1;
    }
    default:
        throw ConfigError("agrawal.function", "must be in 1..10");
    }
}

Schema agrawal_schema() {
    return Schema("AGRAWAL",
                  {Feature::numeric("salary"), Feature::numeric("commission"), Feature::numeric("age"),
                   Feature::nominal("elevel", value_names(5)), Feature::nominal("car", value_names(20)),
                   Feature::nominal("zipcode", value_names(9)), Feature::numeric("hvalue"),
                   Feature::numeric("hyears"), Feature::numeric("loan")},
                  {"groupA", "groupB"});
}

class AgrawalGenerator final : public Generator {
public:
    explicit AgrawalGenerator(const GeneratorConfig& c)
        : Generator(agrawal_schema(), c.length), params_(c.agrawal), rng_(c.seed) {}

protected:
    Instance draw() override {
        AgrawalRecord r{};
        r.salary = 20000.0 + 130000.0 * uniform01(rng_);
        r.commission = r.salary >= 75000.0 ? 0.0 : 10000.0 + 65000.0 * uniform01(rng_);
        r.age = 20 + uniform_int(rng_, 61);
        r.elevel = uniform_int(rng_, 5);
        r.car = uniform_int(rng_, 20);
        r.zipcode = uniform_int(rng_, 9);
        r.hvalue = (9.0 - r.zipcode) * 100000.0 * (0.5 + uniform01(rng_));
        r.hyears = 1 + uniform_int(rng_, 30);
        r.loan = uniform01(rng_) * 500000.0;
        const int label = agrawal_label(params_.function, r);
        if (params_.perturbation > 0.0) {
            r.salary = perturb(r.salary, 20000, 150000);
            if (r.commission > 0) r.commission = perturb(r.commission, 10000, 75000);
            r.age = std::round(perturb(r.age, 20, 80));
            r.hvalue = perturb(r.hvalue, 50000, 900000 * 1.5);
            r.hyears = std::round(perturb(r.hyears, 1, 30));
            r.loan = perturb(r.loan, 0, 500000);
        }
        Instance out;
        out.x = {r.salary, r.commission, r.age, double(r.elevel), double(r.car), double(r.zipcode),
                 r.hvalue, r.hyears, r.loan};
        out.y = label;
        return out;
    }

private:
    double perturb(double value, double lo, double hi) {
        if (hi - lo <= 0) return value;
        const double v = value + (hi - lo) * (2.0 * uniform01(rng_) - 1.0) * params_.perturbation;
        return std::clamp(v, lo, hi);
    }

    AgrawalParams params_;
    Rng rng_;
};

class RbfGenerator final : public Generator {
public:
    explicit RbfGenerator(const GeneratorConfig& c)
        : Generator(Schema("RBF", numeric_features("x", c.rbf.features), numbered("class", c.rbf.classes)),
                    c.length),
          params_(c.rbf), model_rng_(derive_seed(c.seed, 1)), rng_(derive_seed(c.seed, 2)) {
        const int d = params_.features;
        double total = 0.0;
        for (int i = 0; i < params_.centroids; ++i) {
            Centroid ct;
            for (int j = 0; j < d; ++j) ct.center.push_back(uniform01(model_rng_));
            ct.label = uniform_int(model_rng_, params_.classes);
            ct.std_dev = uniform01(model_rng_);
            total += uniform01(model_rng_);
            ct.cumulative_weight = total;
            centroids_.push_back(std::move(ct));
        }
        const int drifting = std::min(params_.drifting_centroids, params_.centroids);
        for (int i = 0; i < drifting && params_.drift_speed > 0.0; ++i) {
            auto& speed = centroids_[i].speed;
            double norm = 0.0;
            for (int j = 0; j < d; ++j) {
                speed.push_back(standard_normal(model_rng_));
                norm += speed.back() * speed.back();
            }
            norm = std::sqrt(norm);
            for (double& s : speed) s = norm > 0 ? s / norm * params_.drift_speed : 0.0;
        }
    }

protected:
    Instance draw() override {
        const double pick = uniform01(rng_) * centroids_.back().cumulative_weight;
        const auto it = std::upper_bound(centroids_.begin(), centroids_.end(), pick,
                                         [](double v, const Centroid& c) { return v < c.cumulative_weight; });
        const Centroid& ct = it == centroids_.end() ? centroids_.back() : *it;
        const int d = params_.features;
        std::vector<double> dir(d);
        double norm = 0.0;
        for (double& v : dir) {
            v = standard_normal(rng_);
            norm += v * v;
        }
        norm = std::sqrt(norm);
        const double magnitude = standard_normal(rng_) * ct.std_dev;
        Instance out;
        out.x.resize(d);
        for (int j = 0; j < d; ++j) out.x[j] = ct.center[j] + (norm > 0 ? dir[j] / norm : 0.0) * magnitude;
        out.y = ct.label;
        move_centroids();
        return out;
    }

private:
    struct Centroid {
        std::vector<double> center;
        std::vector<double> speed;
        int label = 0;
        double std_dev = 0.0;
        double cumulative_weight = 0.0;
    };

    void move_centroids() {
        for (auto& ct : centroids_) {
            for (std::size_t j = 0; j < ct.speed.size(); ++j) {
                double& c = ct.center[j];
                c += ct.speed[j];
                if (c > 1.0 || c < 0.0) {
                    c = std::clamp(c, 0.0, 1.0);
                    ct.speed[j] = -ct.speed[j];
                }
            }
        }
    }

    RbfParams params_;
    Rng model_rng_;
    Rng rng_;
    std::vector<Centroid> centroids_;
};

class HyperplaneGenerator final : public Generator {
public:
    explicit HyperplaneGenerator(const GeneratorConfig& c)
        : Generator(Schema("HYPERPLANE", numeric_features("x", c.hyperplane.features), {"class1", "class2"}),
                    c.length),
          params_(c.hyperplane), rng_(c.seed) {
        for (int i = 0; i < params_.features; ++i) {
            weights_.push_back(uniform01(rng_));
            sigma_.push_back(i < params_.drift_features ? 1 : 0);
        }
    }

protected:
    Instance draw() override {
        Instance out;
        double sum = 0.0;
        double weight_sum = 0.0;
        for (int i = 0; i < params_.features; ++i) {
            out.x.push_back(uniform01(rng_));
            sum += weights_[i] * out.x.back();
            weight_sum += weights_[i];
        }
        int label = sum >= weight_sum * 0.5 ? 1 : 0;
        if (percent_hit(rng_, params_.noise_percent)) label = 1 - label;
        out.y = label;
        for (int i = 0; i < params_.drift_features; ++i) {
            weights_[i] += sigma_[i] * params_.mag_change;
            if (percent_hit(rng_, params_.sigma_percent)) sigma_[i] = -sigma_[i];
        }
        return out;
    }

private:
    HyperplaneParams params_;
    Rng rng_;
    std::vector<double> weights_;
    std::vector<int> sigma_;
};

Schema rtg_schema(const RtgParams& p) {
    std::vector<Feature> features;
    for (int i = 0; i < p.nominal_features; ++i)
        features.push_back(Feature::nominal("nom" + std::to_string(i + 1), value_names(p.values_per_nominal)));
    for (int i = 0; i < p.numeric_features; ++i) features.push_back(Feature::numeric("num" + std::to_string(i + 1)));
    return Schema("RTG", std::move(features), numbered("class", p.classes));
}

class RandomTreeGenerator final : public Generator {
public:
    explicit RandomTreeGenerator(const GeneratorConfig& c)
        : Generator(rtg_schema(c.rtg), c.length), params_(c.rtg), rng_(derive_seed(c.seed, 2)) {
        Rng tree_rng(derive_seed(c.seed, 1));
        std::vector<int> nominal_candidates(params_.nominal_features);
        for (int i = 0; i < params_.nominal_features; ++i) nominal_candidates[i] = i;
        std::vector<double> lo(params_.numeric_features, 0.0);
        std::vector<double> hi(params_.numeric_features, 1.0);
        grow(0, nominal_candidates, lo, hi, tree_rng);
    }

protected:
    Instance draw() override {
        Instance out;
        for (int i = 0; i < params_.nominal_features; ++i) out.x.push_back(uniform_int(rng_, params_.values_per_nominal));
        for (int i = 0; i < params_.numeric_features; ++i) out.x.push_back(uniform01(rng_));
        std::size_t node = 0;
        while (nodes_[node].label < 0) {
            const Node& n = nodes_[node];
            if (n.feature < params_.nominal_features) {
                node = n.children[static_cast<std::size_t>(out.x[n.feature])];
            } else {
                node = n.children[out.x[n.feature] < n.threshold ? 0 : 1];
            }
        }
        out.y = nodes_[node].label;
        return out;
    }

private:
    struct Node {
        int label = -1;
        int feature = -1;
        double threshold = 0.0;
        std::vector<std::size_t> children;
    };

    std::size_t grow(int depth, const std::vector<int>& nominal_candidates, const std::vector<double>& lo,
                     const std::vector<double>& hi, Rng& rng) {
        const std::size_t id = nodes_.size();
        nodes_.emplace_back();
        if (depth >= params_.max_depth ||
            (depth >= params_.first_leaf_level && params_.leaf_fraction >= 1.0 - uniform01(rng))) {
            nodes_[id].label = uniform_int(rng, params_.classes);
            return id;
        }
        const int choice =
            uniform_int(rng, static_cast<int>(nominal_candidates.size()) + params_.numeric_features);
        std::vector<std::size_t> children;
        if (choice < static_cast<int>(nominal_candidates.size())) {
            const int feature = nominal_candidates[choice];
            nodes_[id].feature = feature;
            std::vector<int> rest;
            for (int f : nominal_candidates)
                if (f != feature) rest.push_back(f);
            for (int v = 0; v < params_.values_per_nominal; ++v) children.push_back(grow(depth + 1, rest, lo, hi, rng));
        } else {
            const int j = choice - static_cast<int>(nominal_candidates.size());
            const double split = lo[j] + (hi[j] - lo[j]) * uniform01(rng);
            nodes_[id].feature = params_.nominal_features + j;
            nodes_[id].threshold = split;
            auto left_hi = hi;
            left_hi[j] = split;
            auto right_lo = lo;
            right_lo[j] = split;
            children.push_back(grow(depth + 1, nominal_candidates, lo, left_hi, rng));
            children.push_back(grow(depth + 1, nominal_candidates, right_lo, hi, rng));
        }
        nodes_[id].children = std::move(children);
        return id;
    }

    RtgParams params_;
    Rng rng_;
    std::vector<Node> nodes_;
};

class DriftStream final : public Stream {
public:
    DriftStream(std::unique_ptr<Stream> base, std::unique_ptr<Stream> successor, std::uint64_t position,
                std::uint64_t width, std::uint64_t seed)
        : base_(std::move(base)), successor_(std::move(successor)), position_(position), width_(width), rng_(seed) {
        if (!base_->schema().compatible_with(successor_->schema()))
            throw ConfigError("successor", "schema of the successor stream differs from the base stream");
        if (position_ < 1) throw ConfigError("position", "must be >= 1");
        if (width_ < 1) throw ConfigError("width", "must be >= 1");
    }

    const Schema& schema() const override { return base_->schema(); }

    std::optional<Instance> next() override {
        ++t_;
        const double p = successor_probability(t_, position_, width_);
        return uniform01(rng_) < p ? successor_->next() : base_->next();
    }

private:
    std::unique_ptr<Stream> base_;
    std::unique_ptr<Stream> successor_;
    std::uint64_t position_;
    std::uint64_t width_;
    Rng rng_;
    std::uint64_t t_ = 0;
};

class TakeStream final : public Stream {
public:
    TakeStream(std::unique_ptr<Stream> base, std::uint64_t n) : base_(std::move(base)), remaining_(n) {}
    const Schema& schema() const override { return base_->schema(); }
    std::optional<Instance> next() override {
        if (remaining_ == 0) return std::nullopt;
        --remaining_;
        return base_->next();
    }

private:
    std::unique_ptr<Stream> base_;
    std::uint64_t remaining_;
};

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw ConfigError(key, "cannot parse '" + text + "'");
    return value;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view to_string(GeneratorKind kind) {
    switch (kind) {
    case GeneratorKind::sea: return "sea";
    case GeneratorKind::agrawal: return "agrawal";
    case GeneratorKind::rbf: return "rbf";
    case GeneratorKind::hyperplane: return "hyperplane";
    case GeneratorKind::rtg: return "rtg";
    }
    return "?";
}

GeneratorKind parse_generator_kind(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "sea") return GeneratorKind::sea;
    if (lower == "agrawal" || lower == "agr") return GeneratorKind::agrawal;
    if (lower == "rbf") return GeneratorKind::rbf;
    if (lower == "hyperplane" || lower == "hyper") return GeneratorKind::hyperplane;
    if (lower == "rtg") return GeneratorKind::rtg;
    throw ConfigError("kind", "unknown generator '" + std::string(name) + "'");
}

void GeneratorConfig::validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ConfigError(field, what);
    };
    switch (kind) {
    case GeneratorKind::sea:
        require(std::isfinite(sea.threshold), "sea.threshold", "must be finite");
        require(sea.noise_percent >= 0 && sea.noise_percent <= 100, "sea.noise", "must be a percentage in 0..100");
        break;
    case GeneratorKind::agrawal:
        require(agrawal.function >= 1 && agrawal.function <= 10, "agrawal.function", "must be in 1..10");
        require(agrawal.perturbation >= 0.0 && agrawal.perturbation <= 1.0, "agrawal.perturbation",
                "must be in [0, 1]");
        break;
    case GeneratorKind::rbf:
        require(rbf.centroids >= 1, "rbf.centroids", "must be >= 1");
        require(rbf.classes >= 2, "rbf.classes", "must be >= 2");
        require(rbf.features >= 1, "rbf.features", "must be >= 1");
        require(rbf.drift_speed >= 0.0, "rbf.speed", "must be >= 0");
        require(rbf.drifting_centroids >= 0 && rbf.drifting_centroids <= rbf.centroids, "rbf.drifting_centroids",
                "must be in 0..centroids");
        break;
    case GeneratorKind::hyperplane:
        require(hyperplane.features >= 1, "hyperplane.features", "must be >= 1");
        require(hyperplane.drift_features >= 0 && hyperplane.drift_features <= hyperplane.features,
                "hyperplane.drift_features", "must be in 0..features");
        require(hyperplane.mag_change >= 0.0, "hyperplane.mag_change", "must be >= 0");
        require(hyperplane.noise_percent >= 0 && hyperplane.noise_percent <= 100, "hyperplane.noise",
                "must be a percentage in 0..100");
        require(hyperplane.sigma_percent >= 0 && hyperplane.sigma_percent <= 100, "hyperplane.sigma",
                "must be a percentage in 0..100");
        break;
    case GeneratorKind::rtg:
        require(rtg.classes >= 2, "rtg.classes", "must be >= 2");
        require(rtg.nominal_features >= 0 && rtg.numeric_features >= 0 &&
                    rtg.nominal_features + rtg.numeric_features >= 1,
                "rtg.features", "need at least one feature");
        require(rtg.values_per_nominal >= 2, "rtg.values_per_nominal", "must be >= 2");
        require(rtg.max_depth >= 1, "rtg.max_depth", "must be >= 1");
        require(rtg.first_leaf_level >= 0 && rtg.first_leaf_level <= rtg.max_depth, "rtg.first_leaf_level",
                "must be in 0..max_depth");
        require(rtg.leaf_fraction >= 0.0 && rtg.leaf_fraction <= 1.0, "rtg.leaf_fraction", "must be in [0, 1]");
        break;
    }
}

GeneratorConfig generator_config_from(const std::map<std::string, std::string>& values) {
    GeneratorConfig c;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"kind", [&](auto&, auto& v) { c.kind = parse_generator_kind(v); }},
        {"seed", [&](auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
        {"length", [&](auto& k, auto& v) { c.length = parse_number<std::uint64_t>(k, v); }},
        {"sea.threshold", [&](auto& k, auto& v) { c.sea.threshold = parse_number<double>(k, v); }},
        {"sea.noise", [&](auto& k, auto& v) { c.sea.noise_percent = parse_number<int>(k, v); }},
        {"agrawal.function", [&](auto& k, auto& v) { c.agrawal.function = parse_number<int>(k, v); }},
        {"agrawal.perturbation", [&](auto& k, auto& v) { c.agrawal.perturbation = parse_number<double>(k, v); }},
        {"rbf.centroids", [&](auto& k, auto& v) { c.rbf.centroids = parse_number<int>(k, v); }},
        {"rbf.classes", [&](auto& k, auto& v) { c.rbf.classes = parse_number<int>(k, v); }},
        {"rbf.features", [&](auto& k, auto& v) { c.rbf.features = parse_number<int>(k, v); }},
        {"rbf.speed", [&](auto& k, auto& v) { c.rbf.drift_speed = parse_number<double>(k, v); }},
        {"rbf.drifting_centroids", [&](auto& k, auto& v) { c.rbf.drifting_centroids = parse_number<int>(k, v); }},
        {"hyperplane.features", [&](auto& k, auto& v) { c.hyperplane.features = parse_number<int>(k, v); }},
        {"hyperplane.mag_change", [&](auto& k, auto& v) { c.hyperplane.mag_change = parse_number<double>(k, v); }},
        {"hyperplane.drift_features", [&](auto& k, auto& v) { c.hyperplane.drift_features = parse_number<int>(k, v); }},
        {"hyperplane.noise", [&](auto& k, auto& v) { c.hyperplane.noise_percent = parse_number<int>(k, v); }},
        {"hyperplane.sigma", [&](auto& k, auto& v) { c.hyperplane.sigma_percent = parse_number<int>(k, v); }},
        {"rtg.classes", [&](auto& k, auto& v) { c.rtg.classes = parse_number<int>(k, v); }},
        {"rtg.nominal_features", [&](auto& k, auto& v) { c.rtg.nominal_features = parse_number<int>(k, v); }},
        {"rtg.numeric_features", [&](auto& k, auto& v) { c.rtg.numeric_features = parse_number<int>(k, v); }},
        {"rtg.values_per_nominal", [&](auto& k, auto& v) { c.rtg.values_per_nominal = parse_number<int>(k, v); }},
        {"rtg.max_depth", [&](auto& k, auto& v) { c.rtg.max_depth = parse_number<int>(k, v); }},
        {"rtg.first_leaf_level", [&](auto& k, auto& v) { c.rtg.first_leaf_level = parse_number<int>(k, v); }},
        {"rtg.leaf_fraction", [&](auto& k, auto& v) { c.rtg.leaf_fraction = parse_number<double>(k, v); }},
    };
    // kind first so its parse error wins over parameter errors
    if (auto it = values.find("kind"); it != values.end()) setters.at("kind")(it->first, it->second);
    for (const auto& [key, value] : values) {
        if (key == "kind") continue;
        const auto s = setters.find(key);
        if (s == setters.end()) throw ConfigError(key, "unknown generator option");
        s->second(key, value);
    }
    c.validate();
    return c;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty() || t.front() == '[') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw DataError("expected 'key = value'", number);
        std::string value = trim(t.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        out[trim(t.substr(0, eq))] = value;
    }
    return out;
}

std::unique_ptr<Stream> create_generator(const GeneratorConfig& config) {
    config.validate();
    switch (config.kind) {
    case GeneratorKind::sea: return std::make_unique<SeaGenerator>(config);
    case GeneratorKind::agrawal: return std::make_unique<AgrawalGenerator>(config);
    case GeneratorKind::rbf: return std::make_unique<RbfGenerator>(config);
    case GeneratorKind::hyperplane: return std::make_unique<HyperplaneGenerator>(config);
    case GeneratorKind::rtg: return std::make_unique<RandomTreeGenerator>(config);
    }
    throw ConfigError("kind", "unsupported generator");
}

double successor_probability(std::uint64_t t, std::uint64_t position, std::uint64_t width) {
    const double x = -4.0 * (static_cast<double>(t) - static_cast<double>(position)) / static_cast<double>(width);
    return 1.0 / (1.0 + std::exp(x));
}

std::unique_ptr<Stream> drift_wrap(std::unique_ptr<Stream> base, std::unique_ptr<Stream> successor,
                                   std::uint64_t position, std::uint64_t width, std::uint64_t mixing_seed) {
    return std::make_unique<DriftStream>(std::move(base), std::move(successor), position, width, mixing_seed);
}

std::unique_ptr<Stream> drift_wrap(std::unique_ptr<Stream> base, const DriftSpec& spec) {
    auto successor = create_generator(spec.successor);
    return drift_wrap(std::move(base), std::move(successor), spec.position, spec.width,
                      derive_seed(spec.successor.seed, spec.position, spec.width));
}

std::unique_ptr<Stream> take(std::unique_ptr<Stream> base, std::uint64_t n) {
    return std::make_unique<TakeStream>(std::move(base), n);
}

namespace {

// Chains concepts[0] -> concepts[1] -> ... with switches at length*(i+1)/n.
std::unique_ptr<Stream> concept_sequence(std::vector<GeneratorConfig> concepts, std::uint64_t length,
                                         std::uint64_t width, std::uint64_t seed) {
    const std::size_t n = concepts.size();
    std::unique_ptr<Stream> stream = create_generator(concepts[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const std::uint64_t position = std::max<std::uint64_t>(1, length * i / n);
        stream = drift_wrap(std::move(stream), create_generator(concepts[i]), position, width,
                            derive_seed(seed, 100 + i));
    }
    return take(std::move(stream), length);
}

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
    return out;
}

}  // namespace

bool is_preset(std::string_view name) {
    static const std::array<std::string_view, 12> names = {"SEA_A", "SEA_G", "AGR_A", "AGR_G", "RBF_M",      "RBF_F",
                                                           "HYPER", "RTG",   "SEA",   "AGRAWAL", "HYPERPLANE", "RBF"};
    const std::string u = upper(name);
    return std::find(names.begin(), names.end(), u) != names.end();
}

std::unique_ptr<Stream> make_preset(std::string_view name, std::uint64_t seed, std::uint64_t length) {
    const std::string u = upper(name);
    if (length == 0) throw ConfigError("length", "preset streams need a positive length");
    const std::uint64_t gradual = std::max<std::uint64_t>(1, length / 20);
    if (u == "SEA_A" || u == "SEA_G") {
        std::vector<GeneratorConfig> concepts;
        const std::array<double, 4> thresholds = {8.0, 9.0, 7.0, 9.5};
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            GeneratorConfig c;
            c.kind = GeneratorKind::sea;
            c.seed = derive_seed(seed, i);
            c.sea.threshold = thresholds[i];
            concepts.push_back(c);
        }
        return concept_sequence(std::move(concepts), length, u == "SEA_A" ? 1 : gradual, seed);
    }
    if (u == "AGR_A" || u == "AGR_G") {
        std::vector<GeneratorConfig> concepts;
        for (int f = 1; f <= 4; ++f) {
            GeneratorConfig c;
            c.kind = GeneratorKind::agrawal;
            c.seed = derive_seed(seed, f);
            c.agrawal.function = f;
            concepts.push_back(c);
        }
        return concept_sequence(std::move(concepts), length, u == "AGR_A" ? 1 : gradual, seed);
    }
    GeneratorConfig c;
    c.seed = seed;
    c.length = length;
    if (u == "RBF_M" || u == "RBF_F" || u == "RBF") {
        c.kind = GeneratorKind::rbf;
        c.rbf.drift_speed = u == "RBF_M" ? 0.0001 : u == "RBF_F" ? 0.001 : 0.0;
    } else if (u == "HYPER") {
        c.kind = GeneratorKind::hyperplane;
        c.hyperplane.mag_change = 0.001;
        c.hyperplane.drift_features = c.hyperplane.features;
    } else if (u == "HYPERPLANE") {
        c.kind = GeneratorKind::hyperplane;
    } else if (u == "RTG") {
        c.kind = GeneratorKind::rtg;
    } else if (u == "SEA") {
        c.kind = GeneratorKind::sea;
    } else if (u == "AGRAWAL") {
        c.kind = GeneratorKind::agrawal;
    } else {
        throw ConfigError("stream", "unknown preset '" + std::string(name) + "'");
    }
    return create_generator(c);
}

}  // namespace sdf

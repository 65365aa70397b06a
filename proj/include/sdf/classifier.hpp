#pragma once

#include <memory>
#include <optional>
#include <string>

#include "sdf/arf.hpp"
#include "sdf/cascade.hpp"
#include "sdf/hoeffding.hpp"
#include "sdf/schema.hpp"

namespace sdf {

// What the prequential harness drives. predict_proba never sees a label.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual const Schema& schema() const = 0;
    virtual ClassVector predict_proba(const Instance& instance) = 0;
    virtual DriftReport learn(const Instance& instance) = 0;
    virtual std::string summary() const { return {}; }
};

class CascadeClassifier final : public Classifier {
public:
    CascadeClassifier(const Schema& schema, CascadeConfig config) : model_(schema, std::move(config)) {}

    const Schema& schema() const override { return model_.schema(); }
    ClassVector predict_proba(const Instance& instance) override;
    DriftReport learn(const Instance& instance) override;
    std::string summary() const override { return model_.summary(); }

    const StreamingDeepForest& model() const noexcept { return model_; }

private:
    StreamingDeepForest model_;
    // forward pass of the last prediction, reused when learn() gets the same x
    std::optional<std::pair<std::vector<double>, StreamingDeepForest::ForwardPass>> last_;
};

class ForestClassifier final : public Classifier {
public:
    ForestClassifier(const Schema& schema, ArfConfig config)
        : schema_(std::make_shared<const Schema>(schema)), model_(schema_, config) {}

    const Schema& schema() const override { return *schema_; }
    ClassVector predict_proba(const Instance& instance) override { return model_.predict_proba(instance.x); }
    DriftReport learn(const Instance& instance) override { return model_.train(instance); }

    const AdaptiveRandomForest& model() const noexcept { return model_; }

private:
    std::shared_ptr<const Schema> schema_;
    AdaptiveRandomForest model_;
};

class TreeClassifier final : public Classifier {
public:
    TreeClassifier(const Schema& schema, TreeConfig config)
        : schema_(std::make_shared<const Schema>(schema)), model_(schema_, config) {}

    const Schema& schema() const override { return *schema_; }
    ClassVector predict_proba(const Instance& instance) override { return model_.predict_proba(instance.x); }
    DriftReport learn(const Instance& instance) override {
        model_.train(instance);
        return {};
    }
    std::string summary() const override { return model_.dump(); }

private:
    std::shared_ptr<const Schema> schema_;
    HoeffdingTree model_;
};

}  // namespace sdf

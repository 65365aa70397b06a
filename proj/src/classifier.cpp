#include "sdf/classifier.hpp"

#include "sdf/errors.hpp"

namespace sdf {

ClassVector CascadeClassifier::predict_proba(const Instance& instance) {
    auto pass = model_.forward(instance.x);
    ClassVector out = pass.prediction;
    last_.emplace(instance.x, std::move(pass));
    return out;
}

DriftReport CascadeClassifier::learn(const Instance& instance) {
    if (!instance.y) throw ContractError("CascadeClassifier::learn needs a labeled instance");
    DriftReport report;
    if (last_ && last_->first == instance.x) {
        report = model_.train(last_->second, *instance.y);
    } else {
        report = model_.train(instance.x, *instance.y);
    }
    last_.reset();
    return report;
}

}  // namespace sdf

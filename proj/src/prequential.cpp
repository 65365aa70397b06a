#include "sdf/prequential.hpp"

#include <chrono>

#include "sdf/errors.hpp"

namespace sdf {

namespace {

struct WindowAccumulator {
    std::uint64_t window;
    std::uint64_t count = 0;
    std::uint64_t correct = 0;

    void add(bool hit) {
        ++count;
        if (hit) ++correct;
    }
    bool full() const { return count == window; }
    WindowRecord close(std::uint64_t end, std::uint64_t total, std::uint64_t total_correct, std::uint64_t labels,
                       const DriftReport& drift) {
        WindowRecord w;
        w.end = end;
        w.count = count;
        w.correct = correct;
        w.accuracy = count ? double(correct) / double(count) : 0.0;
        w.cumulative_accuracy = total ? double(total_correct) / double(total) : 0.0;
        w.label_fraction = total ? double(labels) / double(total) : 0.0;
        w.drift = drift;
        count = 0;
        correct = 0;
        return w;
    }
};

}  // namespace

PrequentialResult run_prequential(Classifier& model, Stream& stream, const PrequentialOptions& options) {
    if (!model.schema().compatible_with(stream.schema()))
        throw ConfigError("stream", "stream schema '" + stream.schema().name() +
                                        "' does not match the model schema '" + model.schema().name() + "'");
    if (options.window == 0) throw ConfigError("window", "must be >= 1");
    std::optional<BudgetState> budget;
    if (options.strategy) budget.emplace(options.budget, options.step);
    Rng rng(derive_seed(options.seed, 0xA11));

    PrequentialResult result;
    auto& s = result.summary;
    WindowAccumulator acc{options.window};
    const auto start = std::chrono::steady_clock::now();
    while (!options.max_instances || s.instances < *options.max_instances) {
        auto next = stream.next();
        if (!next) break;
        if (!next->y) throw DataError("prequential evaluation needs labeled instances");
        const int truth = *next->y;

        Instance unlabeled{next->x, std::nullopt};
        const ClassVector posterior = model.predict_proba(unlabeled);
        const int predicted = static_cast<int>(argmax(posterior));
        const bool hit = predicted == truth;
        ++s.instances;
        if (hit) ++s.correct;
        acc.add(hit);

        const bool queried = budget ? decide(*options.strategy, posterior, *budget, rng) : true;
        if (queried) {
            ++s.labels;
            s.drift += model.learn(*next);
        }
        if (options.keep_records) {
            PrequentialRecord r;
            r.index = s.instances;
            r.predicted = predicted;
            r.truth = truth;
            r.queried = queried;
            r.cumulative_accuracy = double(s.correct) / double(s.instances);
            r.label_fraction = double(s.labels) / double(s.instances);
            result.records.push_back(r);
        }
        if (acc.full()) result.windows.push_back(acc.close(s.instances, s.instances, s.correct, s.labels, s.drift));
    }
    if (acc.count > 0) result.windows.push_back(acc.close(s.instances, s.instances, s.correct, s.labels, s.drift));
    s.accuracy = s.instances ? double(s.correct) / double(s.instances) : 0.0;
    s.label_fraction = s.instances ? double(s.labels) / double(s.instances) : 0.0;
    s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::vector<WindowRecord> window_records(const std::vector<PrequentialRecord>& records, std::uint64_t window) {
    if (window == 0) throw ConfigError("window", "must be >= 1");
    std::vector<WindowRecord> out;
    WindowAccumulator acc{window};
    std::uint64_t correct = 0;
    std::uint64_t labels = 0;
    for (const auto& r : records) {
        const bool hit = r.predicted == r.truth;
        if (hit) ++correct;
        if (r.queried) ++labels;
        acc.add(hit);
        if (acc.full()) out.push_back(acc.close(r.index, r.index, correct, labels, {}));
    }
    if (acc.count > 0) out.push_back(acc.close(records.back().index, records.back().index, correct, labels, {}));
    return out;
}

}  // namespace sdf

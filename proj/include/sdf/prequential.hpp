#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sdf/active.hpp"
#include "sdf/classifier.hpp"
#include "sdf/streams.hpp"

namespace sdf {

struct PrequentialOptions {
    std::optional<Strategy> strategy;  // none: every label is used
    double budget = 1.0;
    double step = 0.01;
    std::optional<std::uint64_t> max_instances;
    std::uint64_t window = 1000;  // tumbling window for accuracy reporting
    std::uint64_t seed = 1;       // strategy randomness
    bool keep_records = true;
};

struct PrequentialRecord {
    std::uint64_t index = 0;  // 1-based
    int predicted = 0;
    int truth = 0;
    bool queried = false;
    double cumulative_accuracy = 0.0;
    double label_fraction = 0.0;
};

struct WindowRecord {
    std::uint64_t end = 0;    // index of the last instance in the window
    std::uint64_t count = 0;  // instances in the window
    std::uint64_t correct = 0;
    double accuracy = 0.0;
    double cumulative_accuracy = 0.0;
    double label_fraction = 0.0;
    DriftReport drift;  // cumulative
};

struct PrequentialSummary {
    std::uint64_t instances = 0;
    std::uint64_t correct = 0;
    std::uint64_t labels = 0;
    double accuracy = 0.0;
    double label_fraction = 0.0;
    DriftReport drift;
    double wall_seconds = 0.0;
};

struct PrequentialResult {
    std::vector<PrequentialRecord> records;
    std::vector<WindowRecord> windows;
    PrequentialSummary summary;
};

// Test-then-train loop: predict on the unlabeled copy, record, ask the
// strategy, then train only when the label was queried. Throws ConfigError
// before reading the stream if the schemas differ.
PrequentialResult run_prequential(Classifier& model, Stream& stream, const PrequentialOptions& options);

// Tumbling-window aggregation of per-instance records.
std::vector<WindowRecord> window_records(const std::vector<PrequentialRecord>& records, std::uint64_t window);

}  // namespace sdf

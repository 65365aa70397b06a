#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sdf/random.hpp"
#include "sdf/schema.hpp"

namespace sdf {

enum class StrategyKind { vu, vru, ss, avu };

struct Strategy {
    StrategyKind kind = StrategyKind::avu;
    double ss_b = 0.1;  // selective sampling parameter b > 0
};

std::string_view to_string(StrategyKind kind);
StrategyKind parse_strategy(std::string_view name);

// Labeling-budget accountant: c labels bought out of k instances seen.
struct BudgetState {
    std::uint64_t labels = 0;  // c
    std::uint64_t seen = 0;    // k
    double budget = 1.0;       // B in [0, 1]
    double threshold = 1.0;    // theta > 0
    double step = 0.01;        // s in (0, 1)

    BudgetState() = default;
    BudgetState(double budget, double step);

    double label_fraction() const noexcept { return seen ? double(labels) / double(seen) : 0.0; }
};

// One query decision. The budget gate c/k >= B is tested on the counts before
// this instance (0/0 counts as 0) and never binds when B = 1; a gated call
// returns false and leaves the threshold untouched. k is always incremented.
bool decide(const Strategy& strategy, std::span<const double> posterior, BudgetState& state, Rng& rng);

// Same, on a precomputed certainty (max posterior) and top-1/top-2 margin.
bool decide_on_certainty(const Strategy& strategy, double certainty, double margin, BudgetState& state, Rng& rng);

// Expected-threshold recurrence for certainty scores uniform on [a, b]:
//   t' = (t-a)/(b-a) * t(1-s) + (b-t)/(b-a) * t(1+s)
struct ThresholdRecurrence {
    double a = 0.0;
    double b = 1.0;
    double s = 0.01;
    double theta = 1.0;  // current expectation; starts at b
};

// Returns iterations+1 values starting with rec.theta. Throws std::domain_error
// unless 0 <= a < b, s in (0, 1) and theta in (0, b].
std::vector<double> threshold_limit_oracle(const ThresholdRecurrence& rec, std::size_t iterations);

// Runs decide() on n certainty scores drawn uniformly from [a, b] (binary
// margin 2u-1 clamped at 0) and returns c/k after every step.
std::vector<double> label_fraction_simulation(const Strategy& strategy, double budget, double a, double b,
                                              std::size_t n, std::uint64_t seed, double step = 0.01);

}  // namespace sdf

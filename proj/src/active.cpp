#include "sdf/active.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sdf/errors.hpp"

namespace sdf {

std::string_view to_string(StrategyKind kind) {
    switch (kind) {
    case StrategyKind::vu: return "VU";
    case StrategyKind::vru: return "VRU";
    case StrategyKind::ss: return "SS";
    case StrategyKind::avu: return "AVU";
    }
    return "?";
}

StrategyKind parse_strategy(std::string_view name) {
    std::string u(name);
    std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
    if (u == "VU") return StrategyKind::vu;
    if (u == "VRU") return StrategyKind::vru;
    if (u == "SS") return StrategyKind::ss;
    if (u == "AVU") return StrategyKind::avu;
    throw ConfigError("strategy", "unknown strategy '" + std::string(name) + "'");
}

BudgetState::BudgetState(double budget_, double step_) : budget(budget_), step(step_) {
    if (!(budget >= 0.0 && budget <= 1.0)) throw ConfigError("budget", "must be in [0, 1]");
    if (!(step > 0.0 && step < 1.0)) throw ConfigError("step", "must be in (0, 1)");
}

bool decide_on_certainty(const Strategy& strategy, double certainty, double margin, BudgetState& state, Rng& rng) {
    const double used = state.seen ? double(state.labels) / double(state.seen) : 0.0;
    ++state.seen;
    // a full budget never binds
    if (state.budget < 1.0 && used >= state.budget) return false;

    bool query = false;
    switch (strategy.kind) {
    case StrategyKind::ss: {
        const double p = strategy.ss_b / (strategy.ss_b + std::abs(margin));
        query = uniform01(rng) < p;
        break;
    }
    case StrategyKind::vru: {
        const double eta = 1.0 + standard_normal(rng);
        const double randomized = std::max(state.threshold * eta, 1e-12);
        if (certainty < randomized) {
            query = true;
            state.threshold *= 1.0 - state.step;
        } else {
            state.threshold *= 1.0 + state.step;
        }
        break;
    }
    case StrategyKind::vu:
    case StrategyKind::avu:
        if (certainty < state.threshold) {
            query = true;
            state.threshold *= 1.0 - state.step;
        } else {
            state.threshold *= 1.0 + state.step;
            if (strategy.kind == StrategyKind::avu) {
                const double rho = uniform01(rng);
                query = rho < 2.0 * (state.budget - 0.5);
            }
        }
        break;
    }
    if (query) ++state.labels;
    return query;
}

bool decide(const Strategy& strategy, std::span<const double> posterior, BudgetState& state, Rng& rng) {
    double top = 0.0;
    double second = 0.0;
    for (double p : posterior) {
        if (p > top) {
            second = top;
            top = p;
        } else if (p > second) {
            second = p;
        }
    }
    return decide_on_certainty(strategy, top, top - second, state, rng);
}

std::vector<double> threshold_limit_oracle(const ThresholdRecurrence& rec, std::size_t iterations) {
    if (!(rec.a >= 0.0 && rec.a < rec.b)) throw std::domain_error("threshold recurrence needs 0 <= a < b");
    if (!(rec.s > 0.0 && rec.s < 1.0)) throw std::domain_error("threshold recurrence needs s in (0, 1)");
    if (!(rec.theta > 0.0 && rec.theta <= rec.b)) throw std::domain_error("threshold recurrence needs theta in (0, b]");
    std::vector<double> out;
    out.reserve(iterations + 1);
    double t = rec.theta;
    out.push_back(t);
    const double span = rec.b - rec.a;
    for (std::size_t i = 0; i < iterations; ++i) {
        const double below = (t - rec.a) / span;
        const double above = (rec.b - t) / span;
        t = below * t * (1.0 - rec.s) + above * t * (1.0 + rec.s);
        out.push_back(t);
    }
    return out;
}

std::vector<double> label_fraction_simulation(const Strategy& strategy, double budget, double a, double b,
                                              std::size_t n, std::uint64_t seed, double step) {
    if (!(a < b)) throw std::domain_error("label_fraction_simulation needs a < b");
    BudgetState state(budget, step);
    Rng certainty_rng(derive_seed(seed, 1));
    Rng decision_rng(derive_seed(seed, 2));
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = a + (b - a) * uniform01(certainty_rng);
        decide_on_certainty(strategy, u, std::max(0.0, 2.0 * u - 1.0), state, decision_rng);
        out.push_back(state.label_fraction());
    }
    return out;
}

}  // namespace sdf

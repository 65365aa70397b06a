#include "sdf/adwin.hpp"

#include <cmath>
#include <stdexcept>

#include "sdf/errors.hpp"

namespace sdf {

Adwin::Adwin(double delta, std::size_t max_buckets) : delta_(delta), max_buckets_(max_buckets) {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta", "must be in (0, 1)");
    if (max_buckets < 2) throw ConfigError("max_buckets", "must be >= 2");
}

void Adwin::reset() {
    rows_.clear();
    width_ = 0;
    total_ = 0.0;
    var_sum_ = 0.0;
}

bool Adwin::add(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("Adwin::add: value must be in [0, 1]");
    if (width_ > 0) {
        const double n = static_cast<double>(width_);
        const double diff = v - total_ / n;
        var_sum_ += n * diff * diff / (n + 1.0);
    }
    ++width_;
    total_ += v;
    if (rows_.empty()) rows_.emplace_back();
    rows_[0].buckets.push_back({1, v, 0.0});
    compress();
    const bool change = detect_and_cut();
    if (change) ++detections_;
    return change;
}

void Adwin::compress() {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        auto& row = rows_[i].buckets;
        if (row.size() <= max_buckets_) break;
        const Bucket a = row[0];
        const Bucket b = row[1];
        row.erase(row.begin(), row.begin() + 2);
        const double na = static_cast<double>(a.size);
        const double nb = static_cast<double>(b.size);
        const double diff = a.sum / na - b.sum / nb;
        const Bucket merged{a.size + b.size, a.sum + b.sum, a.variance + b.variance + na * nb * diff * diff / (na + nb)};
        if (i + 1 == rows_.size()) rows_.emplace_back();
        rows_[i + 1].buckets.push_back(merged);
    }
}

void Adwin::drop_oldest() {
    while (!rows_.empty() && rows_.back().buckets.empty()) rows_.pop_back();
    if (rows_.empty()) return;
    auto& row = rows_.back().buckets;
    const Bucket b = row.front();
    row.erase(row.begin());
    if (row.empty()) rows_.pop_back();

    const double nb = static_cast<double>(b.size);
    width_ -= b.size;
    total_ -= b.sum;
    if (width_ == 0) {
        total_ = 0.0;
        var_sum_ = 0.0;
        return;
    }
    const double n = static_cast<double>(width_);
    const double diff = b.sum / nb - total_ / n;
    var_sum_ -= b.variance + nb * n * diff * diff / (nb + n);
    if (var_sum_ < 0.0) var_sum_ = 0.0;
}

bool Adwin::detect_and_cut() {
    bool changed = false;
    for (;;) {
        if (width_ < 2) return changed;
        const double n = static_cast<double>(width_);
        const double log_term = std::log(2.0 * n / delta_);
        const double var = var_sum_ / n;
        // Walk boundaries newest to oldest; the first significant one has the largest W0.
        std::size_t n1 = 0;
        double s1 = 0.0;
        std::size_t cut_w0 = 0;
        for (std::size_t r = 0; r < rows_.size() && cut_w0 == 0; ++r) {
            const auto& row = rows_[r].buckets;
            for (auto it = row.rbegin(); it != row.rend(); ++it) {
                n1 += it->size;
                s1 += it->sum;
                const std::size_t n0 = width_ - n1;
                if (n0 == 0) break;
                const double inv_m = 1.0 / static_cast<double>(n0) + 1.0 / static_cast<double>(n1);
                const double diff = std::abs((total_ - s1) / static_cast<double>(n0) - s1 / static_cast<double>(n1));
                const double linear = 2.0 / 3.0 * inv_m * log_term;
                if (diff < linear) continue;
                if (diff >= std::sqrt(2.0 * inv_m * var * log_term) + linear) {
                    cut_w0 = n0;
                    break;
                }
            }
        }
        if (cut_w0 == 0) return changed;
        const std::size_t target = width_ - cut_w0;
        while (width_ > target) drop_oldest();
        changed = true;
    }
}

std::vector<Adwin::Bucket> Adwin::buckets() const {
    std::vector<Bucket> out;
    for (auto r = rows_.rbegin(); r != rows_.rend(); ++r)
        for (const auto& b : r->buckets) out.push_back(b);
    return out;
}

}  // namespace sdf

#pragma once

#include <cstddef>
#include <vector>

namespace sdf {

// ADWIN change detector over values in [0, 1], backed by an exponential
// histogram: row i holds buckets of 2^i elements, at most max_buckets per row.
//
// After every insertion all bucket boundaries are tested as cuts W = W0 | W1
// (W0 older). A cut is significant when
//   |mean(W0) - mean(W1)| >= sqrt(2/m * var(W) * ln(2/d')) + 2/(3m) * ln(2/d')
// with 1/m = 1/n0 + 1/n1 and d' = delta / n. On a significant cut the W0 of the
// newest significant boundary is dropped, and the test repeats on what is left.
class Adwin {
public:
    struct Bucket {
        std::size_t size = 0;
        double sum = 0.0;
        double variance = 0.0;  // sum of squared deviations from the bucket mean
    };

    explicit Adwin(double delta = 0.002, std::size_t max_buckets = 5);

    // Returns true when a change was detected (and the window shrank).
    // Throws std::domain_error for v outside [0, 1].
    bool add(double v);

    // Windowed mean; 0 when empty.
    double estimate() const noexcept { return width_ ? total_ / static_cast<double>(width_) : 0.0; }
    std::size_t width() const noexcept { return width_; }
    double total() const noexcept { return total_; }
    // Population variance of the window.
    double variance() const noexcept { return width_ ? var_sum_ / static_cast<double>(width_) : 0.0; }
    double variance_sum() const noexcept { return var_sum_; }
    double delta() const noexcept { return delta_; }
    std::size_t max_buckets() const noexcept { return max_buckets_; }
    std::size_t detections() const noexcept { return detections_; }

    // Buckets ordered oldest first.
    std::vector<Bucket> buckets() const;

    void reset();

private:
    struct Row {
        std::vector<Bucket> buckets;  // oldest first
    };

    void compress();
    bool detect_and_cut();
    void drop_oldest();

    double delta_;
    std::size_t max_buckets_;
    std::vector<Row> rows_;
    std::size_t width_ = 0;
    double total_ = 0.0;
    double var_sum_ = 0.0;
    std::size_t detections_ = 0;
};

}  // namespace sdf

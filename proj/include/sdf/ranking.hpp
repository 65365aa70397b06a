#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace sdf {

// Methods x datasets accuracy table; accuracy[method][dataset]. Missing cells are NaN.
struct RankMatrix {
    std::vector<std::string> methods;
    std::vector<std::string> datasets;
    std::vector<std::vector<double>> accuracy;

    // Throws DataError for shape mismatches, duplicate labels or a missing cell
    // (the message names the method and dataset).
    void validate() const;

    // CSV with a header "dataset,<method1>,<method2>,..." and one row per dataset.
    // Empty or "?" cells load as NaN.
    static RankMatrix from_csv(std::istream& in);
    static RankMatrix from_csv_file(const std::string& path);
};

// Per-dataset ranks (1 = highest accuracy, ties share the mean rank);
// result[method][dataset].
std::vector<std::vector<double>> dataset_ranks(const RankMatrix& m);

// Mean rank of each method across datasets.
std::vector<double> average_ranks(const RankMatrix& m);

// Critical value q_alpha of the Nemenyi test (Studentized range / sqrt 2),
// tabulated for alpha = 0.05 and k = 2..20 methods.
double nemenyi_q(std::size_t k, double alpha = 0.05);

struct FriedmanNemenyiResult {
    std::vector<double> mean_ranks;
    double chi_square = 0.0;
    double p_value = 1.0;
    bool reject = false;
    double q_alpha = 0.0;
    double critical_distance = 0.0;
};

// Friedman chi-square over mean ranks with k-1 degrees of freedom, plus the
// Nemenyi critical distance q_alpha sqrt(k(k+1)/(6N)). Needs k >= 3, N >= 2.
FriedmanNemenyiResult friedman_nemenyi(const RankMatrix& m, double alpha = 0.05);

}  // namespace sdf

#include "sdf/ranking.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "sdf/errors.hpp"

namespace sdf {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n\"");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n\"");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

void RankMatrix::validate() const {
    if (methods.empty() || datasets.empty()) throw DataError("rank matrix needs at least one method and one dataset");
    if (std::set<std::string>(methods.begin(), methods.end()).size() != methods.size())
        throw DataError("duplicate method label");
    if (std::set<std::string>(datasets.begin(), datasets.end()).size() != datasets.size())
        throw DataError("duplicate dataset label");
    if (accuracy.size() != methods.size()) throw DataError("accuracy rows do not match the method count");
    for (std::size_t i = 0; i < methods.size(); ++i) {
        if (accuracy[i].size() != datasets.size())
            throw DataError("accuracy row for method '" + methods[i] + "' does not match the dataset count");
        for (std::size_t j = 0; j < datasets.size(); ++j)
            if (!std::isfinite(accuracy[i][j]))
                throw DataError("missing accuracy for method '" + methods[i] + "' on dataset '" + datasets[j] + "'");
    }
}

RankMatrix RankMatrix::from_csv(std::istream& in) {
    RankMatrix m;
    std::string line;
    std::size_t number = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto fields = split(line);
        if (!header) {
            if (fields.size() < 2) throw DataError("header needs a dataset column and at least one method", number);
            m.methods.assign(fields.begin() + 1, fields.end());
            m.accuracy.assign(m.methods.size(), {});
            header = true;
            continue;
        }
        if (fields.size() != m.methods.size() + 1)
            throw DataError("expected " + std::to_string(m.methods.size() + 1) + " fields", number);
        m.datasets.push_back(fields[0]);
        for (std::size_t i = 0; i < m.methods.size(); ++i) {
            const std::string& cell = fields[i + 1];
            double v = std::numeric_limits<double>::quiet_NaN();
            if (!cell.empty() && cell != "?") {
                const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (ec != std::errc() || ptr != cell.data() + cell.size())
                    throw DataError("cannot parse '" + cell + "' as an accuracy", number);
            }
            m.accuracy[i].push_back(v);
        }
    }
    if (!header) throw DataError("empty accuracy table");
    return m;
}

RankMatrix RankMatrix::from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return from_csv(in);
}

std::vector<std::vector<double>> dataset_ranks(const RankMatrix& m) {
    m.validate();
    const std::size_t k = m.methods.size();
    std::vector<std::vector<double>> ranks(k, std::vector<double>(m.datasets.size()));
    std::vector<std::size_t> order(k);
    for (std::size_t j = 0; j < m.datasets.size(); ++j) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return m.accuracy[a][j] > m.accuracy[b][j]; });
        for (std::size_t pos = 0; pos < k;) {
            std::size_t end = pos + 1;
            while (end < k && m.accuracy[order[end]][j] == m.accuracy[order[pos]][j]) ++end;
            const double shared = (static_cast<double>(pos + 1) + static_cast<double>(end)) / 2.0;
            for (std::size_t t = pos; t < end; ++t) ranks[order[t]][j] = shared;
            pos = end;
        }
    }
    return ranks;
}

std::vector<double> average_ranks(const RankMatrix& m) {
    const auto ranks = dataset_ranks(m);
    std::vector<double> out;
    out.reserve(ranks.size());
    for (const auto& row : ranks)
        out.push_back(std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size()));
    return out;
}

double nemenyi_q(std::size_t k, double alpha) {
    static constexpr std::array<double, 19> q05 = {1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031,
                                                   3.102, 3.164, 3.219, 3.268, 3.313, 3.354, 3.391,
                                                   3.426, 3.458, 3.489, 3.517, 3.544};
    if (std::abs(alpha - 0.05) > 1e-12) throw std::domain_error("nemenyi_q: only alpha = 0.05 is tabulated");
    if (k < 2 || k > 20) throw std::domain_error("nemenyi_q: k must be in 2..20");
    return q05[k - 2];
}

FriedmanNemenyiResult friedman_nemenyi(const RankMatrix& m, double alpha) {
    const std::size_t k = m.methods.size();
    const std::size_t n = m.datasets.size();
    if (k < 3) throw std::domain_error("friedman_nemenyi: needs at least 3 methods");
    if (n < 2) throw std::domain_error("friedman_nemenyi: needs at least 2 datasets");
    FriedmanNemenyiResult r;
    r.mean_ranks = average_ranks(m);
    const double kk = static_cast<double>(k);
    const double nn = static_cast<double>(n);
    double sum_sq = 0.0;
    for (double rank : r.mean_ranks) sum_sq += rank * rank;
    r.chi_square = 12.0 * nn / (kk * (kk + 1.0)) * (sum_sq - kk * (kk + 1.0) * (kk + 1.0) / 4.0);
    if (std::abs(r.chi_square) < 1e-12) r.chi_square = 0.0;
    const boost::math::chi_squared_distribution<double> dist(kk - 1.0);
    r.p_value = boost::math::cdf(boost::math::complement(dist, std::max(0.0, r.chi_square)));
    r.reject = r.p_value < alpha;
    r.q_alpha = nemenyi_q(k, alpha);
    r.critical_distance = r.q_alpha * std::sqrt(kk * (kk + 1.0) / (6.0 * nn));
    return r;
}

}  // namespace sdf

#include "reportqa/kmeans1d.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "reportqa/error.hpp"

namespace reportqa {

Kmeans1dResult kmeans_1d(const std::vector<double>& values, std::size_t k,
                         std::size_t max_iters, Rng& rng) {
    if (values.empty()) throw Error("kmeans_1d: no values");
    const std::size_t distinct = std::set<double>(values.begin(), values.end()).size();
    k = std::min(std::max<std::size_t>(k, 1), distinct);

    std::vector<double> centers;
    centers.reserve(k);
    centers.push_back(values[rng.next_below(values.size())]);
    while (centers.size() < k) {
        double best_dist = -1.0;
        double best_value = 0.0;
        for (double v : values) {
            double d = std::abs(v - centers[0]);
            for (std::size_t c = 1; c < centers.size(); ++c) {
                d = std::min(d, std::abs(v - centers[c]));
            }
            if (d > best_dist || (d == best_dist && v < best_value)) {
                best_dist = d;
                best_value = v;
            }
        }
        centers.push_back(best_value);
    }

    Kmeans1dResult result;
    result.assignment.assign(values.size(), 0);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::size_t best = 0;
            double best_d = std::abs(values[i] - centers[0]);
            for (std::size_t c = 1; c < centers.size(); ++c) {
                const double d = std::abs(values[i] - centers[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (result.assignment[i] != best) {
                result.assignment[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        std::vector<double> sums(centers.size(), 0.0);
        std::vector<std::size_t> counts(centers.size(), 0);
        for (std::size_t i = 0; i < values.size(); ++i) {
            sums[result.assignment[i]] += values[i];
            counts[result.assignment[i]] += 1;
        }
        for (std::size_t c = 0; c < centers.size(); ++c) {
            if (counts[c] > 0) centers[c] = sums[c] / static_cast<double>(counts[c]);
        }
    }
    result.centers = std::move(centers);
    return result;
}

}  // namespace reportqa

#pragma once

#include <cstddef>
#include <vector>

#include "reportqa/rng.hpp"

namespace reportqa {

struct Kmeans1dResult {
    std::vector<double> centers;           // one per cluster, k entries
    std::vector<std::size_t> assignment;   // cluster index per input value
};

// Lloyd iterations on scalars with farthest-point seeding: the first
// center is drawn from rng, each further center is the value with the
// largest distance to the chosen set (ties: smaller value, then smaller
// index). Assignment ties go to the lower cluster index. Deterministic
// for a fixed rng state.
//
// k is clamped to the number of distinct values; empty clusters keep
// their previous center.
Kmeans1dResult kmeans_1d(const std::vector<double>& values, std::size_t k,
                         std::size_t max_iters, Rng& rng);

}  // namespace reportqa

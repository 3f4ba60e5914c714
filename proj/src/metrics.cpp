#include "reportqa/metrics.hpp"

#include <algorithm>
#include <vector>

#include "reportqa/textutil.hpp"

namespace reportqa {

int soft_accuracy(std::string_view prediction, std::string_view gold) {
    return contains_normalized(prediction, gold) ? 1 : 0;
}

namespace {

std::size_t lcs_length(const std::vector<std::u32string>& a,
                       const std::vector<std::u32string>& b) {
    if (a.empty() || b.empty()) return 0;
    // Two-row DP over prefixes.
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> curr(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                curr[j] = prev[j - 1] + 1;
            } else {
                curr[j] = std::max(prev[j], curr[j - 1]);
            }
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

}  // namespace

double rouge_l(std::string_view prediction, std::string_view gold) {
    const auto pred_tokens = lcs_tokens(prediction);
    const auto gold_tokens = lcs_tokens(gold);
    const std::size_t lcs = lcs_length(pred_tokens, gold_tokens);
    if (lcs == 0) return 0.0;
    const double p = static_cast<double>(lcs) / static_cast<double>(pred_tokens.size());
    const double r = static_cast<double>(lcs) / static_cast<double>(gold_tokens.size());
    return 2.0 * p * r / (p + r);
}

}  // namespace reportqa

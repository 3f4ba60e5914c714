#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "reportqa/metrics.hpp"
#include "reportqa/rng.hpp"
#include "reportqa/textutil.hpp"

using namespace reportqa;

namespace {

// Full-table LCS, kept independent of the two-row implementation in the
// library.
std::size_t oracle_lcs(const std::vector<std::u32string>& a,
                       const std::vector<std::u32string>& b) {
    std::vector<std::vector<std::size_t>> dp(a.size() + 1,
                                             std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = a.size(); i-- > 0;) {
        for (std::size_t j = b.size(); j-- > 0;) {
            dp[i][j] = a[i] == b[j] ? dp[i + 1][j + 1] + 1 : std::max(dp[i + 1][j], dp[i][j + 1]);
        }
    }
    return dp[0][0];
}

double oracle_rouge(const std::string& pred, const std::string& gold) {
    const auto a = lcs_tokens(pred);
    const auto b = lcs_tokens(gold);
    const std::size_t lcs = oracle_lcs(a, b);
    if (lcs == 0) return 0.0;
    const double p = static_cast<double>(lcs) / static_cast<double>(a.size());
    const double r = static_cast<double>(lcs) / static_cast<double>(b.size());
    return 2 * p * r / (p + r);
}

std::string random_text(Rng& rng, std::size_t max_len) {
    static const std::u32string alphabet = U"ab 12血红蛋白高低WBC.";
    std::u32string cps;
    const std::size_t n = rng.next_below(max_len + 1);
    for (std::size_t i = 0; i < n; ++i) cps.push_back(alphabet[rng.next_below(alphabet.size())]);
    return encode_utf8(cps);
}

}  // namespace

TEST_CASE("soft accuracy is containment after normalization") {
    CHECK(soft_accuracy("The result of WBC is 5.4.", "5.4") == 1);
    CHECK(soft_accuracy("5.4", "5.4") == 1);
    CHECK(soft_accuracy("5.40", "5.4") == 1);  // documented leniency
    CHECK(soft_accuracy("the answer is 5.5", "5.4") == 0);
    CHECK(soft_accuracy("ＷＢＣ ５．４", "wbc 5.4") == 1);
    CHECK(soft_accuracy("  spaced   out  ", "spaced out") == 1);
}

TEST_CASE("rouge_l on identical and disjoint strings") {
    CHECK(rouge_l("abc def", "abc def") == 1.0);
    CHECK(rouge_l("血红蛋白", "血红蛋白") == 1.0);
    CHECK(rouge_l("abc", "xyz") == 0.0);
    CHECK(rouge_l("", "") == 0.0);
    CHECK(rouge_l("", "abc") == 0.0);
    CHECK(rouge_l("abc", "") == 0.0);
}

TEST_CASE("rouge_l hand-checked value") {
    // pred tokens {a,b,c}, gold tokens {a,c}: LCS 2, P 2/3, R 1 -> 0.8.
    CHECK(rouge_l("a b c", "a c") == doctest::Approx(0.8));
}

TEST_CASE("rouge_l equals the DP oracle on 1000 random pairs") {
    Rng rng(41);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::string a = random_text(rng, 30);
        const std::string b = random_text(rng, 30);
        CHECK(rouge_l(a, b) == oracle_rouge(a, b));
    }
}

TEST_CASE("rouge_l is symmetric and reflexive") {
    Rng rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const std::string a = random_text(rng, 20);
        const std::string b = random_text(rng, 20);
        CHECK(rouge_l(a, b) == rouge_l(b, a));
        if (!lcs_tokens(a).empty()) CHECK(rouge_l(a, a) == 1.0);
    }
}

TEST_CASE("soft accuracy is reflexive") {
    Rng rng(43);
    for (int trial = 0; trial < 300; ++trial) {
        const std::string g = random_text(rng, 20);
        CHECK(soft_accuracy(g, g) == 1);
    }
}

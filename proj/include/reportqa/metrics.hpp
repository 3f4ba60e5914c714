#pragma once

#include <string_view>

namespace reportqa {

// 1 when the normalized prediction contains the normalized gold answer as
// a contiguous substring, else 0. Normalization: trim, collapse
// whitespace, half-width fold, ASCII case fold. Containment is
// deliberately lenient ("5.40" contains "5.4").
int soft_accuracy(std::string_view prediction, std::string_view gold);

// LCS-based F1 between the token streams of the two strings. CJK code
// points are single-character tokens, Latin runs split on whitespace.
// 0 when the streams share nothing (including two empty strings).
double rouge_l(std::string_view prediction, std::string_view gold);

}  // namespace reportqa

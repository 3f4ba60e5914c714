#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reportqa/annotation.hpp"
#include "reportqa/rng.hpp"

namespace reportqa {

enum class QaTask { Entity, Table, TableNR, Reason, Custom };
enum class QaSubtask {
    Single,
    Multi,
    SingleCell,
    SingleRow,
    MultiRow,
    Comparison,
    MultiAbnormal,
    MC,
    SA,
    Summarization,
};
enum class AnswerType { SS, MS, NS };

std::string to_string(QaTask t);
QaTask qa_task_from_string(std::string_view s);
std::string to_string(QaSubtask t);
QaSubtask qa_subtask_from_string(std::string_view s);
std::string to_string(AnswerType t);
AnswerType answer_type_from_string(std::string_view s);

// Fixed reply expected from a model when the question cannot be answered
// from the document.
inline constexpr const char* kAbstainToken = "UNANSWERABLE";

struct QaItem {
    std::string qa_id;
    std::string image_id;
    QaTask task = QaTask::Entity;
    QaSubtask subtask = QaSubtask::Single;
    std::string question;
    std::string answer;
    AnswerType answer_type = AnswerType::SS;
    bool answerable = true;
    std::optional<std::vector<std::string>> options;  // Reason/MC only, 4 entries
    std::optional<int> correct_index;                 // 0..3 when options present
    std::vector<std::string> context_ids;             // gold first for MC
};

std::string qa_item_to_json(const QaItem& item);
QaItem qa_item_from_json(std::string_view line);
std::string bank_to_jsonl(const std::vector<QaItem>& bank);
std::vector<QaItem> bank_from_jsonl(std::string_view bytes);

// Similarity used to rank distractor titles. score(a, a) == 1 and
// score(a, b) == score(b, a).
class SimilarityProvider {
public:
    virtual ~SimilarityProvider() = default;
    virtual double score(std::string_view a, std::string_view b) const = 0;
};

// Cosine over character-bigram counts of the normalized strings.
// Language-neutral and dependency-free; an embedding-backed provider can
// be swapped in through the same interface.
class BigramCosineSimilarity : public SimilarityProvider {
public:
    double score(std::string_view a, std::string_view b) const override;
};

struct QaTemplate {
    QaTask task = QaTask::Custom;
    QaSubtask subtask = QaSubtask::Summarization;
    // Slots: {key:<name>} (value of the kv pair with that key),
    // {item_count}, {abnormal_count}, {abnormal_items}.
    std::string question_pattern;
    std::string answer_pattern;
};

QaTemplate builtin_summarization_template();

struct GenConfig {
    std::uint64_t seed = 0;
    double unanswerable_fraction = 0.0;
    // 0 means the default rule min(C(n,2), 2n).
    std::size_t multirow_pair_limit = 0;
    std::optional<QaTemplate> custom_template;
    // Worker threads for per-annotation generation. Output is identical
    // for any value: every annotation draws from its own seeded stream and
    // the balancing/unanswerable passes run single-threaded afterwards.
    std::size_t jobs = 1;
};

std::vector<QaItem> generate_entity(const ReportAnnotation& ann, const SynonymSchema& schema,
                                    Rng& rng);
std::vector<QaItem> generate_table(const ReportAnnotation& ann, const SynonymSchema& schema,
                                   Rng& rng, std::size_t multirow_pair_limit = 0);
std::vector<QaItem> generate_tablenr(const ReportAnnotation& ann, const SynonymSchema& schema,
                                     Rng& rng);
QaItem generate_custom(const ReportAnnotation& ann, const QaTemplate& tmpl);
// One item per gold context reference; options are the gold title plus the
// three most similar other titles (ties broken by fact id). correct_index
// is provisional (gold first) until balance_mc_positions runs.
std::vector<QaItem> generate_reasoning_mc(const ReportAnnotation& ann, const FactBase& facts,
                                          const SimilarityProvider& sim, Rng& rng);
std::vector<QaItem> generate_reasoning_sa(const ReportAnnotation& ann, const FactBase& facts);

// Round-robin assignment of the correct option position across the bank
// in item order, starting from a seeded offset; position counts over any
// run differ by at most one.
void balance_mc_positions(std::vector<QaItem>& bank, Rng& rng);

// Candidate absent keys/items used when rewriting questions to be
// unanswerable; exposed so tests can verify membership.
const std::vector<std::string>& unanswerable_key_pool();
const std::vector<std::string>& unanswerable_item_pool();

// Rewrites a seeded sample of Entity/Table items to ask about a key or
// item the annotation does not contain; the answer becomes the abstention
// token. Items whose annotation offers no usable decoy are left alone.
void mark_unanswerable(std::vector<QaItem>& bank,
                       const std::vector<ReportAnnotation>& annotations, Rng& rng,
                       double fraction);

// Full bank over a corpus: per-annotation generation (deterministic under
// any worker order), bank-order MC balancing, then unanswerable rewrites.
std::vector<QaItem> generate_bank(const std::vector<ReportAnnotation>& annotations,
                                  const FactBase& facts, const SynonymSchema& schema,
                                  const SimilarityProvider& sim, const GenConfig& config);

}  // namespace reportqa

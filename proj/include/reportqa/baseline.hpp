#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "reportqa/annotation.hpp"
#include "reportqa/qa_gen.hpp"

namespace reportqa {

struct RetryPolicy {
    int max_attempts = 3;
    double backoff_base_s = 0.25;  // doubles per attempt
};

struct EndpointConfig {
    std::string base_url;        // full URL including path
    std::string auth_env;        // env var holding the bearer token, may be empty
    std::string model;
    int max_in_flight = 4;
    double timeout_s = 30;
    RetryPolicy retry;
    // Dot path into the response JSON where the generated text lives;
    // adapts to providers that answer {"choices":[{"message":{"content":..}}]}.
    std::string response_text_path = "text";
    std::string prompt_template_path;  // empty -> built-in template

    void validate() const;
};

EndpointConfig endpoint_config_from_json(std::string_view bytes);

struct PromptRecord {
    std::string qa_id;
    std::string prompt;
    std::string template_token;
};

const std::string& default_prompt_template();

// Fills the template's {document}, {context_block}, {question} and
// {options_block} slots. The context block appears exactly when the item
// carries context ids; MC options are labeled A-D.
PromptRecord build_prompt(const std::string& document_text, const QaItem& qa,
                          const FactBase& facts, const std::string& template_text,
                          const std::string& template_token = "builtin-default");

struct ItemOutcome {
    std::string qa_id;
    int attempts = 0;
    bool ok = false;
    bool skipped = false;  // already present in the output file
};

struct RunSummary {
    std::vector<ItemOutcome> items;
    std::size_t completed = 0;
    std::size_t failed = 0;
    std::size_t skipped = 0;
};

// Submits one request per bank item with at most max_in_flight in
// parallel, appending predictions to out_path as they arrive. qa_ids
// already present in the output are skipped, which makes interrupted runs
// resumable. Items that still fail after the retry budget are written
// with empty text. Auth failures abort the whole run.
RunSummary run_batch(const std::vector<QaItem>& bank,
                     const std::map<std::string, std::string>& docs_by_image,
                     const FactBase& facts, const EndpointConfig& endpoint,
                     const std::string& out_path);

// Writes prompt records instead of calling the endpoint.
RunSummary run_batch_dry(const std::vector<QaItem>& bank,
                         const std::map<std::string, std::string>& docs_by_image,
                         const FactBase& facts, const EndpointConfig& endpoint,
                         const std::string& out_path);

}  // namespace reportqa

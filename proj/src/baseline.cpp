#include "reportqa/baseline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "reportqa/error.hpp"
#include "reportqa/log.hpp"
#include "reportqa/scoring.hpp"

namespace reportqa {

using nlohmann::json;

void EndpointConfig::validate() const {
    if (base_url.empty()) throw ValidationError("endpoint base_url is empty");
    if (max_in_flight < 1) throw ValidationError("max_in_flight must be >= 1");
    if (timeout_s <= 0) throw ValidationError("timeout must be > 0");
    if (retry.max_attempts < 1) throw ValidationError("retry max_attempts must be >= 1");
}

EndpointConfig endpoint_config_from_json(std::string_view bytes) {
    json root;
    try {
        root = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed endpoint config JSON at byte " + std::to_string(e.byte) +
                         ": " + e.what(), e.byte);
    }
    EndpointConfig cfg;
    cfg.base_url = root.at("base_url").get<std::string>();
    cfg.auth_env = root.value("auth_env", std::string{});
    cfg.model = root.value("model", std::string{});
    cfg.max_in_flight = root.value("max_in_flight", cfg.max_in_flight);
    cfg.timeout_s = root.value("timeout_s", cfg.timeout_s);
    if (root.contains("retry")) {
        cfg.retry.max_attempts = root["retry"].value("max_attempts", cfg.retry.max_attempts);
        cfg.retry.backoff_base_s = root["retry"].value("backoff_base_s", cfg.retry.backoff_base_s);
    }
    cfg.response_text_path = root.value("response_text_path", cfg.response_text_path);
    cfg.prompt_template_path = root.value("prompt_template", std::string{});
    cfg.validate();
    return cfg;
}

const std::string& default_prompt_template() {
    static const std::string tmpl =
        "Answer the question using the medical report below. Reply with the answer only; "
        "if the report does not contain the answer, reply UNANSWERABLE.\n"
        "\n"
        "Report:\n"
        "{document}\n"
        "\n"
        "{context_block}Question: {question}\n"
        "{options_block}Answer:";
    return tmpl;
}

namespace {

std::string replace_all(std::string text, std::string_view slot, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(slot, pos)) != std::string::npos) {
        text.replace(pos, slot.size(), value);
        pos += value.size();
    }
    return text;
}

}  // namespace

PromptRecord build_prompt(const std::string& document_text, const QaItem& qa,
                          const FactBase& facts, const std::string& template_text,
                          const std::string& template_token) {
    if (template_text.find("{document}") == std::string::npos ||
        template_text.find("{question}") == std::string::npos) {
        throw Error("prompt template must contain {document} and {question}");
    }

    std::string context_block;
    if (!qa.context_ids.empty()) {
        context_block = "Context:\n";
        for (const auto& id : qa.context_ids) {
            const ContextFact& fact = facts.by_id(id);
            context_block += "- " + fact.title + ": " + fact.description + "\n";
        }
        context_block += "\n";
    }

    std::string options_block;
    if (qa.options) {
        options_block = "Options:\n";
        static const char* labels[] = {"A", "B", "C", "D"};
        for (std::size_t i = 0; i < qa.options->size() && i < 4; ++i) {
            options_block += std::string(labels[i]) + ". " + (*qa.options)[i] + "\n";
        }
        options_block += "\n";
    }

    PromptRecord record;
    record.qa_id = qa.qa_id;
    record.template_token = template_token;
    record.prompt = replace_all(template_text, "{document}", document_text);
    record.prompt = replace_all(std::move(record.prompt), "{context_block}", context_block);
    record.prompt = replace_all(std::move(record.prompt), "{question}", qa.question);
    record.prompt = replace_all(std::move(record.prompt), "{options_block}", options_block);
    return record;
}

namespace {

struct UrlParts {
    std::string host;  // scheme://host[:port]
    std::string path;
};

UrlParts split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ValidationError("base_url must include a scheme");
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

const json* walk_path(const json& root, const std::string& dot_path) {
    const json* node = &root;
    std::stringstream ss(dot_path);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) continue;
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = static_cast<std::size_t>(std::stoul(part));
            } catch (const std::exception&) {
                return nullptr;
            }
            if (idx >= node->size()) return nullptr;
            node = &(*node)[idx];
        } else if (node->is_object() && node->contains(part)) {
            node = &(*node)[part];
        } else {
            return nullptr;
        }
    }
    return node;
}

class AuthFailure : public Error {
public:
    using Error::Error;
};

std::vector<std::pair<const QaItem*, std::string>> prepare_prompts(
    const std::vector<QaItem>& bank, const std::map<std::string, std::string>& docs_by_image,
    const FactBase& facts, const EndpointConfig& endpoint) {
    std::string template_text = default_prompt_template();
    std::string token = "builtin-default";
    if (!endpoint.prompt_template_path.empty()) {
        std::ifstream in(endpoint.prompt_template_path, std::ios::binary);
        if (!in) throw Error("cannot read prompt template " + endpoint.prompt_template_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        template_text = ss.str();
        token = endpoint.prompt_template_path;
    }

    std::vector<std::string> missing;
    std::vector<std::pair<const QaItem*, std::string>> prompts;
    for (const auto& item : bank) {
        auto it = docs_by_image.find(item.image_id);
        if (it == docs_by_image.end()) {
            missing.push_back(item.image_id);
            continue;
        }
        prompts.emplace_back(&item,
                             build_prompt(it->second, item, facts, template_text, token).prompt);
    }
    if (!missing.empty()) {
        std::string msg = "no restored document for image_id(s):";
        std::size_t shown = 0;
        for (const auto& id : missing) {
            if (shown++ == 8) {
                msg += " ...";
                break;
            }
            msg += " " + id;
        }
        throw Error(msg);
    }
    return prompts;
}

}  // namespace

RunSummary run_batch_dry(const std::vector<QaItem>& bank,
                         const std::map<std::string, std::string>& docs_by_image,
                         const FactBase& facts, const EndpointConfig& endpoint,
                         const std::string& out_path) {
    const auto prompts = prepare_prompts(bank, docs_by_image, facts, endpoint);
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + out_path);
    RunSummary summary;
    for (const auto& [item, prompt] : prompts) {
        json j;
        j["qa_id"] = item->qa_id;
        j["prompt"] = prompt;
        out << j.dump() << "\n";
        summary.items.push_back({item->qa_id, 0, true, false});
        ++summary.completed;
    }
    return summary;
}

RunSummary run_batch(const std::vector<QaItem>& bank,
                     const std::map<std::string, std::string>& docs_by_image,
                     const FactBase& facts, const EndpointConfig& endpoint,
                     const std::string& out_path) {
    endpoint.validate();
    const auto url = split_url(endpoint.base_url);

    std::string auth_token;
    if (!endpoint.auth_env.empty()) {
        const char* v = std::getenv(endpoint.auth_env.c_str());
        if (!v || !*v) {
            throw Error("auth environment variable " + endpoint.auth_env + " is not set");
        }
        auth_token = v;
    }

    // Resume: anything already in the output file stays as-is.
    std::set<std::string> done;
    {
        std::ifstream existing(out_path, std::ios::binary);
        if (existing) {
            std::ostringstream ss;
            ss << existing.rdbuf();
            for (const auto& p : predictions_from_jsonl(ss.str())) done.insert(p.qa_id);
        }
    }

    auto prompts = prepare_prompts(bank, docs_by_image, facts, endpoint);

    RunSummary summary;
    std::vector<std::pair<const QaItem*, std::string>> todo;
    for (auto& entry : prompts) {
        if (done.count(entry.first->qa_id)) {
            summary.items.push_back({entry.first->qa_id, 0, true, true});
            ++summary.skipped;
        } else {
            todo.push_back(std::move(entry));
        }
    }

    std::ofstream out(out_path, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot write " + out_path);

    std::mutex io_mutex;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> aborted{false};
    std::string abort_reason;
    std::mutex abort_mutex;

    auto worker = [&] {
        httplib::Client client(url.host);
        client.set_connection_timeout(std::chrono::milliseconds(
            static_cast<long long>(endpoint.timeout_s * 1000)));
        client.set_read_timeout(
            std::chrono::milliseconds(static_cast<long long>(endpoint.timeout_s * 1000)));
        client.set_write_timeout(
            std::chrono::milliseconds(static_cast<long long>(endpoint.timeout_s * 1000)));
        if (!auth_token.empty()) client.set_bearer_token_auth(auth_token);

        while (!aborted.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= todo.size()) break;
            const QaItem& item = *todo[i].first;

            json request;
            request["model"] = endpoint.model;
            request["messages"] = json::array({{{"role", "user"}, {"content", todo[i].second}}});
            request["request_id"] = item.qa_id;
            const std::string body = request.dump();

            std::string text;
            bool ok = false;
            int attempts = 0;
            for (; attempts < endpoint.retry.max_attempts && !aborted.load();) {
                ++attempts;
                auto res = client.Post(url.path, body, "application/json");
                if (res && (res->status == 401 || res->status == 403)) {
                    std::lock_guard<std::mutex> lock(abort_mutex);
                    abort_reason = "endpoint rejected authentication (HTTP " +
                                   std::to_string(res->status) + ")";
                    aborted.store(true);
                    break;
                }
                if (res && res->status == 200) {
                    try {
                        const json reply = json::parse(res->body);
                        const json* node = walk_path(reply, endpoint.response_text_path);
                        if (node && node->is_string()) {
                            text = node->get<std::string>();
                            ok = true;
                            break;
                        }
                    } catch (const json::parse_error&) {
                        // fall through to retry
                    }
                }
                if (attempts < endpoint.retry.max_attempts) {
                    const double delay =
                        endpoint.retry.backoff_base_s * static_cast<double>(1LL << (attempts - 1));
                    std::this_thread::sleep_for(
                        std::chrono::duration<double>(std::max(delay, 0.0)));
                }
            }
            if (aborted.load() && !ok) break;

            json line;
            line["qa_id"] = item.qa_id;
            line["text"] = text;
            {
                std::lock_guard<std::mutex> lock(io_mutex);
                out << line.dump() << "\n";
                out.flush();
                summary.items.push_back({item.qa_id, attempts, ok, false});
                if (ok) {
                    ++summary.completed;
                } else {
                    ++summary.failed;
                    log_error(item.qa_id + ": no response after " + std::to_string(attempts) +
                              " attempt(s); recorded empty prediction");
                }
            }
        }
    };

    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(endpoint.max_in_flight),
                              std::max<std::size_t>(todo.size(), 1));
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    if (aborted.load()) throw Error(abort_reason.empty() ? "run aborted" : abort_reason);
    return summary;
}

}  // namespace reportqa

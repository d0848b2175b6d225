#pragma once

// Optional synthetic-response generation against an OpenAI-compatible chat
// endpoint: profile-conditioned prompts and double-square-bracket answer
// extraction. A built-in mock endpoint ("mock:<completion>") serves offline
// runs and tests.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "synthcal/core_stats.hpp"
#include "synthcal/dataio.hpp"
#include "synthcal/parallel.hpp"

namespace synthcal {

struct template_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct extraction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct invalid_answer_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct transport_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -------------------------------------------------------------------------
// Prompt templates
// -------------------------------------------------------------------------

struct PromptTemplate {
    std::string persona_preamble;   // slots filled from profile fields
    std::string question_block;     // slots: {question}, {options}
    std::string instruction_suffix; // fixed; demands the [[...]] answer format
};

inline PromptTemplate default_prompt_template() {
    PromptTemplate t;
    t.persona_preamble =
        "Pretend that you are a survey respondent with the following background. "
        "Region: {region}. Age: {age}. Education: {education}. "
        "Answer the question as that person would.";
    t.question_block = "Question: {question}\nOptions: {options}";
    t.instruction_suffix =
        "Reply with the number of your chosen option inside double square "
        "brackets, for example [[2]].";
    return t;
}

namespace detail {

inline std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    if (needle.empty()) return 0;
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

// Replaces {slot} tokens from the field map; unknown slots are an error
// naming the slot.
inline std::string fill_slots(const std::string& templ,
                              const std::map<std::string, std::string>& fields) {
    std::string out;
    out.reserve(templ.size());
    std::size_t i = 0;
    while (i < templ.size()) {
        if (templ[i] == '{') {
            std::size_t close = templ.find('}', i + 1);
            if (close == std::string::npos)
                throw template_error("unterminated '{' in template");
            std::string slot = templ.substr(i + 1, close - i - 1);
            auto it = fields.find(slot);
            if (it == fields.end())
                throw template_error("missing template slot '" + slot + "'");
            out += it->second;
            i = close + 1;
        } else {
            out += templ[i++];
        }
    }
    return out;
}

}  // namespace detail

// Deterministic prompt rendering: persona slots from the profile, question
// slots from the question text/options, then the fixed instruction suffix.
inline std::string render_prompt(const PromptTemplate& tmpl,
                                 const std::map<std::string, std::string>& profile_fields,
                                 const std::string& question_text,
                                 const std::vector<std::string>& options = {}) {
    if (question_text.empty()) throw template_error("empty question text");
    if (tmpl.instruction_suffix.empty()) throw template_error("empty instruction suffix");
    std::string persona = detail::fill_slots(tmpl.persona_preamble, profile_fields);
    std::string option_list;
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (i) option_list += ", ";
        option_list += std::to_string(i + 1) + ". " + options[i];
    }
    std::map<std::string, std::string> question_fields{{"question", question_text},
                                                       {"options", option_list}};
    std::string question = detail::fill_slots(tmpl.question_block, question_fields);
    std::string prompt = persona + "\n\n" + question + "\n\n" + tmpl.instruction_suffix;
    if (detail::count_occurrences(prompt, tmpl.instruction_suffix) != 1)
        throw template_error("rendered prompt must contain the instruction suffix exactly once");
    return prompt;
}

// Content of the last [[...]] group whose trimmed content is one of the
// valid answers. No bracket group at all is an extraction error; groups
// whose content is never valid is an invalid-answer error (retryable).
inline std::string extract_answer(const std::string& completion_text,
                                  const std::vector<std::string>& valid_answers) {
    if (valid_answers.empty())
        throw std::invalid_argument("extract_answer: valid_answers must be nonempty");
    auto trim = [](std::string s) {
        std::size_t b = s.find_first_not_of(" \t\r\n");
        std::size_t e = s.find_last_not_of(" \t\r\n");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    bool found_group = false;
    std::string best;
    bool best_valid = false;
    std::size_t pos = 0;
    while ((pos = completion_text.find("[[", pos)) != std::string::npos) {
        std::size_t close = completion_text.find("]]", pos + 2);
        if (close == std::string::npos) break;
        found_group = true;
        std::string content = trim(completion_text.substr(pos + 2, close - pos - 2));
        for (const std::string& valid : valid_answers) {
            if (content == valid) {
                best = content;
                best_valid = true;
                break;
            }
        }
        pos = close + 2;
    }
    if (!found_group)
        throw extraction_error("no [[...]] answer group in completion");
    if (!best_valid)
        throw invalid_answer_error("no [[...]] group with a valid answer in completion");
    return best;
}

// -------------------------------------------------------------------------
// Chat transport
// -------------------------------------------------------------------------

struct GenConfig {
    std::string endpoint;  // e.g. http://localhost:8000/v1 or mock:[[2]]
    std::string model = "default-model";
    double temperature = 0.7;
    int max_retries = 3;
    int timeout_sec = 30;
    unsigned parallel = 4;  // in-flight request limit
};

// Reads the API key from the environment only; never stored in results.
inline std::string api_key_from_env() {
    if (const char* k = std::getenv("SYNTHCAL_API_KEY")) return k;
    if (const char* k = std::getenv("OPENAI_API_KEY")) return k;
    return {};
}

inline ordered_json build_chat_request(const GenConfig& cfg, const std::string& prompt) {
    ordered_json req;
    req["model"] = cfg.model;
    req["messages"] = ordered_json::array();
    ordered_json msg;
    msg["role"] = "user";
    msg["content"] = prompt;
    req["messages"].push_back(std::move(msg));
    req["temperature"] = cfg.temperature;
    return req;
}

inline std::string parse_chat_content(const std::string& body) {
    ordered_json j;
    try {
        j = ordered_json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw transport_error(std::string("malformed completion response: ") + e.what());
    }
    if (!j.contains("choices") || !j.at("choices").is_array() || j.at("choices").empty())
        throw transport_error("completion response has no choices");
    const auto& choice = j.at("choices")[0];
    if (!choice.contains("message") || !choice.at("message").contains("content"))
        throw transport_error("completion response has no message content");
    return choice.at("message").at("content").get<std::string>();
}

// Sends one chat-completion request body, returns the raw response body.
// Implementations must be safe to call from multiple threads.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual std::string send(const std::string& request_body) = 0;
};

// Offline endpoint: validates the request shape and answers every request
// with the completion text configured in the endpoint string after "mock:".
class MockChatTransport : public ChatTransport {
public:
    explicit MockChatTransport(std::string completion) : completion_(std::move(completion)) {}

    std::string send(const std::string& request_body) override {
        ordered_json req;
        try {
            req = ordered_json::parse(request_body);
        } catch (const nlohmann::json::exception&) {
            throw transport_error("mock endpoint: request is not JSON");
        }
        if (!req.contains("model") || !req.contains("messages") || req["messages"].empty() ||
            !req["messages"][0].contains("content"))
            throw transport_error("mock endpoint: request missing model/messages");
        ordered_json resp;
        resp["id"] = "mock-completion";
        resp["object"] = "chat.completion";
        resp["model"] = req["model"];
        ordered_json msg;
        msg["role"] = "assistant";
        msg["content"] = completion_;
        ordered_json choice;
        choice["index"] = 0;
        choice["message"] = std::move(msg);
        choice["finish_reason"] = "stop";
        resp["choices"] = ordered_json::array({choice});
        return resp.dump();
    }

private:
    std::string completion_;
};

std::unique_ptr<ChatTransport> make_http_transport(const GenConfig& cfg);  // llm_gen_http.hpp

// Transport for the configured endpoint; "mock:<text>" maps to the built-in
// mock, anything else must be constructed via make_http_transport. Split so
// offline builds and tests never touch sockets.
inline std::unique_ptr<ChatTransport> make_offline_transport(const GenConfig& cfg) {
    if (cfg.endpoint.rfind("mock:", 0) == 0)
        return std::make_unique<MockChatTransport>(cfg.endpoint.substr(5));
    return nullptr;
}

// -------------------------------------------------------------------------
// Generation
// -------------------------------------------------------------------------

struct GenReport {
    struct QuestionGen {
        std::string question_id;
        std::size_t requested = 0;
        std::size_t added = 0;
        std::size_t attempts = 0;
        bool short_flag = false;
    };
    std::vector<QuestionGen> per_question;
    std::vector<ordered_json> provenance;  // question_id, index, model, prompt_hash, attempts
};

namespace detail {

inline std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace detail

// Appends k_new parsed responses to every question of the dataset (in
// memory). Profiles are sampled with replacement from the pool,
// deterministically per (seed, question, slot). Answer parsing failures are
// retried up to max_retries and then recorded as gaps with the question
// flagged short; transport failures abort with the retry count.
inline GenReport generate_responses(Dataset& ds, const PromptTemplate& tmpl,
                                    const std::vector<std::map<std::string, std::string>>& pool,
                                    std::size_t k_new, const GenConfig& cfg, std::uint64_t seed,
                                    ChatTransport& transport) {
    if (pool.empty()) throw std::invalid_argument("generate_responses: empty profile pool");
    if (k_new < 1) throw std::invalid_argument("generate_responses: k must be >= 1");
    if (!ds.score_map)
        throw dataio_error(
            "generate_responses: dataset needs a score_map to turn option choices into scores");
    std::vector<std::string> valid;
    for (std::size_t i = 1; i <= ds.score_map->size(); ++i) valid.push_back(std::to_string(i));

    struct Slot {
        std::size_t question = 0;
        std::size_t index = 0;
        std::string prompt;
        double value = 0.0;
        std::size_t attempts = 0;
        bool ok = false;
    };
    std::vector<Slot> slots;
    slots.reserve(ds.questions.size() * k_new);
    for (std::size_t qi = 0; qi < ds.questions.size(); ++qi) {
        const DatasetQuestion& q = ds.questions[qi];
        if (q.text.empty())
            throw template_error("question '" + q.record.question_id +
                                 "' has no text to prompt with");
        RngStream rng(seed, qi);
        for (std::size_t i = 0; i < k_new; ++i) {
            Slot s;
            s.question = qi;
            s.index = i;
            const auto& profile = pool[rng.below(pool.size())];
            s.prompt = render_prompt(tmpl, profile, q.text, q.options);
            slots.push_back(std::move(s));
        }
    }

    parallel_for(slots.size(), cfg.parallel, [&](std::size_t si) {
        Slot& s = slots[si];
        const int max_attempts = 1 + std::max(cfg.max_retries, 0);
        std::string last_transport_error;
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            ++s.attempts;
            std::string body;
            try {
                body = transport.send(build_chat_request(cfg, s.prompt).dump());
            } catch (const transport_error& e) {
                last_transport_error = e.what();
                continue;
            }
            try {
                std::string answer = extract_answer(parse_chat_content(body), valid);
                // Stored as the raw option index; Dataset::records() maps it
                // to the configured score.
                s.value = static_cast<double>(std::stoul(answer));
                s.ok = true;
                return;
            } catch (const extraction_error&) {
            } catch (const invalid_answer_error&) {
            } catch (const transport_error& e) {
                last_transport_error = e.what();
            }
        }
        if (!last_transport_error.empty())
            throw transport_error("endpoint failed after " + std::to_string(s.attempts) +
                                  " attempts: " + last_transport_error);
    });

    GenReport report;
    report.per_question.resize(ds.questions.size());
    for (std::size_t qi = 0; qi < ds.questions.size(); ++qi) {
        report.per_question[qi].question_id = ds.questions[qi].record.question_id;
        report.per_question[qi].requested = k_new;
    }
    for (const Slot& s : slots) {
        auto& qgen = report.per_question[s.question];
        qgen.attempts += s.attempts;
        if (s.ok) {
            ds.questions[s.question].record.synthetic_responses.push_back(s.value);
            ++qgen.added;
            ordered_json prov;
            prov["question_id"] = qgen.question_id;
            prov["index"] = s.index;
            prov["model"] = cfg.model;
            prov["prompt_hash"] = detail::fnv1a_hex(s.prompt);
            prov["attempts"] = s.attempts;
            report.provenance.push_back(std::move(prov));
        } else {
            qgen.short_flag = true;
        }
    }
    return report;
}

// File-level wrapper with atomic replacement: the dataset file either gains
// exactly the new responses or stays untouched.
inline GenReport generate_into_file(const std::string& dataset_path, const PromptTemplate& tmpl,
                                    const std::vector<std::map<std::string, std::string>>& pool,
                                    std::size_t k_new, const GenConfig& cfg, std::uint64_t seed,
                                    ChatTransport& transport) {
    Dataset ds = load_dataset_file(dataset_path);
    GenReport report = generate_responses(ds, tmpl, pool, k_new, cfg, seed, transport);
    std::string tmp = dataset_path + ".tmp";
    write_dataset(ds, tmp);
    if (std::rename(tmp.c_str(), dataset_path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw dataio_error("atomic replace of '" + dataset_path + "' failed");
    }
    return report;
}

inline PromptTemplate load_template(const std::string& path) {
    ordered_json j = detail::parse_json_file(path);
    PromptTemplate t;
    if (!j.contains("persona_preamble") || !j.contains("question_block") ||
        !j.contains("instruction_suffix"))
        throw dataio_error("'" + path +
                           "': template needs persona_preamble, question_block, "
                           "instruction_suffix");
    t.persona_preamble = j.at("persona_preamble").get<std::string>();
    t.question_block = j.at("question_block").get<std::string>();
    t.instruction_suffix = j.at("instruction_suffix").get<std::string>();
    return t;
}

inline std::vector<std::map<std::string, std::string>> load_profiles(const std::string& path) {
    ordered_json j = detail::parse_json_file(path);
    if (!j.is_array() || j.empty())
        throw dataio_error("'" + path + "': profile pool must be a nonempty JSON array");
    std::vector<std::map<std::string, std::string>> pool;
    for (const auto& p : j) {
        std::map<std::string, std::string> fields;
        for (auto it = p.begin(); it != p.end(); ++it) {
            fields[it.key()] =
                it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
        }
        pool.push_back(std::move(fields));
    }
    return pool;
}

}  // namespace synthcal

#include "sws/llm.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <ostream>
#include <thread>

// httplib pulls in a lot; keep it confined to this translation unit
#include <httplib.h>

#include "sws/error.hpp"

namespace sws::llm {

using ordered_json = nlohmann::ordered_json;
using nlohmann::json;

std::string build_prompt(const Sentence& sentence, bool ranked) {
    std::string prompt(ranked ? kPromptWithRanking : kPromptWithoutRanking);
    const auto pos = prompt.find("[s]");
    prompt.replace(pos, 3, sentence.text);
    return prompt;
}

namespace {

std::string strip_code_fences(const std::string& content) {
    const auto open = content.find("```");
    if (open == std::string::npos) return content;
    auto body_start = content.find('\n', open);
    if (body_start == std::string::npos) return content;
    ++body_start;
    const auto close = content.find("```", body_start);
    if (close == std::string::npos) return content;
    return content.substr(body_start, close - body_start);
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

std::string remove_trailing_commas(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == ',') {
            std::size_t j = i + 1;
            while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
            if (j < s.size() && (s[j] == '}' || s[j] == ']')) continue;
        }
        out.push_back(s[i]);
    }
    return out;
}

std::optional<std::string> balanced_object(const std::string& s) {
    const auto start = s.find('{');
    if (start == std::string::npos) return std::nullopt;
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (c == '\\')
                ++i;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}') {
            --depth;
            if (depth == 0) return s.substr(start, i - start + 1);
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> extract_json_object(const std::string& content) {
    std::string body = strip_code_fences(content);
    // smart quotes show up when models echo the prompt's format example
    replace_all(body, "“", "\"");
    replace_all(body, "”", "\"");
    replace_all(body, "‘", "'");
    replace_all(body, "’", "'");

    auto candidate = balanced_object(body);
    if (!candidate) return std::nullopt;

    ordered_json parsed = ordered_json::parse(*candidate, nullptr, false);
    if (parsed.is_discarded()) {
        const std::string repaired = remove_trailing_commas(*candidate);
        parsed = ordered_json::parse(repaired, nullptr, false);
        if (parsed.is_discarded()) return std::nullopt;
        return repaired;
    }
    return candidate;
}

namespace {

// Chat-completion bodies carry content under choices[0].message.content;
// stub transports may return the content directly.
std::string response_content(const std::string& body) {
    json parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded()) return body;
    if (parsed.contains("choices") && parsed["choices"].is_array() &&
        !parsed["choices"].empty()) {
        const auto& choice = parsed["choices"][0];
        if (choice.contains("message") && choice["message"].contains("content"))
            return choice["message"]["content"].get<std::string>();
        if (choice.contains("text")) return choice["text"].get<std::string>();
    }
    return body;
}

std::optional<SuggestionMap> try_parse_suggestions(const std::string& raw,
                                                   const Sentence& sentence) {
    const auto object_text = extract_json_object(raw);
    if (!object_text) return std::nullopt;
    ordered_json parsed = ordered_json::parse(*object_text, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;

    SuggestionMap out;
    for (const auto& [word, value] : parsed.items()) {
        std::vector<std::string> suggestions;
        if (value.is_array()) {
            for (const auto& s : value)
                if (s.is_string()) suggestions.push_back(s.get<std::string>());
        } else if (value.is_string()) {
            suggestions.push_back(value.get<std::string>());
        } else {
            return std::nullopt;  // malformed entry; ask again
        }
        const bool in_sentence =
            std::find(sentence.tokens.begin(), sentence.tokens.end(), word) !=
            sentence.tokens.end();
        if (!in_sentence) {
            out.dropped_words.push_back(word);
            continue;
        }
        out.entries.emplace_back(word, std::move(suggestions));
    }
    return out;
}

}  // namespace

SuggestionMap prompt_suggestions(const Sentence& sentence, bool ranked,
                                 const ClientConfig& config, ChatTransport& transport,
                                 std::vector<AuditRecord>* audit) {
    if (sentence.tokens.empty()) throw Error(ErrorCode::EMPTY_TEXT, "empty sentence");
    if (config.max_retries == 0)
        throw Error(ErrorCode::CONFIG_INVALID, "max_retries must be at least 1");

    json request{{"model", config.model},
                 {"temperature", config.temperature},
                 {"messages", json::array({json{{"role", "user"},
                                                {"content", build_prompt(sentence, ranked)}}})}};
    const std::string request_body = request.dump();

    for (std::size_t attempt = 1; attempt <= config.max_retries; ++attempt) {
        std::string response_body;
        try {
            response_body = transport.complete(request_body);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(ErrorCode::CLIENT_ERROR, e.what());
        }
        if (audit) audit->push_back({request_body, response_body});

        if (auto parsed = try_parse_suggestions(response_content(response_body), sentence)) {
            parsed->retry_count = attempt - 1;
            return *parsed;
        }
    }
    throw Error(ErrorCode::MALFORMED_RESPONSE,
                "no valid JSON object after " + std::to_string(config.max_retries) + " attempts");
}

std::vector<LlmSuggestion> to_decisions(const SuggestionMap& map, const Sentence& sentence) {
    std::vector<LlmSuggestion> out(sentence.tokens.size());
    for (std::size_t pos = 0; pos < sentence.tokens.size(); ++pos) {
        out[pos].site = make_site(sentence, pos);
        out[pos].decision.site = out[pos].site;
        out[pos].decision.action = Action::KEEP;
        out[pos].pool.site = out[pos].site;
    }

    for (const auto& [word, suggestions] : map.entries) {
        // first occurrence only; repeated words stay KEEP elsewhere
        std::size_t pos = sentence.tokens.size();
        for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
            if (sentence.tokens[i] == word) {
                pos = i;
                break;
            }
        }
        if (pos == sentence.tokens.size()) continue;

        std::vector<std::string> candidates;
        for (const auto& s : suggestions) {
            if (s.empty() || s == word) continue;  // identical "suggestion" is no substitution
            if (std::find(candidates.begin(), candidates.end(), s) == candidates.end())
                candidates.push_back(s);
        }
        if (candidates.empty()) continue;

        auto& entry = out[pos];
        // 1/rank pseudo-probabilities, renormalized
        double z = 0.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) z += 1.0 / static_cast<double>(i + 1);
        entry.pool.candidates = candidates;
        entry.pool.logits.resize(candidates.size());
        entry.pool.probabilities.resize(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            entry.pool.probabilities[i] = (1.0 / static_cast<double>(i + 1)) / z;
            entry.pool.logits[i] = std::log(entry.pool.probabilities[i]);
        }
        entry.pool.original_probability = 0.0;  // the model asserted a change

        entry.decision.action = Action::REPLACE;
        entry.decision.replacement = candidates.front();
        entry.decision.chosen_probability = entry.pool.probabilities.front();
        entry.decision.original_probability = 0.0;
    }
    return out;
}

void write_audit_log(std::ostream& os, std::span<const AuditRecord> records) {
    for (const auto& r : records) {
        json rec{{"request", r.request}, {"response", r.response}};
        os << rec.dump() << '\n';
    }
}

namespace {

class HttpChatTransport final : public ChatTransport {
  public:
    explicit HttpChatTransport(ClientConfig config) : config_(std::move(config)) {
        if (config_.endpoint.empty())
            throw Error(ErrorCode::CONFIG_INVALID, "llm endpoint not configured");
    }

    std::string complete(const std::string& request_json) override {
        throttle();
        httplib::Client client(config_.endpoint);
        client.set_read_timeout(120, 0);

        httplib::Headers headers;
        if (const char* key = std::getenv(config_.api_key_env.c_str()))
            headers.emplace("Authorization", std::string("Bearer ") + key);

        auto result = client.Post(config_.path, headers, request_json, "application/json");
        if (!result)
            throw Error(ErrorCode::CLIENT_ERROR,
                        "request failed: " + httplib::to_string(result.error()));
        if (result->status < 200 || result->status >= 300)
            throw Error(ErrorCode::CLIENT_ERROR, "http status " + std::to_string(result->status));
        return result->body;
    }

  private:
    void throttle() {
        if (config_.min_request_interval_s <= 0.0) return;
        const auto now = std::chrono::steady_clock::now();
        const auto interval = std::chrono::duration<double>(config_.min_request_interval_s);
        if (now - last_ < interval)
            std::this_thread::sleep_for(interval - (now - last_));
        last_ = std::chrono::steady_clock::now();
    }

    ClientConfig config_;
    std::chrono::steady_clock::time_point last_{};
};

}  // namespace

std::unique_ptr<ChatTransport> make_http_transport(const ClientConfig& config) {
    return std::make_unique<HttpChatTransport>(config);
}

}  // namespace sws::llm

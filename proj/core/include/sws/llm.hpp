#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sws/pool.hpp"
#include "sws/sentence.hpp"

namespace sws::llm {

// Prompt templates sent verbatim; [s] is replaced by the sentence text.
inline constexpr std::string_view kPromptWithoutRanking =
    "In the following sentence, please give some suggestions to improve word usage. Please give "
    "the results with the JSON format of {“original word”: [“suggestion 1”, "
    "“suggestion 2”]}. The 'original word' should include all words that can be "
    "improved in the sentence, directly extracted from the sentence itself. [s]";

inline constexpr std::string_view kPromptWithRanking =
    "In the following sentence, please give some suggestions to improve word usage. Please give "
    "the results with the JSON format of {“original word”: [“suggestion 1”, "
    "“suggestion 2”]}. The 'original word' should include all words that can be "
    "improved in the sentence, directly extracted from the sentence itself, and the suggestions "
    "should be ranked in order of the degree of improvement, from the most effective to the "
    "least. [s]";

std::string build_prompt(const Sentence& sentence, bool ranked);

struct ClientConfig {
    std::string endpoint;  // e.g. http://localhost:8080
    std::string path = "/v1/chat/completions";
    std::string model;
    double temperature = 0.0;
    std::size_t max_retries = 5;     // total request attempts per sentence
    std::size_t max_concurrent = 4;  // bound on in-flight requests
    double min_request_interval_s = 0.0;
    std::string api_key_env = "SWS_LLM_API_KEY";  // value read at send time, never logged
};

// Transport seam: production uses HTTP, tests inject stubs and faults.
class ChatTransport {
  public:
    virtual ~ChatTransport() = default;
    // takes the request body, returns the raw response body
    virtual std::string complete(const std::string& request_json) = 0;
};

std::unique_ptr<ChatTransport> make_http_transport(const ClientConfig& config);

struct AuditRecord {
    std::string request;
    std::string response;
};

struct SuggestionMap {
    // response order preserved; suggestions keep their ranked order
    std::vector<std::pair<std::string, std::vector<std::string>>> entries;
    std::size_t retry_count = 0;
    std::vector<std::string> dropped_words;  // returned words not present in the sentence
};

// Sends the prompt, parses the JSON object from the reply (with repair), and
// retries malformed responses up to config.max_retries total attempts.
// Entries whose word is not a token of the sentence are dropped and recorded.
SuggestionMap prompt_suggestions(const Sentence& sentence, bool ranked,
                                 const ClientConfig& config, ChatTransport& transport,
                                 std::vector<AuditRecord>* audit = nullptr);

struct LlmSuggestion {
    TokenSite site;
    SubstitutionDecision decision;
    CandidatePool pool;
};

// One entry becomes a REPLACE at the first matching token position with the
// first suggestion; the pool carries all suggestions with 1/rank
// pseudo-probabilities (renormalized). Every other token is KEEP.
std::vector<LlmSuggestion> to_decisions(const SuggestionMap& map, const Sentence& sentence);

// Extracts and parses the first JSON object found in free-form model output;
// repairs fenced blocks, curly quotes and trailing commas. Null on failure.
std::optional<std::string> extract_json_object(const std::string& content);

void write_audit_log(std::ostream& os, std::span<const AuditRecord> records);

}  // namespace sws::llm

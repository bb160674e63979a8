#include <doctest.h>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "sws/error.hpp"
#include "sws/llm.hpp"
#include "sws/scorer.hpp"

using namespace sws;
using namespace sws::llm;

namespace {

std::string read_golden(const char* name) {
    std::ifstream is(std::string(SWS_GOLDEN_DIR) + "/" + name, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// scripted transport: returns queued responses in order, counts calls
class StubTransport final : public ChatTransport {
  public:
    explicit StubTransport(std::vector<std::string> responses)
        : responses_(std::move(responses)) {}

    std::string complete(const std::string&) override {
        ++calls_;
        if (next_ >= responses_.size()) throw std::runtime_error("stub exhausted");
        return responses_[next_++];
    }

    std::size_t calls() const { return calls_; }

  private:
    std::vector<std::string> responses_;
    std::size_t next_ = 0;
    std::size_t calls_ = 0;
};

std::string chat_body(const std::string& content) {
    nlohmann::json body{
        {"choices",
         nlohmann::json::array(
             {nlohmann::json{{"message", nlohmann::json{{"role", "assistant"},
                                                        {"content", content}}}}})}};
    return body.dump();
}

ClientConfig config_with_retries(std::size_t retries) {
    ClientConfig config;
    config.endpoint = "http://stub";
    config.model = "stub-model";
    config.max_retries = retries;
    return config;
}

}  // namespace

TEST_CASE("prompt templates are byte-identical to the golden files") {
    CHECK(std::string(kPromptWithoutRanking) == read_golden("prompt_without_ranking.txt"));
    CHECK(std::string(kPromptWithRanking) == read_golden("prompt_with_ranking.txt"));
    CHECK(std::string(kGptScoreParaphraseTemplate) ==
          read_golden("gptscore_paraphrase_template.txt"));
}

TEST_CASE("build_prompt substitutes the sentence for [s]") {
    const auto sentence = tokenize("The critical role of law");
    const auto prompt = build_prompt(sentence, false);
    CHECK(prompt.find("[s]") == std::string::npos);
    CHECK(prompt.find("The critical role of law") != std::string::npos);
    const auto ranked = build_prompt(sentence, true);
    CHECK(ranked.find("ranked in order of the degree of improvement") != std::string::npos);
}

TEST_CASE("valid response parses into ordered suggestions") {
    const auto sentence = tokenize("the critical role of law");
    StubTransport transport({chat_body(R"({"critical": ["crucial", "vital"]})")});
    const auto result =
        prompt_suggestions(sentence, false, config_with_retries(3), transport);
    REQUIRE(result.entries.size() == 1);
    CHECK(result.entries[0].first == "critical");
    CHECK(result.entries[0].second == std::vector<std::string>{"crucial", "vital"});
    CHECK(result.retry_count == 0);
    CHECK(transport.calls() == 1);
}

TEST_CASE("words not present in the sentence are dropped") {
    const auto sentence = tokenize("the critical role of law");
    StubTransport transport(
        {chat_body(R"({"critical": ["crucial"], "banana": ["plantain"]})")});
    const auto result =
        prompt_suggestions(sentence, false, config_with_retries(3), transport);
    REQUIRE(result.entries.size() == 1);
    CHECK(result.entries[0].first == "critical");
    CHECK(result.dropped_words == std::vector<std::string>{"banana"});
}

TEST_CASE("two malformed responses then a valid one") {
    const auto sentence = tokenize("the critical role of law");
    StubTransport transport({chat_body("no json here at all"),
                             chat_body("{\"critical\": [broken"),
                             chat_body(R"({"critical": ["crucial"]})")});
    std::vector<AuditRecord> audit;
    const auto result =
        prompt_suggestions(sentence, false, config_with_retries(3), transport, &audit);
    CHECK(result.retry_count == 2);
    CHECK(transport.calls() == 3);
    CHECK(audit.size() == 3);  // every request/response archived
}

TEST_CASE("exceeding max retries raises MALFORMED_RESPONSE with bounded calls") {
    const auto sentence = tokenize("the critical role of law");
    StubTransport transport({chat_body("junk"), chat_body("junk"), chat_body("junk"),
                             chat_body("junk"), chat_body("junk")});
    try {
        prompt_suggestions(sentence, false, config_with_retries(3), transport);
        FAIL("expected MALFORMED_RESPONSE");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MALFORMED_RESPONSE);
    }
    CHECK(transport.calls() == 3);  // total external calls never exceed max_retries
}

TEST_CASE("transport failures surface as CLIENT_ERROR") {
    class FailingTransport final : public ChatTransport {
      public:
        std::string complete(const std::string&) override {
            throw std::runtime_error("connection refused");
        }
    };
    const auto sentence = tokenize("the critical role of law");
    FailingTransport transport;
    try {
        prompt_suggestions(sentence, false, config_with_retries(3), transport);
        FAIL("expected CLIENT_ERROR");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CLIENT_ERROR);
    }
}

TEST_CASE("json repair handles fences, smart quotes and trailing commas") {
    CHECK(extract_json_object("```json\n{\"a\": [\"b\"]}\n```").has_value());
    CHECK(extract_json_object("Sure! Here you go: {“critical”: [“crucial”]}")
              .has_value());
    CHECK(extract_json_object(R"({"a": ["b",]})").has_value());
    CHECK_FALSE(extract_json_object("no braces at all").has_value());
    CHECK_FALSE(extract_json_object("{never closed").has_value());
}

TEST_CASE("to_decisions: empty map keeps every token") {
    const auto sentence = tokenize("the critical role");
    SuggestionMap empty;
    const auto decisions = to_decisions(empty, sentence);
    REQUIRE(decisions.size() == 3);
    for (const auto& d : decisions) {
        CHECK(d.decision.action == Action::KEEP);
        CHECK(d.pool.candidates.empty());
    }
}

TEST_CASE("to_decisions: one entry becomes a ranked pool and a replacement") {
    const auto sentence = tokenize("the critical role");
    SuggestionMap map;
    map.entries.emplace_back("critical",
                             std::vector<std::string>{"crucial", "vital", "key"});
    const auto decisions = to_decisions(map, sentence);
    const auto& d = decisions[1];
    CHECK(d.decision.action == Action::REPLACE);
    CHECK(*d.decision.replacement == "crucial");
    REQUIRE(d.pool.size() == 3);
    // 1/rank pseudo-probabilities renormalized: 6/11, 3/11, 2/11
    CHECK(d.pool.probabilities[0] == doctest::Approx(6.0 / 11.0).epsilon(1e-12));
    CHECK(d.pool.probabilities[1] == doctest::Approx(3.0 / 11.0).epsilon(1e-12));
    CHECK(d.pool.probabilities[2] == doctest::Approx(2.0 / 11.0).epsilon(1e-12));
    // descending by rank; logits follow the same order
    CHECK(std::is_sorted(d.pool.probabilities.rbegin(), d.pool.probabilities.rend()));
    CHECK(d.decision.chosen_probability > d.decision.original_probability);
}

TEST_CASE("to_decisions: repeated words attach to the first occurrence only") {
    const auto sentence = tokenize("good plans make good outcomes");
    SuggestionMap map;
    map.entries.emplace_back("good", std::vector<std::string>{"great"});
    const auto decisions = to_decisions(map, sentence);
    CHECK(decisions[0].decision.action == Action::REPLACE);
    CHECK(decisions[3].decision.action == Action::KEEP);
}

TEST_CASE("audit log serializes request and response pairs") {
    std::vector<AuditRecord> audit{{"req-1", "resp-1"}, {"req-2", "resp-2"}};
    std::ostringstream os;
    write_audit_log(os, audit);
    const auto text = os.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.find("req-2") != std::string::npos);
}

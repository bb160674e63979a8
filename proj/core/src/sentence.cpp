#include "sws/sentence.hpp"

#include <algorithm>
#include <cctype>

#include "sws/error.hpp"

namespace sws {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EMPTY_TEXT: return "EMPTY_TEXT";
        case ErrorCode::BAD_SITE: return "BAD_SITE";
        case ErrorCode::BACKEND_FAILURE: return "BACKEND_FAILURE";
        case ErrorCode::LENGTH_OVERFLOW: return "LENGTH_OVERFLOW";
        case ErrorCode::CACHE_IO: return "CACHE_IO";
        case ErrorCode::EMPTY_REFERENCE: return "EMPTY_REFERENCE";
        case ErrorCode::EMPTY_INPUT: return "EMPTY_INPUT";
        case ErrorCode::LENGTH_MISMATCH: return "LENGTH_MISMATCH";
        case ErrorCode::CONSTANT_INPUT: return "CONSTANT_INPUT";
        case ErrorCode::UNSORTED_BATCH: return "UNSORTED_BATCH";
        case ErrorCode::MISSING_REFERENCE: return "MISSING_REFERENCE";
        case ErrorCode::INDEX_OUT_OF_RANGE: return "INDEX_OUT_OF_RANGE";
        case ErrorCode::NO_ELIGIBLE_SITES: return "NO_ELIGIBLE_SITES";
        case ErrorCode::MODEL_FAILURE: return "MODEL_FAILURE";
        case ErrorCode::VOCAB_EXHAUSTED: return "VOCAB_EXHAUSTED";
        case ErrorCode::COPY_FAILURE: return "COPY_FAILURE";
        case ErrorCode::DIVERGENCE: return "DIVERGENCE";
        case ErrorCode::MISSING_ORIGINAL_PROB: return "MISSING_ORIGINAL_PROB";
        case ErrorCode::ZERO_VECTOR: return "ZERO_VECTOR";
        case ErrorCode::ZERO_ORIGINAL_SCORE: return "ZERO_ORIGINAL_SCORE";
        case ErrorCode::PARSE_ERROR: return "PARSE_ERROR";
        case ErrorCode::UNKNOWN_FORMAT: return "UNKNOWN_FORMAT";
        case ErrorCode::MALFORMED_RESPONSE: return "MALFORMED_RESPONSE";
        case ErrorCode::CLIENT_ERROR: return "CLIENT_ERROR";
        case ErrorCode::CONFIG_INVALID: return "CONFIG_INVALID";
        case ErrorCode::IO_ERROR: return "IO_ERROR";
    }
    return "UNKNOWN";
}

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

// Apostrophes and hyphens join a token only when flanked by word characters.
bool is_joiner(const std::string& text, std::size_t i) {
    char c = text[i];
    if (c != '\'' && c != '-') return false;
    if (i == 0 || i + 1 >= text.size()) return false;
    return is_word_char(static_cast<unsigned char>(text[i - 1])) &&
           is_word_char(static_cast<unsigned char>(text[i + 1]));
}

}  // namespace

Sentence tokenize(const std::string& text) {
    Sentence out;
    out.text = text;

    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (is_word_char(c)) {
            while (i < n && (is_word_char(static_cast<unsigned char>(text[i])) || is_joiner(text, i))) ++i;
        } else {
            ++i;  // single-character punctuation token
        }
        out.tokens.push_back(text.substr(start, i - start));
        out.token_spans.emplace_back(start, i);
    }

    if (out.tokens.empty()) throw Error(ErrorCode::EMPTY_TEXT, "input is empty or all whitespace");
    return out;
}

TokenSite make_site(const Sentence& sentence, std::size_t position) {
    if (position >= sentence.tokens.size())
        throw Error(ErrorCode::BAD_SITE, "token position " + std::to_string(position) +
                                             " out of range for sentence of " +
                                             std::to_string(sentence.tokens.size()) + " tokens");
    return TokenSite{&sentence, position, sentence.tokens[position]};
}

Sentence apply_substitution(const Sentence& sentence, const TokenSite& site,
                            const std::string& candidate) {
    if (site.position >= sentence.tokens.size())
        throw Error(ErrorCode::BAD_SITE, "substitution position out of range");

    const auto [begin, end] = sentence.token_spans[site.position];

    Sentence out;
    out.text = sentence.text.substr(0, begin) + candidate + sentence.text.substr(end);
    out.tokens = sentence.tokens;
    out.tokens[site.position] = candidate;

    const auto old_len = end - begin;
    const auto delta = static_cast<std::ptrdiff_t>(candidate.size()) -
                       static_cast<std::ptrdiff_t>(old_len);
    out.token_spans = sentence.token_spans;
    out.token_spans[site.position] = {begin, begin + candidate.size()};
    for (std::size_t i = site.position + 1; i < out.token_spans.size(); ++i) {
        out.token_spans[i].first = static_cast<std::size_t>(
            static_cast<std::ptrdiff_t>(out.token_spans[i].first) + delta);
        out.token_spans[i].second = static_cast<std::size_t>(
            static_cast<std::ptrdiff_t>(out.token_spans[i].second) + delta);
    }
    return out;
}

bool is_alphabetic_word(const std::string& token) {
    if (token.empty()) return false;
    return std::all_of(token.begin(), token.end(),
                       [](unsigned char c) { return std::isalpha(c) != 0; });
}

bool is_wordlike_token(const std::string& token) {
    if (token.empty()) return false;
    bool has_alpha = false;
    for (std::size_t i = 0; i < token.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(token[i]);
        if (std::isalpha(c)) {
            has_alpha = true;
        } else if ((token[i] == '\'' || token[i] == '-') && i > 0 && i + 1 < token.size()) {
            continue;
        } else {
            return false;
        }
    }
    return has_alpha;
}

std::string ascii_lower(std::string token) {
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return token;
}

std::string match_capitalization(const std::string& original, std::string replacement) {
    if (original.empty() || replacement.empty()) return replacement;
    if (std::isupper(static_cast<unsigned char>(original[0])))
        replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
    return replacement;
}

}  // namespace sws

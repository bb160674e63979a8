#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace sws {

// A tokenized sentence. Tokens are whole-word units; each token has a
// character span into `text`, so substitutions can be spliced back without
// disturbing the surrounding whitespace.
struct Sentence {
    std::string text;
    std::vector<std::string> tokens;
    std::vector<std::pair<std::size_t, std::size_t>> token_spans;  // [begin, end)

    std::size_t size() const { return tokens.size(); }
};

// A token position inside a sentence.
struct TokenSite {
    const Sentence* sentence = nullptr;
    std::size_t position = 0;
    std::string original_token;
};

// Splits on whitespace and punctuation boundaries. A token is a maximal run
// of alphanumeric characters, allowing interior apostrophes and hyphens
// ("don't", "state-of-the-art"); any other printable character becomes a
// one-character token. Throws EMPTY_TEXT when the input is all whitespace.
Sentence tokenize(const std::string& text);

TokenSite make_site(const Sentence& sentence, std::size_t position);

// Returns a sentence identical to `sentence` except that the token at
// `site.position` is replaced by `candidate`; the candidate is spliced into
// the original character span, so all other bytes are preserved exactly.
Sentence apply_substitution(const Sentence& sentence, const TokenSite& site,
                            const std::string& candidate);

// Word classification helpers shared by the sampling and pool filters.
bool is_alphabetic_word(const std::string& token);
bool is_wordlike_token(const std::string& token);  // letters with interior '/-
std::string ascii_lower(std::string token);

// Copies the leading-capital pattern of `original` onto `replacement`
// ("The"+"dog" -> "Dog", "the"+"dog" -> "dog").
std::string match_capitalization(const std::string& original, std::string replacement);

}  // namespace sws

#include "sws/models/vocab.hpp"

#include <algorithm>
#include <map>

#include "sws/error.hpp"
#include "sws/models/nn.hpp"

namespace sws::models {

Vocab::Vocab() {
    for (const char* s : {"<pad>", "<unk>", "<mask>", "<bos>", "<eos>"}) add(s);
}

void Vocab::add(const std::string& word) {
    index_.emplace(word, static_cast<int>(words_.size()));
    words_.push_back(word);
}

Vocab Vocab::build(std::span<const std::string> texts, std::size_t min_count) {
    // Deterministic order: by descending count, then lexicographic.
    std::map<std::string, std::size_t> counts;
    for (const auto& text : texts) {
        const auto sentence = tokenize(text);
        for (const auto& tok : sentence.tokens) ++counts[ascii_lower(tok)];
    }
    std::vector<std::pair<std::string, std::size_t>> entries(counts.begin(), counts.end());
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocab v;
    for (const auto& [word, count] : entries)
        if (count >= min_count) v.add(word);
    return v;
}

int Vocab::id(const std::string& token) const {
    auto it = index_.find(ascii_lower(token));
    return it == index_.end() ? kUnk : it->second;
}

bool Vocab::contains(const std::string& token) const {
    return index_.count(ascii_lower(token)) > 0;
}

const std::string& Vocab::word(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= words_.size())
        throw Error(ErrorCode::INDEX_OUT_OF_RANGE, "vocab id out of range");
    return words_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocab::ids(const Sentence& sentence) const {
    std::vector<int> out;
    out.reserve(sentence.tokens.size());
    for (const auto& tok : sentence.tokens) out.push_back(id(tok));
    return out;
}

void Vocab::save(std::ostream& os) const {
    write_u64(os, words_.size());
    for (const auto& w : words_) write_string(os, w);
}

Vocab Vocab::load(std::istream& is) {
    const auto n = read_u64(is);
    Vocab v;
    if (n < kNumSpecial) throw Error(ErrorCode::PARSE_ERROR, "vocab missing special tokens");
    for (std::size_t i = 0; i < kNumSpecial; ++i) read_string(is);  // fixed specials
    for (std::size_t i = kNumSpecial; i < n; ++i) v.add(read_string(is));
    return v;
}

}  // namespace sws::models

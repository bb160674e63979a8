#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sws/sentence.hpp"

namespace sws::models {

// Whole-word vocabulary shared by the tiny model backends. Entries are
// lowercased surface forms; the first five ids are reserved specials.
class Vocab {
  public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kMask = 2;
    static constexpr int kBos = 3;
    static constexpr int kEos = 4;
    static constexpr int kNumSpecial = 5;

    Vocab();

    static Vocab build(std::span<const std::string> texts, std::size_t min_count = 1);

    int id(const std::string& token) const;  // lowercases; kUnk when absent
    const std::string& word(int id) const;
    std::size_t size() const { return words_.size(); }
    bool is_special(int id) const { return id >= 0 && id < kNumSpecial; }
    bool contains(const std::string& token) const;

    std::vector<int> ids(const Sentence& sentence) const;

    void save(std::ostream& os) const;
    static Vocab load(std::istream& is);

  private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, int> index_;

    void add(const std::string& word);
};

}  // namespace sws::models

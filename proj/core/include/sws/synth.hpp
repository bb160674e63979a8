#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sws/data.hpp"

namespace sws::synth {

// Template-grammar corpus for self-contained experiments: sentences are
// drawn from slot templates whose slots carry synonym families. Paraphrase
// pairs swap slot words according to a second, deliberately different
// preference table, so a scorer trained on the pairs ranks substitutes
// differently from the corpus frequencies a masked model absorbs.
struct SynthOptions {
    std::size_t n_sentences = 300;
    std::uint64_t seed = 20240901;
    std::size_t pairs_per_sentence = 4;
    double swap_probability = 0.6;
};

struct SynthCorpus {
    std::vector<std::string> sentences;
    std::vector<std::pair<std::string, std::string>> paraphrase_pairs;
};

SynthCorpus generate(const SynthOptions& options);

// Wraps sentences as canonical dataset records (ids syn-0000, syn-0001, ...).
std::vector<data::DatasetRecord> as_records(const std::vector<std::string>& sentences,
                                            const std::string& id_prefix = "syn");

}  // namespace sws::synth

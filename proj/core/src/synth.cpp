#include "sws/synth.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

#include "sws/models/nn.hpp"
#include "sws/sentence.hpp"

namespace sws::synth {

namespace {

struct Family {
    std::string slot;
    std::vector<std::string> members;       // corpus preference order (Zipf weights)
    std::vector<std::string> swap_members;  // paraphrase preference order
};

std::vector<std::string> permuted(const std::vector<std::string>& members, std::uint64_t salt) {
    // reverse then rotate: guaranteed to disagree with the corpus order
    std::vector<std::string> out(members.rbegin(), members.rend());
    const std::size_t shift = salt % out.size();
    std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(shift), out.end());
    return out;
}

std::vector<Family> make_families() {
    std::vector<Family> families = {
        {"{quality}",
         {"good", "great", "fine", "excellent", "decent", "solid", "strong", "notable"},
         {}},
        {"{size}", {"big", "large", "huge", "vast", "sizable", "immense"}, {}},
        {"{speak}", {"said", "stated", "claimed", "argued", "noted", "declared", "insisted"}, {}},
        {"{move}", {"walked", "moved", "strolled", "marched", "wandered", "hurried"}, {}},
        {"{person}",
         {"teacher", "student", "doctor", "writer", "farmer", "lawyer", "artist", "worker"},
         {}},
        {"{object}", {"report", "letter", "book", "paper", "article", "essay", "plan"}, {}},
        {"{place}", {"city", "town", "village", "region", "district", "valley"}, {}},
        {"{degree}", {"very", "quite", "rather", "fairly", "extremely", "notably"}, {}},
        {"{time}", {"today", "yesterday", "recently", "earlier", "lately"}, {}},
    };
    for (auto& f : families) f.swap_members = permuted(f.members, models::fnv1a(f.slot));
    return families;
}

const std::vector<std::string>& templates() {
    static const std::vector<std::string> kTemplates = {
        "the {person} {speak} that the {object} was {quality}",
        "a {person} {move} to the {place} {time}",
        "the {object} was {degree} {quality}",
        "this {person} wrote a {quality} {object} in the {place}",
        "the {person} from the {place} {speak} that the {object} was {quality}",
        "{time} the {person} {move} into the {place}",
        "every {person} in the {place} {speak} that the {object} was {degree} {quality}",
        "the {size} {place} had a {quality} {object}",
        "one {person} {speak} that a {size} {object} was {degree} {quality}",
        "the {person} {move} across the {place} and {speak} nothing",
        "that {object} by the {person} was {degree} {quality}",
        "a {size} {object} from the {place} was {quality}",
    };
    return kTemplates;
}

// Zipf-weighted draw over the given order.
const std::string& draw(const std::vector<std::string>& members, models::Rng& rng) {
    double total = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) total += 1.0 / static_cast<double>(i + 1);
    double x = rng.next_double() * total;
    for (std::size_t i = 0; i < members.size(); ++i) {
        x -= 1.0 / static_cast<double>(i + 1);
        if (x <= 0.0) return members[i];
    }
    return members.back();
}

std::string finish_sentence(std::string body) {
    if (!body.empty()) body[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(body[0])));
    return body + ".";
}

}  // namespace

SynthCorpus generate(const SynthOptions& options) {
    const auto families = make_families();
    std::map<std::string, const Family*> by_slot;
    std::map<std::string, const Family*> by_member;
    for (const auto& f : families) {
        by_slot[f.slot] = &f;
        for (const auto& m : f.members) by_member[m] = &f;
    }

    models::Rng rng(models::mix_seed(options.seed, 0x73796eULL));
    SynthCorpus out;
    out.sentences.reserve(options.n_sentences);

    for (std::size_t i = 0; i < options.n_sentences; ++i) {
        const auto& tpl = templates()[rng.uniform_below(templates().size())];
        std::istringstream words(tpl);
        std::string word, body;
        while (words >> word) {
            auto it = by_slot.find(word);
            const std::string& token = it != by_slot.end() ? draw(it->second->members, rng) : word;
            if (!body.empty()) body += ' ';
            body += token;
        }
        out.sentences.push_back(finish_sentence(body));
    }

    for (const auto& sentence_text : out.sentences) {
        for (std::size_t j = 0; j < options.pairs_per_sentence; ++j) {
            const auto sentence = tokenize(sentence_text);
            std::string body;
            for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
                std::string token = sentence.tokens[t];
                auto it = by_member.find(ascii_lower(token));
                if (it != by_member.end() && rng.next_double() < options.swap_probability) {
                    std::string swapped = draw(it->second->swap_members, rng);
                    token = match_capitalization(token, std::move(swapped));
                }
                if (t > 0 && is_wordlike_token(sentence.tokens[t])) body += ' ';
                body += token;
            }
            out.paraphrase_pairs.emplace_back(sentence_text, body);
        }
    }
    return out;
}

std::vector<data::DatasetRecord> as_records(const std::vector<std::string>& sentences,
                                            const std::string& id_prefix) {
    std::vector<data::DatasetRecord> out;
    out.reserve(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        data::DatasetRecord r;
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04zu", i);
        r.sentence_id = id_prefix + "-" + buf;
        r.sentence = tokenize(sentences[i]);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace sws::synth

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "sws/sentence.hpp"

namespace sws::data {

struct Annotation {
    std::size_t target_position = 0;
    std::set<std::string> suggestions;  // never contains the original token
};

struct DatasetRecord {
    std::string sentence_id;
    Sentence sentence;
    std::vector<Annotation> annotations;  // empty for unannotated corpora
};

enum class DatasetFormat { SWS, LS07, LS14, XSUM };

DatasetFormat parse_format(std::string_view name);  // UNKNOWN_FORMAT on bad name
std::string_view to_string(DatasetFormat format);

// Streaming loader; `sink` is called once per record in file order.
// Formats:
//   SWS        canonical JSON lines
//              {"id":…, "text":…, "annotations":[{"pos":…, "suggestions":[…]}]}
//   LS07/LS14  lexical-substitution TSV: id, target position, sentence text,
//              semicolon-joined lemmatized gold substitutes (kept verbatim)
//   XSUM       JSON lines {"id":…, "document":…}; the document is split into
//              sentences, each yielding one record with no annotations
void for_each_record(const std::filesystem::path& path, DatasetFormat format,
                     const std::function<void(DatasetRecord)>& sink);

std::vector<DatasetRecord> load(const std::filesystem::path& path, DatasetFormat format);

// Uniform sample without replacement, clamped to the corpus size;
// deterministic per seed.
std::vector<DatasetRecord> sample_corpus(const std::vector<DatasetRecord>& records, std::size_t n,
                                         std::uint64_t seed);

// Writes records in the canonical JSON-lines schema.
void write_canonical(std::ostream& os, const std::vector<DatasetRecord>& records);

// Splits a document into sentences on ./!/? boundaries followed by space.
std::vector<std::string> split_sentences(const std::string& document);

}  // namespace sws::data

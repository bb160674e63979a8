#include "sws/data.hpp"

#include <cctype>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "sws/error.hpp"
#include "sws/models/nn.hpp"

namespace sws::data {

using nlohmann::json;

DatasetFormat parse_format(std::string_view name) {
    std::string lower(name);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "sws") return DatasetFormat::SWS;
    if (lower == "ls07") return DatasetFormat::LS07;
    if (lower == "ls14") return DatasetFormat::LS14;
    if (lower == "xsum") return DatasetFormat::XSUM;
    throw Error(ErrorCode::UNKNOWN_FORMAT, "unknown dataset format '" + std::string(name) + "'");
}

std::string_view to_string(DatasetFormat format) {
    switch (format) {
        case DatasetFormat::SWS: return "sws";
        case DatasetFormat::LS07: return "ls07";
        case DatasetFormat::LS14: return "ls14";
        case DatasetFormat::XSUM: return "xsum";
    }
    return "?";
}

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t lineno,
                             const std::string& what) {
    throw Error(ErrorCode::PARSE_ERROR,
                path.string() + ":" + std::to_string(lineno) + ": " + what);
}

Annotation make_annotation(const Sentence& sentence, std::size_t pos,
                           const std::vector<std::string>& suggestions,
                           const std::filesystem::path& path, std::size_t lineno) {
    if (pos >= sentence.tokens.size())
        parse_fail(path, lineno,
                   "target position " + std::to_string(pos) + " out of range (sentence has " +
                       std::to_string(sentence.tokens.size()) + " tokens)");
    Annotation a;
    a.target_position = pos;
    const std::string original = ascii_lower(sentence.tokens[pos]);
    for (const auto& s : suggestions) {
        if (s.empty()) continue;
        if (ascii_lower(s) == original) continue;  // suggestions exclude the original token
        a.suggestions.insert(s);
    }
    return a;
}

void load_canonical(const std::filesystem::path& path,
                    const std::function<void(DatasetRecord)>& sink) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::IO_ERROR, "cannot read " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded()) parse_fail(path, lineno, "invalid JSON");
        if (!rec.contains("id") || !rec.contains("text"))
            parse_fail(path, lineno, "record needs 'id' and 'text'");

        DatasetRecord out;
        out.sentence_id = rec["id"].get<std::string>();
        try {
            out.sentence = tokenize(rec["text"].get<std::string>());
        } catch (const Error&) {
            parse_fail(path, lineno, "record '" + out.sentence_id + "' has empty text");
        }
        if (rec.contains("annotations")) {
            for (const auto& a : rec["annotations"]) {
                if (!a.contains("pos")) parse_fail(path, lineno, "annotation needs 'pos'");
                std::vector<std::string> suggestions;
                if (a.contains("suggestions"))
                    for (const auto& s : a["suggestions"]) suggestions.push_back(s.get<std::string>());
                out.annotations.push_back(make_annotation(
                    out.sentence, a["pos"].get<std::size_t>(), suggestions, path, lineno));
            }
        }
        sink(std::move(out));
    }
}

void load_lexsub(const std::filesystem::path& path,
                 const std::function<void(DatasetRecord)>& sink) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::IO_ERROR, "cannot read " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;

        std::vector<std::string> cols;
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            cols.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (cols.size() != 4) parse_fail(path, lineno, "expected 4 tab-separated fields");

        DatasetRecord out;
        out.sentence_id = cols[0];
        std::size_t pos = 0;
        try {
            pos = static_cast<std::size_t>(std::stoul(cols[1]));
        } catch (const std::exception&) {
            parse_fail(path, lineno, "bad target position '" + cols[1] + "'");
        }
        try {
            out.sentence = tokenize(cols[2]);
        } catch (const Error&) {
            parse_fail(path, lineno, "empty sentence text");
        }

        std::vector<std::string> gold;
        std::stringstream ss(cols[3]);
        std::string item;
        while (std::getline(ss, item, ';')) {
            // trim surrounding spaces, keep the lemma verbatim otherwise
            const auto b = item.find_first_not_of(' ');
            const auto e = item.find_last_not_of(' ');
            if (b != std::string::npos) gold.push_back(item.substr(b, e - b + 1));
        }
        out.annotations.push_back(make_annotation(out.sentence, pos, gold, path, lineno));
        sink(std::move(out));
    }
}

void load_xsum(const std::filesystem::path& path,
               const std::function<void(DatasetRecord)>& sink) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::IO_ERROR, "cannot read " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded()) parse_fail(path, lineno, "invalid JSON");
        if (!rec.contains("id") || !rec.contains("document"))
            parse_fail(path, lineno, "record needs 'id' and 'document'");

        const auto id = rec["id"].get<std::string>();
        const auto sentences = split_sentences(rec["document"].get<std::string>());
        std::size_t k = 0;
        for (const auto& text : sentences) {
            DatasetRecord out;
            out.sentence_id = id + "#" + std::to_string(k++);
            out.sentence = tokenize(text);
            sink(std::move(out));
        }
    }
}

}  // namespace

std::vector<std::string> split_sentences(const std::string& document) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < document.size(); ++i) {
        const char c = document[i];
        const bool boundary = (c == '.' || c == '!' || c == '?') &&
                              (i + 1 >= document.size() ||
                               std::isspace(static_cast<unsigned char>(document[i + 1])));
        if (!boundary && c != '\n') continue;
        const std::size_t end = (c == '\n') ? i : i + 1;
        std::string piece = document.substr(start, end - start);
        const auto b = piece.find_first_not_of(" \t\r\n");
        if (b != std::string::npos) {
            const auto e = piece.find_last_not_of(" \t\r\n");
            out.push_back(piece.substr(b, e - b + 1));
        }
        start = end;
    }
    if (start < document.size()) {
        std::string piece = document.substr(start);
        const auto b = piece.find_first_not_of(" \t\r\n");
        if (b != std::string::npos) {
            const auto e = piece.find_last_not_of(" \t\r\n");
            out.push_back(piece.substr(b, e - b + 1));
        }
    }
    return out;
}

void for_each_record(const std::filesystem::path& path, DatasetFormat format,
                     const std::function<void(DatasetRecord)>& sink) {
    switch (format) {
        case DatasetFormat::SWS: load_canonical(path, sink); return;
        case DatasetFormat::LS07:
        case DatasetFormat::LS14: load_lexsub(path, sink); return;
        case DatasetFormat::XSUM: load_xsum(path, sink); return;
    }
    throw Error(ErrorCode::UNKNOWN_FORMAT, "unhandled dataset format");
}

std::vector<DatasetRecord> load(const std::filesystem::path& path, DatasetFormat format) {
    std::vector<DatasetRecord> out;
    for_each_record(path, format, [&out](DatasetRecord r) { out.push_back(std::move(r)); });
    return out;
}

std::vector<DatasetRecord> sample_corpus(const std::vector<DatasetRecord>& records, std::size_t n,
                                         std::uint64_t seed) {
    std::vector<std::size_t> idx(records.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

    models::Rng rng(models::mix_seed(seed, 0x636f7270ULL));
    const std::size_t take = std::min(n, records.size());
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.uniform_below(idx.size() - i);
        std::swap(idx[i], idx[j]);
    }

    std::vector<DatasetRecord> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(records[idx[i]]);
    return out;
}

void write_canonical(std::ostream& os, const std::vector<DatasetRecord>& records) {
    for (const auto& r : records) {
        json annotations = json::array();
        for (const auto& a : r.annotations) {
            json suggestions = json::array();
            for (const auto& s : a.suggestions) suggestions.push_back(s);
            annotations.push_back({{"pos", a.target_position}, {"suggestions", suggestions}});
        }
        json rec{{"id", r.sentence_id}, {"text", r.sentence.text}, {"annotations", annotations}};
        os << rec.dump() << '\n';
    }
}

}  // namespace sws::data

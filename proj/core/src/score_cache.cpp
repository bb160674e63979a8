#include "sws/score_cache.hpp"

#include <nlohmann/json.hpp>

#include "sws/error.hpp"

namespace sws {

using nlohmann::json;

std::string ScoreCache::key_of(const std::string& scorer_id, const std::string& src,
                               const std::string& tgt) {
    std::string key;
    key.reserve(scorer_id.size() + src.size() + tgt.size() + 24);
    for (const std::string* part : {&scorer_id, &src, &tgt}) {
        key += std::to_string(part->size());
        key += ':';
        key += *part;
    }
    return key;
}

ScoreCache::ScoreCache(std::filesystem::path file) : path_(std::move(file)) {
    if (std::filesystem::exists(path_)) {
        std::ifstream is(path_);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty()) continue;
            json rec = json::parse(line, nullptr, false);
            if (rec.is_discarded() || !rec.contains("scorer") || !rec.contains("src") ||
                !rec.contains("tgt") || !rec.contains("score"))
                throw Error(ErrorCode::CACHE_IO,
                            "malformed cache record at " + path_.string() + ":" +
                                std::to_string(lineno));
            map_[key_of(rec["scorer"].get<std::string>(), rec["src"].get<std::string>(),
                        rec["tgt"].get<std::string>())] = rec["score"].get<double>();
        }
    }
    appender_.open(path_, std::ios::app);
    if (!appender_) io_degraded_ = true;
}

std::optional<double> ScoreCache::lookup(const std::string& scorer_id, const std::string& src,
                                         const std::string& tgt) const {
    std::shared_lock lock(mutex_);
    auto it = map_.find(key_of(scorer_id, src, tgt));
    if (it == map_.end()) {
        ++misses_;
        return std::nullopt;
    }
    ++hits_;
    return it->second;
}

void ScoreCache::store(const std::string& scorer_id, const std::string& src,
                       const std::string& tgt, double score) {
    std::unique_lock lock(mutex_);
    map_[key_of(scorer_id, src, tgt)] = score;
    if (path_.empty() || io_degraded_) return;

    json rec{{"scorer", scorer_id}, {"src", src}, {"tgt", tgt}, {"score", score}};
    appender_ << rec.dump() << '\n';
    appender_.flush();
    if (!appender_) io_degraded_ = true;  // keep serving from memory
}

std::size_t ScoreCache::size() const {
    std::shared_lock lock(mutex_);
    return map_.size();
}

}  // namespace sws

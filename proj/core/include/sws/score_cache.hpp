#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

namespace sws {

// Append-only persistent score cache. One JSON record per line:
//   {"scorer": string, "src": string, "tgt": string, "score": number}
// Duplicate keys resolve to the last record. Persistence failures are
// non-fatal: the caller recomputes and the in-memory map still works.
class ScoreCache {
  public:
    // In-memory only.
    ScoreCache() = default;

    // Loads existing records from `file` (if present) and appends new ones.
    explicit ScoreCache(std::filesystem::path file);

    std::optional<double> lookup(const std::string& scorer_id, const std::string& src,
                                 const std::string& tgt) const;
    void store(const std::string& scorer_id, const std::string& src, const std::string& tgt,
               double score);

    std::size_t size() const;
    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }
    bool persistent() const { return !path_.empty(); }
    // set when an append failed and the cache fell back to memory-only
    bool io_degraded() const { return io_degraded_; }

  private:
    // keys are length-prefixed concatenations, so they are injective over the
    // exact byte strings of (scorer_id, src, tgt)
    static std::string key_of(const std::string& scorer_id, const std::string& src,
                              const std::string& tgt);

    std::filesystem::path path_;
    std::unordered_map<std::string, double> map_;
    std::ofstream appender_;
    mutable std::shared_mutex mutex_;
    mutable std::size_t hits_ = 0;
    mutable std::size_t misses_ = 0;
    bool io_degraded_ = false;
};

}  // namespace sws

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sws {

// Stable error identifiers. The CLI prints the identifier on stderr, so the
// spelling here is part of the tool's interface.
enum class ErrorCode {
    EMPTY_TEXT,
    BAD_SITE,
    BACKEND_FAILURE,
    LENGTH_OVERFLOW,
    CACHE_IO,
    EMPTY_REFERENCE,
    EMPTY_INPUT,
    LENGTH_MISMATCH,
    CONSTANT_INPUT,
    UNSORTED_BATCH,
    MISSING_REFERENCE,
    INDEX_OUT_OF_RANGE,
    NO_ELIGIBLE_SITES,
    MODEL_FAILURE,
    VOCAB_EXHAUSTED,
    COPY_FAILURE,
    DIVERGENCE,
    MISSING_ORIGINAL_PROB,
    ZERO_VECTOR,
    ZERO_ORIGINAL_SCORE,
    PARSE_ERROR,
    UNKNOWN_FORMAT,
    MALFORMED_RESPONSE,
    CLIENT_ERROR,
    CONFIG_INVALID,
    IO_ERROR,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace sws

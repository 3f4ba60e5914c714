#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace reportqa {

// Base class for all toolkit failures surfaced to callers.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input bytes (bad JSON, bad UTF-8). Carries the byte offset
// where decoding stopped when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : Error(what), byte_offset_(byte_offset) {}
    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

// Structurally valid input that violates a documented invariant.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

}  // namespace reportqa

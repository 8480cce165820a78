#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xmppsteg {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- stanza_model ----
class MalformedXml : public Error {
public:
    MalformedXml(const std::string& what, std::size_t offset)
        : Error("malformed XML at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class NotAMessage : public Error {
public:
    explicit NotAMessage(const std::string& root)
        : Error("root element is <" + root + ">, expected <message>") {}
};

// ---- covert_channels ----
class NoCapacity : public Error {
public:
    using Error::Error;
};

class IdExhausted : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// ---- payload_codec ----
class PayloadTooLarge : public Error {
public:
    explicit PayloadTooLarge(std::size_t size)
        : Error("payload of " + std::to_string(size) + " bytes exceeds the 65535 byte frame limit") {}
};

class BadMagic : public Error {
public:
    explicit BadMagic(unsigned value)
        : Error("frame magic mismatch (got 0x" + hex(value) + "): wrong channel config or no hidden data") {}

private:
    static std::string hex(unsigned v) {
        const char* digits = "0123456789abcdef";
        return {digits[(v >> 4) & 0xF], digits[v & 0xF]};
    }
};

class Truncated : public Error {
public:
    Truncated(std::size_t have, std::size_t need)
        : Error("frame truncated: " + std::to_string(have) + " bits available, " + std::to_string(need) +
                " required") {}
};

// ---- entropy_lab ----
class EmptyInput : public Error {
public:
    EmptyInput() : Error("statistics need at least one byte of input") {}
};

// ---- traffic_harness ----
class EmptyCorpus : public Error {
public:
    EmptyCorpus() : Error("corpus contains no messages") {}
};

class InsufficientCapacity : public Error {
public:
    InsufficientCapacity(std::size_t available, std::size_t needed)
        : Error("insufficient capacity: " + std::to_string(available) + " bits available, " +
                std::to_string(needed) + " bits needed"),
          available_(available), needed_(needed) {}
    std::size_t available() const noexcept { return available_; }
    std::size_t needed() const noexcept { return needed_; }

private:
    std::size_t available_;
    std::size_t needed_;
};

class TranscriptParseError : public Error {
public:
    TranscriptParseError(std::size_t line, const std::string& what)
        : Error("transcript line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace xmppsteg

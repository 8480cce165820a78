#pragma once

// Transcript files: one serialized <message> per line, UTF-8, '\n' separated.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "xmppsteg/stanza.hpp"

namespace xmppsteg {

struct SessionTranscript {
    std::vector<Stanza> messages;
    std::vector<Jid> participants;  // sorted, unique
    std::uint64_t seed = 0;
    std::string corpus_name;
};

/// Sorted unique from/to JIDs of [messages].
std::vector<Jid> participants_of(const std::vector<Stanza>& messages);

/// Blank lines are skipped and a trailing '\r' is dropped. Throws
/// TranscriptParseError carrying the 1-based line number.
SessionTranscript parse_transcript(std::string_view text);
SessionTranscript read_transcript(std::istream& in);
SessionTranscript load_transcript(const std::filesystem::path& path);

/// Throws Error if a stanza would span several lines.
std::string transcript_bytes(const SessionTranscript& transcript);
void write_transcript(std::ostream& out, const SessionTranscript& transcript);
void save_transcript(const std::filesystem::path& path, const SessionTranscript& transcript);

}  // namespace xmppsteg

#include "xmppsteg/transcript.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include "xmppsteg/errors.hpp"

namespace xmppsteg {

std::vector<Jid> participants_of(const std::vector<Stanza>& messages) {
    std::vector<Jid> out;
    for (const auto& m : messages) {
        if (auto j = m.from()) out.push_back(*j);
        if (auto j = m.to()) out.push_back(*j);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SessionTranscript parse_transcript(std::string_view text) {
    SessionTranscript t;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        ++line_no;
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        try {
            t.messages.push_back(Stanza::parse(line));
        } catch (const Error& e) {
            throw TranscriptParseError(line_no, e.what());
        }
    }
    t.participants = participants_of(t.messages);
    return t;
}

SessionTranscript read_transcript(std::istream& in) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_transcript(text);
}

SessionTranscript load_transcript(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open transcript " + path.string());
    auto t = read_transcript(in);
    t.corpus_name = path.filename().string();
    return t;
}

std::string transcript_bytes(const SessionTranscript& transcript) {
    std::string out;
    for (const auto& m : transcript.messages) {
        std::string line = m.serialize();
        if (line.find('\n') != std::string::npos)
            throw Error("stanza spans several lines and cannot be written to a transcript");
        out += line;
        out += '\n';
    }
    return out;
}

void write_transcript(std::ostream& out, const SessionTranscript& transcript) { out << transcript_bytes(transcript); }

void save_transcript(const std::filesystem::path& path, const SessionTranscript& transcript) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write transcript " + path.string());
    write_transcript(out, transcript);
}

}  // namespace xmppsteg

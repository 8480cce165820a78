#include "support.hpp"

#include <fstream>
#include <iterator>
#include <stdexcept>

#include "xmppsteg/harness.hpp"

#ifndef XMPPSTEG_DATA_DIR
#error "XMPPSTEG_DATA_DIR must be defined"
#endif

namespace testsupport {

namespace {

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
    return items[rng() % items.size()];
}

bool coin(std::mt19937_64& rng, unsigned percent = 50) { return rng() % 100 < percent; }

std::string random_text(std::mt19937_64& rng) {
    static const std::vector<std::string> pieces = {
        "hello", "Message.", "ok", "see you", "caf\xc3\xa9", "\xe2\x9c\x93", "&amp;", "&lt;3", "&gt;", "&#233;",
        "&#x263A;", "&apos;", "&quot;", "'", "\"", "lol", "2 > 1", " ", "  ", "\t", "\n", "?", "!", "Msg.",
    };
    std::string out;
    const std::size_t n = rng() % 8;
    for (std::size_t i = 0; i < n; ++i) out += pick(rng, pieces);
    return out;
}

std::string attr(std::mt19937_64& rng, const std::string& name, const std::string& value) {
    static const std::vector<std::string> leads = {" ", " ", " ", "  ", "\n", "\t", "\r\n  "};
    static const std::vector<std::string> eqs = {"=", "=", "=", " = ", "= ", " ="};
    char q = coin(rng, 70) ? '\'' : '"';
    return pick(rng, leads) + name + pick(rng, eqs) + q + value + q;
}

std::string random_jid(std::mt19937_64& rng) {
    static const std::vector<std::string> locals = {"adam", "bart", "carl", "dana", "e.f", "x"};
    static const std::vector<std::string> domains = {"test.com", "example.org", "x", "chat.example.net"};
    std::string jid = pick(rng, locals) + "@" + pick(rng, domains);
    if (coin(rng, 20)) jid += "/res" + std::to_string(rng() % 100);
    return jid;
}

std::string random_id(std::mt19937_64& rng) {
    const char* lower = "0123456789abcdef";
    const char* upper = "0123456789ABCDEF";
    switch (rng() % 5) {
        case 0: return std::to_string(rng() % 100000);
        case 1: {
            std::string s;
            for (int i = 0; i < 8; ++i) s += upper[rng() % 16];
            return s;
        }
        case 2: return "purple" + std::to_string(rng() % 1000) + "&amp;x";
        default: {
            std::string s;
            for (int i = 0; i < 8; ++i) s += lower[rng() % 16];
            return s;
        }
    }
}

std::string random_extension(std::mt19937_64& rng) {
    static const std::vector<std::string> ext = {
        "<active xmlns='http://jabber.org/protocol/chatstates'/>",
        "<thread>e0ffe42b28561960c6b12b944a092794b9683a38</thread>",
        "<subject>Re: plans</subject>",
        "<x xmlns=\"jabber:x:event\"><composing/></x>",
        "<!-- note -->",
    };
    return pick(rng, ext);
}

}  // namespace

std::filesystem::path data_dir() { return XMPPSTEG_DATA_DIR; }

const std::vector<std::string>& corpus() {
    static const std::vector<std::string> lines = xmppsteg::load_corpus(data_dir() / "chat_corpus.txt");
    return lines;
}

std::string random_stanza_bytes(std::mt19937_64& rng) {
    static const std::vector<std::string> types = {"chat", "CHAT", "Chat", "normal", "NORMAL", "headline",
                                                   "error", "groupchat", "cHaT"};
    static const std::vector<std::string> langs = {"en", "en-GB", "en-US", "fr", "de-CH", "EN"};

    std::vector<std::string> attrs = {attr(rng, "from", random_jid(rng)), attr(rng, "to", random_jid(rng))};
    if (coin(rng, 70)) attrs.push_back(attr(rng, "type", pick(rng, types)));
    if (coin(rng, 80)) attrs.push_back(attr(rng, "id", random_id(rng)));
    if (coin(rng, 10)) attrs.push_back(attr(rng, "xml:lang", pick(rng, langs)));
    if (coin(rng, 20)) std::swap(attrs[rng() % attrs.size()], attrs[rng() % attrs.size()]);

    std::string out;
    if (coin(rng, 5)) out += "<?xml version='1.0' encoding='UTF-8'?>";
    out += "<message";
    for (const auto& a : attrs) out += a;
    if (coin(rng, 10)) out += " ";
    if (coin(rng, 3)) return out + "/>";
    out += ">";
    if (coin(rng, 15)) out += random_extension(rng);
    if (coin(rng, 90)) {
        out += "<body";
        if (coin(rng, 40)) out += attr(rng, "xml:lang", pick(rng, langs));
        if (coin(rng, 5)) {
            out += "/>";
        } else {
            out += ">" + random_text(rng) + "</body";
            if (coin(rng, 5)) out += " ";
            out += ">";
        }
    }
    if (coin(rng, 15)) out += random_extension(rng);
    out += "</message>";
    if (coin(rng, 5)) out += "\n";
    return out;
}

std::string random_bytes(std::mt19937_64& rng, std::size_t n) {
    std::string s(n, '\0');
    for (auto& c : s) c = static_cast<char>(rng() & 0xFF);
    return s;
}

xmppsteg::ChannelConfig config_of(std::vector<xmppsteg::ChannelId> channels) {
    xmppsteg::ChannelConfig c;
    c.enabled = std::move(channels);
    return c;
}

TempDir::TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("xmppsteg-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testsupport

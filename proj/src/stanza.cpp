#include "xmppsteg/stanza.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>

#include "xmppsteg/errors.hpp"

namespace xmppsteg {

namespace {

bool is_xml_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_start(char c) {
    auto u = static_cast<unsigned char>(c);
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || u >= 0x80;
}

bool is_name_char(char c) { return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.'; }

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Canonical position of well-known message attributes; everything else sorts last.
int attribute_rank(std::string_view name) {
    static constexpr std::string_view order[] = {"from", "to", "type", "id"};
    for (int i = 0; i < 4; ++i)
        if (order[i] == name) return i;
    return 4;
}

std::vector<Attribute>::const_iterator find_attr(const std::vector<Attribute>& attrs, std::string_view name) {
    return std::find_if(attrs.begin(), attrs.end(), [&](const Attribute& a) { return a.name == name; });
}

void write_attributes(std::string& out, const std::vector<Attribute>& attrs) {
    for (const auto& a : attrs) {
        out += a.lead;
        out += a.name;
        out += a.eq;
        out += a.quote;
        out += a.raw_value;
        out += a.quote;
    }
}

}  // namespace

// Recursive-descent reader over one standalone <message> element.
class StanzaReader {
public:
    explicit StanzaReader(std::string_view in) : in_(in) {}

    Stanza read() {
        if (!is_valid_utf8(in_)) fail("input is not valid UTF-8");
        Stanza s;
        s.prolog_ = read_prolog();
        expect('<');
        std::string name = read_name();
        if (name != "message") throw NotAMessage(name);
        s.attrs_ = read_attributes(s.open_tail_);
        if (consume("/>")) {
            s.self_closing_ = true;
        } else {
            expect('>');
            read_message_content(s);
            s.close_tail_ = read_end_tag("message");
        }
        s.trailer_ = read_ws();
        if (pos_ != in_.size()) fail("unexpected content after </message>");
        s.raw_ = std::string(in_);
        return s;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw MalformedXml(what, pos_); }

    bool at_end() const { return pos_ >= in_.size(); }
    char peek() const { return at_end() ? '\0' : in_[pos_]; }
    bool starts_with(std::string_view s) const { return in_.substr(pos_).starts_with(s); }

    bool consume(std::string_view s) {
        if (!starts_with(s)) return false;
        pos_ += s.size();
        return true;
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string read_ws() {
        std::size_t start = pos_;
        while (!at_end() && is_xml_space(in_[pos_])) ++pos_;
        return std::string(in_.substr(start, pos_ - start));
    }

    std::string read_name() {
        std::size_t start = pos_;
        if (!is_name_start(peek())) fail("expected a name");
        while (!at_end() && is_name_char(in_[pos_])) ++pos_;
        return std::string(in_.substr(start, pos_ - start));
    }

    std::string skip_until(std::string_view terminator, const char* what) {
        std::size_t start = pos_;
        std::size_t end = in_.find(terminator, pos_);
        if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
        pos_ = end + terminator.size();
        return std::string(in_.substr(start, pos_ - start));
    }

    std::string read_prolog() {
        if (!starts_with("<?xml")) return {};
        std::string decl = skip_until("?>", "XML declaration");
        std::string lower = decl;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        auto enc = lower.find("encoding");
        if (enc != std::string::npos) {
            auto q = lower.find_first_of("'\"", enc);
            if (q == std::string::npos) fail("bad encoding declaration");
            auto qe = lower.find(lower[q], q + 1);
            if (qe == std::string::npos) fail("bad encoding declaration");
            std::string name = lower.substr(q + 1, qe - q - 1);
            if (name != "utf-8" && name != "utf8") fail("unsupported encoding '" + name + "'");
        }
        return decl + read_ws();
    }

    // Decodes entity references in [raw] and rejects bare '&' and '<'.
    std::string decode(std::string_view raw, std::size_t base) {
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            char c = raw[i];
            if (c == '<') {
                pos_ = base + i;
                fail("'<' not allowed here");
            }
            if (c != '&') {
                out.push_back(c);
                continue;
            }
            auto semi = raw.find(';', i);
            if (semi == std::string_view::npos || semi == i + 1) {
                pos_ = base + i;
                fail("bad entity reference");
            }
            std::string_view ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp") out += '&';
            else if (ent == "lt") out += '<';
            else if (ent == "gt") out += '>';
            else if (ent == "quot") out += '"';
            else if (ent == "apos") out += '\'';
            else if (ent[0] == '#') {
                std::uint32_t cp = 0;
                bool hex = ent.size() > 1 && ent[1] == 'x';
                std::string_view digits = ent.substr(hex ? 2 : 1);
                bool ok = !digits.empty() && digits.size() <= 8;
                for (char d : digits) {
                    int v = -1;
                    if (d >= '0' && d <= '9') v = d - '0';
                    else if (hex && d >= 'a' && d <= 'f') v = d - 'a' + 10;
                    else if (hex && d >= 'A' && d <= 'F') v = d - 'A' + 10;
                    if (v < 0) { ok = false; break; }
                    cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
                }
                if (!ok || cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
                    pos_ = base + i;
                    fail("bad character reference");
                }
                append_utf8(out, cp);
            } else {
                pos_ = base + i;
                fail("unknown entity '&" + std::string(ent) + ";'");
            }
            i = semi;
        }
        return out;
    }

    // Reads attributes up to (not including) '>' or '/>'; whitespace before the
    // closing bracket is returned through [tail].
    std::vector<Attribute> read_attributes(std::string& tail) {
        std::vector<Attribute> attrs;
        for (;;) {
            std::string ws = read_ws();
            if (peek() == '>' || starts_with("/>")) {
                tail = std::move(ws);
                return attrs;
            }
            if (ws.empty()) fail("whitespace required before attribute");
            Attribute a;
            a.lead = std::move(ws);
            a.name = read_name();
            if (find_attr(attrs, a.name) != attrs.end()) fail("duplicate attribute '" + a.name + "'");
            a.eq = read_ws();
            expect('=');
            a.eq += '=';
            a.eq += read_ws();
            char q = peek();
            if (q != '\'' && q != '"') fail("attribute value must be quoted");
            a.quote = q;
            ++pos_;
            std::size_t start = pos_;
            std::size_t end = in_.find(q, pos_);
            if (end == std::string_view::npos) fail("unterminated attribute value");
            a.raw_value = std::string(in_.substr(start, end - start));
            a.value = decode(a.raw_value, start);
            pos_ = end + 1;
            attrs.push_back(std::move(a));
        }
    }

    std::string read_end_tag(std::string_view name) {
        if (!consume("</")) fail("expected end tag </" + std::string(name) + ">");
        std::string got = read_name();
        if (got != name) fail("mismatched end tag </" + got + ">, expected </" + std::string(name) + ">");
        std::string ws = read_ws();
        expect('>');
        return ws;
    }

    // Character data up to the next '<', validated but kept raw.
    std::string read_text_raw() {
        std::size_t start = pos_;
        std::size_t end = in_.find('<', pos_);
        if (end == std::string_view::npos) end = in_.size();
        std::string_view raw = in_.substr(start, end - start);
        decode(raw, start);
        pos_ = end;
        return std::string(raw);
    }

    // Misc markup allowed anywhere in element content. Returns false when the
    // cursor is not at a comment, CDATA section or processing instruction.
    bool read_misc(std::string& out) {
        if (starts_with("<!--")) {
            std::string c = skip_until("-->", "comment");
            if (c.substr(4, c.size() - 7).find("--") != std::string::npos) fail("'--' inside comment");
            out += c;
            return true;
        }
        if (starts_with("<![CDATA[")) {
            out += skip_until("]]>", "CDATA section");
            return true;
        }
        if (starts_with("<?")) {
            out += skip_until("?>", "processing instruction");
            return true;
        }
        return false;
    }

    // Validates a whole element and appends its raw bytes to [out].
    void skip_element(std::string& out, int depth) {
        if (depth > 64) fail("elements nested too deeply");
        std::size_t start = pos_;
        expect('<');
        std::string name = read_name();
        std::string tail;
        read_attributes(tail);
        if (!consume("/>")) {
            expect('>');
            std::string ignored;
            for (;;) {
                if (at_end()) fail("unterminated <" + name + ">");
                if (starts_with("</")) break;
                if (peek() == '<') {
                    if (!read_misc(ignored)) skip_element(ignored, depth + 1);
                } else {
                    read_text_raw();
                }
            }
            read_end_tag(name);
        }
        out += in_.substr(start, pos_ - start);
    }

    void read_body(BodyElement& body) {
        body.attrs_ = read_attributes(body.open_tail_);
        if (consume("/>")) {
            body.self_closing_ = true;
            return;
        }
        expect('>');
        std::size_t start = pos_;
        body.raw_text_ = read_text_raw();
        if (!starts_with("</")) {
            if (at_end()) fail("unterminated <body>");
            fail("<body> must contain character data only");
        }
        body.text_ = decode(body.raw_text_, start);
        body.close_tail_ = read_end_tag("body");
    }

    void read_message_content(Stanza& s) {
        for (;;) {
            std::string& seg = s.body_ ? s.after_body_ : s.before_body_;
            if (at_end()) fail("unterminated <message>");
            if (starts_with("</")) return;
            if (peek() != '<') {
                seg += read_text_raw();
                continue;
            }
            if (read_misc(seg)) continue;
            if (!s.body_ && starts_with("<body") && pos_ + 5 < in_.size() && !is_name_char(in_[pos_ + 5])) {
                pos_ += 5;
                BodyElement body;
                read_body(body);
                s.body_ = std::move(body);
                continue;
            }
            skip_element(seg, 1);
        }
    }

    std::string_view in_;
    std::size_t pos_ = 0;
};

std::optional<Jid> Jid::parse(std::string_view text) {
    Jid jid;
    std::string_view bare = text;
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        if (slash + 1 == text.size()) return std::nullopt;
        jid.resource = std::string(text.substr(slash + 1));
        bare = text.substr(0, slash);
    }
    auto at = bare.find('@');
    if (at == std::string_view::npos || at == 0 || at + 1 == bare.size()) return std::nullopt;
    if (bare.find('@', at + 1) != std::string_view::npos) return std::nullopt;
    jid.local = std::string(bare.substr(0, at));
    jid.domain = std::string(bare.substr(at + 1));
    return jid;
}

std::string Jid::str() const {
    std::string out = local + "@" + domain;
    if (resource) out += "/" + *resource;
    return out;
}

std::optional<std::string> BodyElement::xml_lang() const {
    auto it = find_attr(attrs_, "xml:lang");
    if (it == attrs_.end()) return std::nullopt;
    return it->value;
}

Stanza::Stanza(const Jid& from, const Jid& to) {
    set_attribute("from", from.str());
    set_attribute("to", to.str());
    self_closing_ = true;
}

Stanza Stanza::parse(std::string_view bytes) { return StanzaReader(bytes).read(); }

std::string Stanza::serialize() const {
    std::string out;
    out.reserve(raw_ ? raw_->size() : 128);
    out += prolog_;
    out += "<message";
    write_attributes(out, attrs_);
    out += open_tail_;
    if (self_closing_) {
        out += "/>";
    } else {
        out += '>';
        out += before_body_;
        if (body_) {
            out += "<body";
            write_attributes(out, body_->attrs_);
            out += body_->open_tail_;
            if (body_->self_closing_) {
                out += "/>";
            } else {
                out += '>';
                out += body_->raw_text_;
                out += "</body";
                out += body_->close_tail_;
                out += '>';
            }
        }
        out += after_body_;
        out += "</message";
        out += close_tail_;
        out += '>';
    }
    out += trailer_;
    return out;
}

std::optional<Jid> Stanza::from() const {
    auto v = attribute("from");
    return v ? Jid::parse(*v) : std::nullopt;
}

std::optional<Jid> Stanza::to() const {
    auto v = attribute("to");
    return v ? Jid::parse(*v) : std::nullopt;
}

std::optional<std::string> Stanza::attribute(std::string_view name) const {
    auto it = find_attr(attrs_, name);
    if (it == attrs_.end()) return std::nullopt;
    return it->value;
}

std::vector<std::string> Stanza::attr_order() const {
    std::vector<std::string> names;
    names.reserve(attrs_.size());
    for (const auto& a : attrs_) names.push_back(a.name);
    return names;
}

void Stanza::set_attribute(std::string_view name, std::string value) {
    touch();
    for (auto& a : attrs_) {
        if (a.name == name) {
            a.raw_value = escape_attribute(value, a.quote);
            a.value = std::move(value);
            return;
        }
    }
    Attribute a;
    a.name = std::string(name);
    a.raw_value = escape_attribute(value, a.quote);
    a.value = std::move(value);
    int rank = attribute_rank(name);
    auto pos = std::find_if(attrs_.begin(), attrs_.end(),
                            [&](const Attribute& other) { return attribute_rank(other.name) > rank; });
    attrs_.insert(pos, std::move(a));
}

bool Stanza::remove_attribute(std::string_view name) {
    auto it = find_attr(attrs_, name);
    if (it == attrs_.end()) return false;
    touch();
    attrs_.erase(it);
    return true;
}

void Stanza::set_type(std::optional<std::string> value) {
    if (value) set_attribute("type", std::move(*value));
    else remove_attribute("type");
}

void Stanza::set_id(std::optional<std::string> value) {
    if (value) set_attribute("id", std::move(*value));
    else remove_attribute("id");
}

void Stanza::set_body_text(std::string text) {
    touch();
    if (!body_) {
        body_.emplace();
        self_closing_ = false;
    }
    body_->self_closing_ = false;
    body_->raw_text_ = escape_text(text);
    body_->text_ = std::move(text);
}

void Stanza::set_body_lang(std::optional<std::string> lang) {
    if (!body_) {
        if (!lang) return;
        set_body_text("");
    }
    touch();
    auto& attrs = body_->attrs_;
    auto it = std::find_if(attrs.begin(), attrs.end(), [](const Attribute& a) { return a.name == "xml:lang"; });
    if (!lang) {
        if (it != attrs.end()) attrs.erase(it);
        return;
    }
    if (it != attrs.end()) {
        it->raw_value = escape_attribute(*lang, it->quote);
        it->value = std::move(*lang);
        return;
    }
    Attribute a;
    a.name = "xml:lang";
    a.raw_value = escape_attribute(*lang, a.quote);
    a.value = std::move(*lang);
    attrs.push_back(std::move(a));
}

void Stanza::remove_body() {
    if (!body_) return;
    touch();
    body_.reset();
}

std::string escape_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string escape_attribute(std::string_view value, char quote) {
    std::string out;
    out.reserve(value.size());
    for (char c : value) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '\'': out += quote == '\'' ? "&apos;" : "'"; break;
        case '"': out += quote == '"' ? "&quot;" : "\""; break;
        default: out.push_back(c);
        }
    }
    return out;
}

bool is_valid_utf8(std::string_view bytes) noexcept {
    std::size_t i = 0;
    while (i < bytes.size()) {
        auto c = static_cast<unsigned char>(bytes[i]);
        std::size_t len;
        std::uint32_t cp;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > bytes.size()) return false;
        for (std::size_t k = 1; k < len; ++k) {
            auto cc = static_cast<unsigned char>(bytes[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // overlong forms, surrogates, out of range
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return false;
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += len;
    }
    return true;
}

}  // namespace xmppsteg

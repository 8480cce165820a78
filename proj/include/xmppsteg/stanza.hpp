#pragma once

// XMPP <message> stanzas with byte-faithful round trips.
//
// Covert channels live in attribute case, attribute presence and body edge
// whitespace, so the reader here never normalizes anything: attribute order,
// inter-attribute whitespace, quote style and the escaped form of every value
// are kept so that serialize(parse(b)) == b. Mutators re-escape only the field
// they touch.

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xmppsteg {

struct Jid {
    std::string local;
    std::string domain;
    std::optional<std::string> resource;

    /// `local@domain[/resource]`; nullopt when local or domain is empty.
    static std::optional<Jid> parse(std::string_view text);
    std::string str() const;

    auto operator<=>(const Jid&) const = default;
};

/// One attribute exactly as it appeared on the wire.
struct Attribute {
    std::string name;
    std::string value;      // entity-decoded
    std::string raw_value;  // as written between the quotes
    std::string lead = " "; // whitespace before the name
    std::string eq = "=";   // `=` with any surrounding whitespace
    char quote = '\'';
};

class BodyElement {
public:
    const std::string& text() const noexcept { return text_; }
    std::optional<std::string> xml_lang() const;
    const std::vector<Attribute>& attributes() const noexcept { return attrs_; }

private:
    friend class Stanza;
    friend class StanzaReader;

    std::vector<Attribute> attrs_;
    std::string text_;
    std::string raw_text_;
    std::string open_tail_;
    std::string close_tail_;
    bool self_closing_ = false;
};

class Stanza {
public:
    /// Constructed stanza: from/to in default order, no body, no raw form.
    Stanza(const Jid& from, const Jid& to);

    /// Throws MalformedXml or NotAMessage.
    static Stanza parse(std::string_view bytes);

    std::string serialize() const;

    /// Original bytes when parsed and not mutated since.
    const std::optional<std::string>& raw() const noexcept { return raw_; }

    std::optional<Jid> from() const;
    std::optional<Jid> to() const;
    std::optional<std::string> type() const { return attribute("type"); }
    std::optional<std::string> id() const { return attribute("id"); }
    const std::optional<BodyElement>& body() const noexcept { return body_; }

    std::optional<std::string> attribute(std::string_view name) const;
    const std::vector<Attribute>& attributes() const noexcept { return attrs_; }
    std::vector<std::string> attr_order() const;

    /// Updates in place (keeping layout) or inserts at the canonical
    /// from/to/type/id position with a single leading space.
    void set_attribute(std::string_view name, std::string value);
    bool remove_attribute(std::string_view name);

    void set_type(std::optional<std::string> value);
    void set_id(std::optional<std::string> value);

    /// Creates the body element when absent.
    void set_body_text(std::string text);
    void set_body_lang(std::optional<std::string> lang);
    void remove_body();

    friend bool operator==(const Stanza& a, const Stanza& b) { return a.serialize() == b.serialize(); }

private:
    friend class StanzaReader;
    Stanza() = default;

    void touch() noexcept { raw_.reset(); }

    std::string prolog_;
    std::vector<Attribute> attrs_;
    std::string open_tail_;
    bool self_closing_ = false;
    std::string before_body_;
    std::optional<BodyElement> body_;
    std::string after_body_;
    std::string close_tail_;
    std::string trailer_;
    std::optional<std::string> raw_;
};

inline Stanza parse_stanza(std::string_view bytes) { return Stanza::parse(bytes); }
inline std::string serialize_stanza(const Stanza& s) { return s.serialize(); }

// Escaping used by the serializer. Text escapes `& < >`; attribute values also
// escape the delimiting quote.
std::string escape_text(std::string_view text);
std::string escape_attribute(std::string_view value, char quote);

bool is_valid_utf8(std::string_view bytes) noexcept;

}  // namespace xmppsteg

#include "xmppsteg/channels.hpp"

#include <algorithm>
#include <cstdint>
#include <set>

#include "xmppsteg/errors.hpp"

namespace xmppsteg {

namespace {

constexpr std::array<ChannelSpec, 11> kCatalog = {{
    {ChannelId::TypePresence, 1, false, true, true, true, "presence of the message type attribute"},
    {ChannelId::TypeValue, 1, false, true, false, true, "value of the message type attribute"},
    {ChannelId::TypeCase, 1, true, true, true, false, "letter case of the message type value"},
    {ChannelId::IdLsb, 1, false, true, true, true, "least significant bit of the message id"},
    {ChannelId::IdCase, 1, false, true, false, true, "letter case of the message id"},
    {ChannelId::XmlLangPresence, 1, false, true, true, true, "presence of xml:lang on the body"},
    {ChannelId::XmlLangValue, 1, false, true, false, true, "value of xml:lang on the body"},
    {ChannelId::LeadingSpace, 1, false, false, true, true, "space before the body text"},
    {ChannelId::TrailingSpace, 1, false, false, true, true, "space after the body text"},
    {ChannelId::Synonym, 1, false, false, false, true, "first dictionary word of the body, synonym choice"},
    {ChannelId::SpellingMistake, 1, false, false, false, true, "first dictionary word of the body, spelling"},
}};

constexpr std::array<std::string_view, 11> kNames = {
    "TypePresence", "TypeValue",    "TypeCase",     "IdLsb",   "IdCase",          "XmlLangPresence",
    "XmlLangValue", "LeadingSpace", "TrailingSpace", "Synonym", "SpellingMistake",
};

constexpr std::array<std::string_view, 4> kTypeAlphabet = {"chat", "normal", "headline", "error"};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_letter(char c) { return is_lower(c) || is_upper(c); }

bool has_letter(std::string_view s) { return std::any_of(s.begin(), s.end(), is_letter); }
bool all_letters_upper(std::string_view s) { return has_letter(s) && std::none_of(s.begin(), s.end(), is_lower); }

std::string to_upper(std::string s) {
    for (auto& c : s)
        if (is_lower(c)) c = static_cast<char>(c - 'a' + 'A');
    return s;
}

std::string to_lower(std::string s) {
    for (auto& c : s)
        if (is_upper(c)) c = static_cast<char>(c - 'A' + 'a');
    return s;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

bool has_payload_text(const Stanza& s) {
    const auto& body = s.body();
    return body && std::any_of(body->text().begin(), body->text().end(), [](char c) { return !is_space(c); });
}

bool is_trailing_punct(char c) {
    return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':' || c == ')' || c == '"' ||
           c == '\'';
}

std::string_view strip_trailing_punct(std::string_view token) {
    std::size_t end = token.size();
    while (end > 0 && is_trailing_punct(token[end - 1])) --end;
    return token.substr(0, end);
}

struct Carrier {
    std::size_t begin;
    std::size_t end;
    VariantDictionary::Hit hit;
};

// First whitespace-delimited token of [text] found in [dict], trying the full
// token before the token with trailing punctuation detached.
std::optional<Carrier> first_carrier(std::string_view text, const VariantDictionary& dict) {
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t begin = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (begin == i) break;
        std::string_view token = text.substr(begin, i - begin);
        if (auto hit = dict.find(token)) return Carrier{begin, i, *hit};
        std::string_view core = strip_trailing_punct(token);
        if (!core.empty() && core.size() != token.size())
            if (auto hit = dict.find(core)) return Carrier{begin, begin + core.size(), *hit};
    }
    return std::nullopt;
}

const VariantDictionary& dictionary_for(ChannelId channel, const ChannelConfig& config) {
    return channel == ChannelId::Synonym ? config.synonyms : config.misspellings;
}

std::size_t type_value_bits(const ChannelConfig& config) { return config.type_value_two_bits ? 2 : 1; }

std::size_t position(const std::vector<ChannelId>& list, ChannelId id) {
    return static_cast<std::size_t>(std::find(list.begin(), list.end(), id) - list.begin());
}

std::string embed_id_lsb(const std::string& current, bool bit, IdAllocator& ids) {
    std::string candidate = current;
    for (int attempt = 0; attempt < 64; ++attempt) {
        int v = candidate.empty() ? -1 : hex_value(candidate.back());
        if (v >= 0 && ((v & 1) != 0) == bit) return candidate;
        ids.discard(candidate);
        auto next = ids.next();
        if (!next) throw IdExhausted("id allocator ran out of candidates after '" + candidate + "'");
        candidate = std::move(*next);
    }
    throw IdExhausted("no id with the wanted least significant bit in 64 candidates");
}

}  // namespace

std::string_view to_string(ChannelId id) { return kNames[static_cast<std::size_t>(id)]; }

std::optional<ChannelId> channel_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (kNames[i] == name) return kAllChannels[i];
    return std::nullopt;
}

const ChannelSpec& channel_spec(ChannelId id) { return kCatalog[static_cast<std::size_t>(id)]; }

std::span<const ChannelSpec> channel_catalog() { return kCatalog; }

void VariantDictionary::add(std::string word, std::vector<std::string> variants) {
    if (variants.size() < 2)
        throw ConfigError("dictionary entry '" + word + "' needs at least two variants");
    std::set<std::string> seen;
    for (const auto& v : variants) {
        if (v.empty() || std::any_of(v.begin(), v.end(), is_space))
            throw ConfigError("dictionary entry '" + word + "' has an empty or multi-word variant");
        if (!seen.insert(v).second) throw ConfigError("dictionary entry '" + word + "' repeats variant '" + v + "'");
        if (index_.contains(v)) throw ConfigError("variant '" + v + "' appears in more than one dictionary entry");
    }
    std::size_t entry = entries_.size();
    for (std::size_t k = 0; k < 2; ++k) index_.emplace(variants[k], Hit{entry, k});
    entries_.emplace_back(std::move(word), std::move(variants));
}

std::optional<VariantDictionary::Hit> VariantDictionary::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void ChannelConfig::validate() const {
    std::set<ChannelId> seen;
    for (auto id : enabled)
        if (!seen.insert(id).second) throw ConfigError("channel " + std::string(to_string(id)) + " enabled twice");

    auto on = [&](ChannelId id) { return seen.contains(id); };
    auto exclusive = [&](ChannelId a, ChannelId b) {
        if (on(a) && on(b))
            throw ConfigError(std::string(to_string(a)) + " and " + std::string(to_string(b)) +
                              " share a carrier and cannot be enabled together");
    };
    auto before = [&](ChannelId first, ChannelId then) {
        if (on(first) && on(then) && position(enabled, first) > position(enabled, then))
            throw ConfigError(std::string(to_string(first)) + " must come before " + std::string(to_string(then)) +
                              " in the enabled list");
    };
    exclusive(ChannelId::TypePresence, ChannelId::TypeValue);
    exclusive(ChannelId::XmlLangPresence, ChannelId::XmlLangValue);
    before(ChannelId::TypePresence, ChannelId::TypeCase);
    before(ChannelId::TypeValue, ChannelId::TypeCase);
    before(ChannelId::IdLsb, ChannelId::IdCase);

    if (lang_pair.first.empty() || lang_pair.second.empty() || lang_pair.first == lang_pair.second)
        throw ConfigError("lang_pair needs two distinct non-empty language tags");

    if (on(ChannelId::Synonym) && on(ChannelId::SpellingMistake)) {
        std::set<std::string_view> cores;
        for (const auto& [word, variants] : synonyms.entries())
            for (const auto& v : variants) cores.insert(strip_trailing_punct(v));
        for (const auto& [word, variants] : misspellings.entries())
            for (const auto& v : variants)
                if (cores.contains(strip_trailing_punct(v)))
                    throw ConfigError("word '" + v + "' is in both the synonym and misspelling dictionaries");
    }
}

std::optional<std::string> successor_id(std::string_view id) {
    if (id.empty()) return std::nullopt;
    std::string out(id);
    bool decimal = std::all_of(id.begin(), id.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (decimal) {
        for (std::size_t i = out.size(); i-- > 0;) {
            if (out[i] != '9') {
                ++out[i];
                return out;
            }
            out[i] = '0';
        }
        return std::nullopt;
    }
    std::size_t start = out.size();
    while (start > 0 && hex_value(out[start - 1]) >= 0) --start;
    if (start == out.size()) return std::nullopt;
    bool upper = std::any_of(out.begin() + static_cast<std::ptrdiff_t>(start), out.end(), is_upper);
    const char* digits = upper ? "0123456789ABCDEF" : "0123456789abcdef";
    for (std::size_t i = out.size(); i-- > start;) {
        int v = hex_value(out[i]);
        if (v != 15) {
            out[i] = digits[v + 1];
            return out;
        }
        out[i] = '0';
    }
    return std::nullopt;
}

std::optional<std::string> SuccessorIdAllocator::next() {
    auto next = successor_id(current_);
    if (next) current_ = *next;
    return next;
}

std::size_t capacity(ChannelId channel, const Stanza& stanza, const ChannelConfig& config) {
    switch (channel) {
    case ChannelId::TypePresence:
        return 1;
    case ChannelId::TypeValue:
        return type_value_bits(config);
    case ChannelId::TypeCase: {
        auto t = stanza.type();
        return t && has_letter(*t) ? 1 : 0;
    }
    case ChannelId::IdLsb: {
        auto id = stanza.id();
        return id && !id->empty() && hex_value(id->back()) >= 0 ? 1 : 0;
    }
    case ChannelId::IdCase: {
        auto id = stanza.id();
        return id && has_letter(*id) ? 1 : 0;
    }
    case ChannelId::XmlLangPresence:
    case ChannelId::XmlLangValue:
        return stanza.body() ? 1 : 0;
    case ChannelId::LeadingSpace:
    case ChannelId::TrailingSpace:
        return has_payload_text(stanza) ? 1 : 0;
    case ChannelId::Synonym:
    case ChannelId::SpellingMistake: {
        const auto& dict = dictionary_for(channel, config);
        if (dict.empty() || !stanza.body()) return 0;
        return first_carrier(stanza.body()->text(), dict) ? 1 : 0;
    }
    }
    return 0;
}

EmbedResult embed(ChannelId channel, const Stanza& stanza, BitStream& bits, const ChannelConfig& config,
                  IdAllocator* ids) {
    const std::size_t cap = capacity(channel, stanza, config);
    if (cap == 0)
        throw NoCapacity("channel " + std::string(to_string(channel)) + " has no carrier in this stanza");
    if (bits.at_end()) throw NoCapacity("no bits left to embed");

    std::size_t consumed = 0;
    unsigned value = 0;
    for (std::size_t i = 0; i < cap; ++i) {
        bool b = false;
        if (!bits.at_end()) {
            b = bits.read();
            ++consumed;
        }
        value = (value << 1) | (b ? 1U : 0U);
    }
    const bool bit = (value & 1U) != 0;

    Stanza out = stanza;
    switch (channel) {
    case ChannelId::TypePresence:
        if (bit) out.set_type(std::nullopt);
        else if (!out.type()) out.set_type("chat");
        break;
    case ChannelId::TypeValue: {
        std::string word(kTypeAlphabet[value]);
        auto current = out.type();
        if (current && all_letters_upper(*current)) word = to_upper(word);
        if (current != word) out.set_type(word);
        break;
    }
    case ChannelId::TypeCase: {
        std::string t = *out.type();
        std::string next = bit ? to_upper(t) : to_lower(t);
        if (next != t) out.set_type(next);
        break;
    }
    case ChannelId::IdLsb: {
        std::string current = *out.id();
        std::string chosen;
        if (ids) {
            chosen = embed_id_lsb(current, bit, *ids);
        } else {
            SuccessorIdAllocator local(current);
            chosen = embed_id_lsb(current, bit, local);
        }
        if (chosen != current) out.set_id(chosen);
        break;
    }
    case ChannelId::IdCase: {
        std::string id = *out.id();
        std::string next = bit ? to_upper(id) : to_lower(id);
        if (next != id) out.set_id(next);
        break;
    }
    case ChannelId::XmlLangPresence: {
        auto lang = out.body()->xml_lang();
        if (bit && lang != config.lang_pair.first) out.set_body_lang(config.lang_pair.first);
        if (!bit && lang) out.set_body_lang(std::nullopt);
        break;
    }
    case ChannelId::XmlLangValue: {
        const std::string& want = bit ? config.lang_pair.second : config.lang_pair.first;
        if (out.body()->xml_lang() != want) out.set_body_lang(want);
        break;
    }
    case ChannelId::LeadingSpace: {
        const std::string& text = out.body()->text();
        std::size_t start = 0;
        while (start < text.size() && is_space(text[start])) ++start;
        std::string next = (bit ? " " : "") + text.substr(start);
        if (next != text) out.set_body_text(next);
        break;
    }
    case ChannelId::TrailingSpace: {
        const std::string& text = out.body()->text();
        std::size_t end = text.size();
        while (end > 0 && is_space(text[end - 1])) --end;
        std::string next = text.substr(0, end) + (bit ? " " : "");
        if (next != text) out.set_body_text(next);
        break;
    }
    case ChannelId::Synonym:
    case ChannelId::SpellingMistake: {
        const auto& dict = dictionary_for(channel, config);
        std::string text = out.body()->text();
        auto carrier = first_carrier(text, dict);
        if (carrier->hit.variant != (bit ? 1U : 0U)) {
            text.replace(carrier->begin, carrier->end - carrier->begin, dict.variant(carrier->hit.entry, bit ? 1 : 0));
            out.set_body_text(text);
        }
        break;
    }
    }
    return {std::move(out), consumed};
}

BitStream extract(ChannelId channel, const Stanza& stanza, const ChannelConfig& config) {
    BitStream out;
    if (capacity(channel, stanza, config) == 0) return out;
    switch (channel) {
    case ChannelId::TypePresence:
        out.push(!stanza.type().has_value());
        break;
    case ChannelId::TypeValue: {
        auto t = stanza.type();
        if (!t) break;
        std::string lower = to_lower(*t);
        std::size_t n = config.type_value_two_bits ? 4 : 2;
        for (std::size_t v = 0; v < n; ++v) {
            if (kTypeAlphabet[v] == lower) {
                out.push_uint(v, static_cast<unsigned>(type_value_bits(config)));
                break;
            }
        }
        break;
    }
    case ChannelId::TypeCase:
        out.push(all_letters_upper(*stanza.type()));
        break;
    case ChannelId::IdLsb:
        out.push((hex_value(stanza.id()->back()) & 1) != 0);
        break;
    case ChannelId::IdCase:
        out.push(all_letters_upper(*stanza.id()));
        break;
    case ChannelId::XmlLangPresence:
        out.push(stanza.body()->xml_lang().has_value());
        break;
    case ChannelId::XmlLangValue: {
        auto lang = stanza.body()->xml_lang();
        if (lang == config.lang_pair.first) out.push(false);
        else if (lang == config.lang_pair.second) out.push(true);
        break;
    }
    case ChannelId::LeadingSpace:
        out.push(is_space(stanza.body()->text().front()));
        break;
    case ChannelId::TrailingSpace:
        out.push(is_space(stanza.body()->text().back()));
        break;
    case ChannelId::Synonym:
    case ChannelId::SpellingMistake: {
        auto carrier = first_carrier(stanza.body()->text(), dictionary_for(channel, config));
        out.push(carrier->hit.variant == 1);
        break;
    }
    }
    return out;
}

EmbedResult mux_embed(const Stanza& stanza, BitStream& payload, const ChannelConfig& config, IdAllocator* ids) {
    EmbedResult result{stanza, 0};
    for (auto channel : config.enabled) {
        if (payload.at_end()) break;
        if (capacity(channel, result.stanza, config) == 0) continue;
        auto step = embed(channel, result.stanza, payload, config, ids);
        result.stanza = std::move(step.stanza);
        result.consumed += step.consumed;
    }
    return result;
}

BitStream mux_extract(const Stanza& stanza, const ChannelConfig& config) {
    BitStream out;
    for (auto channel : config.enabled) out.append(extract(channel, stanza, config));
    return out;
}

namespace {

// Fewest bits channels [from..] can take over every choice of earlier bits.
std::size_t guaranteed_capacity(const Stanza& stanza, const ChannelConfig& config, std::size_t from) {
    for (std::size_t i = from; i < config.enabled.size(); ++i) {
        const ChannelId channel = config.enabled[i];
        const std::size_t cap = capacity(channel, stanza, config);
        if (cap == 0) continue;
        std::size_t best = SIZE_MAX;
        for (std::uint64_t value = 0; value < (1ULL << cap); ++value) {
            BitStream bits;
            bits.push_uint(value, static_cast<unsigned>(cap));
            Stanza next = embed(channel, stanza, bits, config).stanza;
            best = std::min(best, guaranteed_capacity(next, config, i + 1));
        }
        return cap + best;
    }
    return 0;
}

}  // namespace

std::size_t mux_capacity(const Stanza& stanza, const ChannelConfig& config) {
    return guaranteed_capacity(stanza, config, 0);
}

}  // namespace xmppsteg

#pragma once

// Covert channels in XMPP message stanzas.
//
// Every channel exposes the same three operations:
//   capacity(ch, stanza)        bits the stanza can carry on that channel now
//   embed(ch, stanza, bits)     writes capacity() bits from the stream's cursor
//   extract(ch, stanza)         reads them back (empty when inapplicable)
//
// Bits are consumed MSB-first. The multiplexer applies the enabled channels in
// list order and the extractor walks the same order, so channels that share a
// carrier (the type attribute, the id, xml:lang) are constrained by
// ChannelConfig::validate() to orders where a later channel can never change
// an earlier channel's capacity or value.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xmppsteg/bitstream.hpp"
#include "xmppsteg/stanza.hpp"

namespace xmppsteg {

enum class ChannelId {
    TypePresence,
    TypeValue,
    TypeCase,
    IdLsb,
    IdCase,
    XmlLangPresence,
    XmlLangValue,
    LeadingSpace,
    TrailingSpace,
    Synonym,
    SpellingMistake,
};

inline constexpr std::array<ChannelId, 11> kAllChannels = {
    ChannelId::TypePresence, ChannelId::TypeValue,       ChannelId::TypeCase,     ChannelId::IdLsb,
    ChannelId::IdCase,       ChannelId::XmlLangPresence, ChannelId::XmlLangValue, ChannelId::LeadingSpace,
    ChannelId::TrailingSpace, ChannelId::Synonym,        ChannelId::SpellingMistake,
};

std::string_view to_string(ChannelId id);
std::optional<ChannelId> channel_from_string(std::string_view name);

struct ChannelSpec {
    ChannelId id;
    unsigned bits_per_message;
    bool stateless_detectable;
    bool stateful_detectable;
    /// false when the detectability flags are extrapolated rather than measured.
    bool measured;
    /// Insecure channels stay in the library but should not be enabled by default.
    bool recommended;
    std::string_view carrier;
};

const ChannelSpec& channel_spec(ChannelId id);
std::span<const ChannelSpec> channel_catalog();

/// Word -> ordered variants. Variant 0 is the canonical (bit 0) form, variant 1
/// carries bit 1; further variants are kept but never used for embedding.
class VariantDictionary {
public:
    struct Hit {
        std::size_t entry;
        std::size_t variant;
    };

    /// Throws ConfigError for fewer than two variants, empty or whitespace-containing
    /// variants, or a variant already owned by another entry.
    void add(std::string word, std::vector<std::string> variants);

    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }

    /// Looks up one of the first two variants of any entry.
    std::optional<Hit> find(std::string_view token) const;
    const std::string& variant(std::size_t entry, std::size_t index) const { return entries_[entry].second[index]; }
    const std::vector<std::pair<std::string, std::vector<std::string>>>& entries() const noexcept { return entries_; }

private:
    std::vector<std::pair<std::string, std::vector<std::string>>> entries_;
    std::unordered_map<std::string, Hit> index_;
};

struct ChannelConfig {
    std::vector<ChannelId> enabled;
    VariantDictionary synonyms;
    VariantDictionary misspellings;
    std::pair<std::string, std::string> lang_pair{"en", "en-GB"};
    /// Two-bit TypeValue alphabet (chat/normal/headline/error). headline and
    /// error are unusual in chat and draw attention.
    bool type_value_two_bits = false;

    /// Throws ConfigError: duplicate channels, mutually exclusive channels both
    /// enabled, shared-carrier channels in an unsafe order, overlapping dictionaries.
    void validate() const;
};

/// Source of fresh message ids for the IdLsb channel. Ids that do not carry the
/// wanted bit are handed back through discard() so a caller can spend them on
/// decoy traffic instead of leaving gaps.
class IdAllocator {
public:
    virtual ~IdAllocator() = default;
    virtual std::optional<std::string> next() = 0;
    virtual void discard(const std::string& id) = 0;
};

/// Counts up from a given id: decimal when the id is all digits, otherwise the
/// trailing run of hex digits, keeping width and letter case.
class SuccessorIdAllocator final : public IdAllocator {
public:
    explicit SuccessorIdAllocator(std::string current) : current_(std::move(current)) {}
    std::optional<std::string> next() override;
    void discard(const std::string& id) override { discarded_.push_back(id); }
    const std::vector<std::string>& discarded() const noexcept { return discarded_; }

private:
    std::string current_;
    std::vector<std::string> discarded_;
};

/// Next id in counter order, or nullopt on overflow of the counter width.
std::optional<std::string> successor_id(std::string_view id);

struct EmbedResult {
    Stanza stanza;
    std::size_t consumed = 0;
};

std::size_t capacity(ChannelId channel, const Stanza& stanza, const ChannelConfig& config);

/// Consumes capacity() bits from [bits] (zero-padded when fewer remain).
/// Throws NoCapacity when capacity is 0 or [bits] is exhausted, IdExhausted when
/// the id allocator cannot produce a matching id.
EmbedResult embed(ChannelId channel, const Stanza& stanza, BitStream& bits, const ChannelConfig& config,
                  IdAllocator* ids = nullptr);

BitStream extract(ChannelId channel, const Stanza& stanza, const ChannelConfig& config);

/// Applies config.enabled in order until [payload] runs out. Channels reached
/// after the payload is exhausted leave the stanza untouched.
EmbedResult mux_embed(const Stanza& stanza, BitStream& payload, const ChannelConfig& config,
                      IdAllocator* ids = nullptr);

BitStream mux_extract(const Stanza& stanza, const ChannelConfig& config);

/// Bits the stanza can carry under [config] whatever their values. Some
/// channels change what later ones can use (removing type leaves nothing for
/// TypeCase), so this is the minimum over all bit choices.
std::size_t mux_capacity(const Stanza& stanza, const ChannelConfig& config);

}  // namespace xmppsteg

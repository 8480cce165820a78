#pragma once

// Synthetic chat traffic for experiments: clean sessions drawn from a corpus,
// stego sessions carrying a framed payload, and the receiver side.
//
// A session is one sender's outgoing stream. Clean messages always carry
// type='chat', a counter id and a trimmed corpus body, and never xml:lang.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xmppsteg/channels.hpp"
#include "xmppsteg/transcript.hpp"

namespace xmppsteg {

enum class IdScheme { HexCounter, NumericCounter };

/// Zero-padded counter ids. Successive ids increase by exactly one.
class IdGenerator {
public:
    explicit IdGenerator(IdScheme scheme = IdScheme::HexCounter, std::uint64_t start = 0x7df1ddbe, unsigned width = 8,
                         bool uppercase = false);

    /// Scheme, width and position of an existing counter id; nullopt when
    /// [id] is not a plain decimal or hexadecimal counter.
    static std::optional<IdGenerator> infer(std::string_view id);

    /// Throws IdExhausted when the counter no longer fits the width.
    std::string next();
    std::string peek() const;

    IdScheme scheme() const noexcept { return scheme_; }
    std::uint64_t value() const noexcept { return next_; }
    unsigned width() const noexcept { return width_; }

private:
    std::string format(std::uint64_t v) const;

    IdScheme scheme_;
    std::uint64_t next_;
    unsigned width_;
    bool uppercase_;
};

/// Spends ids rejected by the IdLsb channel on filler messages to a third
/// party, so that every generated id is used exactly once.
class DecoyScheduler {
public:
    DecoyScheduler(Jid decoy, std::vector<std::string> filler, std::uint64_t seed);

    void schedule(std::string id);
    /// Pending decoy messages in id order; empties the queue.
    std::vector<Stanza> drain(const Jid& from);

    const Jid& decoy() const noexcept { return decoy_; }
    std::size_t pending() const noexcept { return pending_.size(); }

private:
    Jid decoy_;
    std::vector<std::string> filler_;
    std::mt19937_64 rng_;
    std::deque<std::pair<std::string, std::string>> pending_;
};

struct HarnessOptions {
    Jid sender{"adam", "test.com", std::nullopt};
    Jid recipient{"bart", "test.com", std::nullopt};
    IdScheme id_scheme = IdScheme::HexCounter;
    std::uint64_t id_start = 0x7df1ddbe;
    unsigned id_width = 8;
};

inline const Jid kDefaultDecoy{"carl", "test.com", std::nullopt};

/// One message per non-blank line, trimmed. Throws EmptyCorpus.
std::vector<std::string> load_corpus(const std::filesystem::path& path);

/// Throws EmptyCorpus, or std::invalid_argument when n is 0.
SessionTranscript generate_clean(std::span<const std::string> corpus, std::size_t n, std::uint64_t seed,
                                 const HarnessOptions& options = {});

struct StegoOptions {
    std::optional<std::string> key;
    /// When set and IdLsb is enabled, rejected ids go to this JID.
    std::optional<Jid> decoy;
    /// Bodies for decoy messages; defaults to the cover transcript's bodies.
    std::vector<std::string> decoy_filler;
};

/// Hides [secret] in the cover session. Messages from the first sender to the
/// first recipient carry bits; with IdLsb enabled that sender's ids are
/// re-issued from a counter continuing the first id. Throws InsufficientCapacity.
SessionTranscript embed_transcript(const SessionTranscript& cover, std::string_view secret,
                                   const ChannelConfig& config, const StegoOptions& options = {});

SessionTranscript generate_stego(std::span<const std::string> corpus, std::size_t n, std::uint64_t seed,
                                 std::string_view secret, const ChannelConfig& config, const StegoOptions& options = {},
                                 const HarnessOptions& harness = {});

/// The most frequent (from, to) pair of the transcript; the covert pair when
/// the caller does not name one.
std::pair<Jid, Jid> dominant_pair(const SessionTranscript& transcript);

/// Reads bits from messages of the covert pair only. Throws BadMagic/Truncated.
std::string recover_payload(const SessionTranscript& transcript, const ChannelConfig& config,
                            const std::optional<std::string>& key = std::nullopt,
                            std::optional<std::pair<Jid, Jid>> pair = std::nullopt);

struct CapacityPlan {
    std::size_t available_bits = 0;
    std::size_t required_bits = 0;
    std::size_t carrier_messages = 0;
    bool fits() const noexcept { return available_bits >= required_bits; }
};

CapacityPlan plan_capacity(const SessionTranscript& transcript, const ChannelConfig& config, std::size_t secret_bytes);

}  // namespace xmppsteg

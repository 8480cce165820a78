#pragma once

// Passive wardens.
//
// The stateless warden checks each stanza against fixed validity rules:
//   R1  type, when present, is one of normal/chat/error/headline/groupchat in lower case
//   R2  xml:lang, when present, is a syntactically valid language tag
//   R3  the stanza is well-formed and has valid from/to JIDs
//
// The stateful warden additionally remembers the session:
//   H1  type or xml:lang presence toggles too often within a sliding window
//   H2  a sender's message ids stop behaving like a +1 counter
//   H3  the letter case of a sender's ids changes
//   H4  type or xml:lang values alternate in short runs
//
// Presence and value history is kept per unordered JID pair. Id history is
// kept per sending JID because a client numbers all its outgoing stanzas
// from one counter whatever the recipient.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xmppsteg/channels.hpp"
#include "xmppsteg/stanza.hpp"
#include "xmppsteg/transcript.hpp"

namespace xmppsteg {

struct WardenThresholds {
    std::size_t presence_window = 10;   // H1 window length
    std::size_t presence_toggles = 3;   // H1 fires at this many toggles in the window
    double id_irregular_fraction = 0.10; // H2 fires above this share of non +1 id steps
    std::uint64_t id_max_gap = 16;       // H2 fires on any single forward jump larger than this
    double value_min_mean_run = 3.0;     // H4 fires when the mean run length drops below this
    std::size_t min_history = 10;        // rate-based rules (H2 fraction, H4) wait for this many observations
};

WardenThresholds thresholds_from_json(const nlohmann::json& doc);
WardenThresholds load_thresholds(const std::filesystem::path& path);
nlohmann::json to_json(const WardenThresholds& t);

struct Flag {
    std::string rule;
    std::optional<ChannelId> hypothesis;
    std::string detail;
};

struct Verdict {
    std::size_t stanza_index = 0;
    std::vector<Flag> flags;

    bool suspicious() const noexcept { return !flags.empty(); }
};

Verdict scan_stateless(const Stanza& stanza, std::size_t index = 0);
/// Malformed bytes produce an R3 flag instead of an exception.
Verdict scan_stateless(std::string_view bytes, std::size_t index = 0);

/// Everything a stateful warden remembers about the traffic it has seen.
class SessionState {
public:
    struct PairHistory {
        std::vector<bool> type_present;
        std::vector<std::optional<std::string>> type_values;  // lower-cased
        std::vector<bool> lang_present;
        std::vector<std::optional<std::string>> lang_values;
        std::size_t size() const noexcept { return type_present.size(); }
    };

    struct SenderHistory {
        std::vector<std::string> ids;
        std::optional<bool> hex;           // counter base, fixed by the first parseable id
        std::optional<std::uint64_t> last; // last parsed counter value
        std::size_t steps = 0;
        std::size_t irregular_steps = 0;
        std::optional<bool> last_upper;    // case of the last id containing letters
    };

    const PairHistory* pair(const Jid& a, const Jid& b) const;
    const SenderHistory* sender(const Jid& from) const;
    std::size_t pairs() const noexcept { return pairs_.size(); }

private:
    friend Verdict scan_stateful(SessionState&, const Stanza&, const WardenThresholds&, std::size_t);

    std::map<std::pair<std::string, std::string>, PairHistory> pairs_;
    std::map<std::string, SenderHistory> senders_;
};

/// Records [stanza] in [state] and returns the stateless flags plus any
/// history-based flags it triggers.
Verdict scan_stateful(SessionState& state, const Stanza& stanza, const WardenThresholds& thresholds = {},
                      std::size_t index = 0);

enum class WardenMode { Stateless, Stateful };

std::string_view to_string(WardenMode mode);
std::optional<WardenMode> warden_mode_from_string(std::string_view name);

struct SessionReport {
    WardenMode mode = WardenMode::Stateless;
    WardenThresholds thresholds;
    std::size_t stanzas_scanned = 0;
    std::vector<Verdict> verdicts;
    std::map<ChannelId, bool> summary;  // every channel present as a key

    bool suspicious() const noexcept;
    std::size_t flagged_stanzas() const noexcept;
    bool detected(ChannelId id) const { return summary.at(id); }
};

SessionReport scan_transcript(const SessionTranscript& transcript, WardenMode mode,
                              const WardenThresholds& thresholds = {});

/// Dictionary channels are reported as not analyzed.
nlohmann::json to_json(const SessionReport& report);

}  // namespace xmppsteg

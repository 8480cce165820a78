#include "xmppsteg/harness.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

#include "xmppsteg/errors.hpp"
#include "xmppsteg/payload_codec.hpp"

namespace xmppsteg {

namespace {

constexpr std::uint64_t kDecoySeedSalt = 0x9e3779b97f4a7c15ULL;

std::string trim(std::string_view s) {
    auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    std::size_t b = 0, e = s.size();
    while (b < e && space(s[b])) ++b;
    while (e > b && space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

// Issues counter ids for IdLsb; rejected ids become decoy traffic when a
// scheduler is attached and are dropped (leaving gaps) otherwise.
class CounterAllocator final : public IdAllocator {
public:
    CounterAllocator(IdGenerator* gen, DecoyScheduler* decoys) : gen_(gen), decoys_(decoys) {}

    std::optional<std::string> next() override {
        if (!gen_) return std::nullopt;
        try {
            return gen_->next();
        } catch (const IdExhausted&) {
            return std::nullopt;
        }
    }

    void discard(const std::string& id) override {
        if (decoys_) decoys_->schedule(id);
    }

private:
    IdGenerator* gen_;
    DecoyScheduler* decoys_;
};

bool is_pair(const Stanza& s, const std::pair<Jid, Jid>& pair) {
    return s.from() == pair.first && s.to() == pair.second;
}

}  // namespace

IdGenerator::IdGenerator(IdScheme scheme, std::uint64_t start, unsigned width, bool uppercase)
    : scheme_(scheme), next_(start), width_(width), uppercase_(uppercase) {
    if (width == 0 || width > (scheme == IdScheme::HexCounter ? 16U : 19U))
        throw std::invalid_argument("id width out of range");
}

std::optional<IdGenerator> IdGenerator::infer(std::string_view id) {
    if (id.empty()) return std::nullopt;
    bool decimal = std::all_of(id.begin(), id.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (decimal) {
        if (id.size() > 19) return std::nullopt;
        return IdGenerator(IdScheme::NumericCounter, std::stoull(std::string(id)), static_cast<unsigned>(id.size()));
    }
    if (id.size() > 16) return std::nullopt;
    bool lower = false, upper = false;
    for (char c : id) {
        if (c >= 'a' && c <= 'f') lower = true;
        else if (c >= 'A' && c <= 'F') upper = true;
        else if (c < '0' || c > '9') return std::nullopt;
    }
    if (lower && upper) return std::nullopt;
    return IdGenerator(IdScheme::HexCounter, std::stoull(std::string(id), nullptr, 16),
                       static_cast<unsigned>(id.size()), upper);
}

std::string IdGenerator::format(std::uint64_t v) const {
    const unsigned base = scheme_ == IdScheme::HexCounter ? 16 : 10;
    const char* digits = uppercase_ ? "0123456789ABCDEF" : "0123456789abcdef";
    std::string out(width_, '0');
    for (std::size_t i = width_; i-- > 0;) {
        out[i] = digits[v % base];
        v /= base;
    }
    if (v != 0) throw IdExhausted("id counter overflowed its " + std::to_string(width_) + " digit width");
    return out;
}

std::string IdGenerator::next() {
    std::string id = format(next_);
    ++next_;
    return id;
}

std::string IdGenerator::peek() const { return format(next_); }

DecoyScheduler::DecoyScheduler(Jid decoy, std::vector<std::string> filler, std::uint64_t seed)
    : decoy_(std::move(decoy)), filler_(std::move(filler)), rng_(seed) {
    if (filler_.empty()) throw EmptyCorpus();
}

void DecoyScheduler::schedule(std::string id) {
    std::string body = filler_[rng_() % filler_.size()];
    pending_.emplace_back(std::move(id), std::move(body));
}

std::vector<Stanza> DecoyScheduler::drain(const Jid& from) {
    std::vector<Stanza> out;
    out.reserve(pending_.size());
    for (auto& [id, body] : pending_) {
        Stanza s(from, decoy_);
        s.set_type("chat");
        s.set_id(id);
        s.set_body_text(body);
        out.push_back(std::move(s));
    }
    pending_.clear();
    return out;
}

std::vector<std::string> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (!t.empty()) lines.push_back(std::move(t));
    }
    if (lines.empty()) throw EmptyCorpus();
    return lines;
}

SessionTranscript generate_clean(std::span<const std::string> corpus, std::size_t n, std::uint64_t seed,
                                 const HarnessOptions& options) {
    if (corpus.empty()) throw EmptyCorpus();
    if (n == 0) throw std::invalid_argument("a session needs at least one message");
    std::mt19937_64 rng(seed);
    IdGenerator ids(options.id_scheme, options.id_start, options.id_width);
    SessionTranscript t;
    t.seed = seed;
    t.messages.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Stanza s(options.sender, options.recipient);
        s.set_type("chat");
        s.set_id(ids.next());
        s.set_body_text(trim(corpus[rng() % corpus.size()]));
        t.messages.push_back(std::move(s));
    }
    t.participants = participants_of(t.messages);
    return t;
}

std::pair<Jid, Jid> dominant_pair(const SessionTranscript& transcript) {
    std::map<std::pair<Jid, Jid>, std::pair<std::size_t, std::size_t>> counts;  // -> (count, first index)
    for (std::size_t i = 0; i < transcript.messages.size(); ++i) {
        auto from = transcript.messages[i].from();
        auto to = transcript.messages[i].to();
        if (!from || !to) continue;
        auto [it, inserted] = counts.try_emplace({*from, *to}, 0, i);
        ++it->second.first;
    }
    if (counts.empty()) throw Error("transcript has no addressed messages");
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second.first > best->second.first ||
            (it->second.first == best->second.first && it->second.second < best->second.second))
            best = it;
    }
    return best->first;
}

SessionTranscript embed_transcript(const SessionTranscript& cover, std::string_view secret,
                                   const ChannelConfig& config, const StegoOptions& options) {
    config.validate();
    BitStream frame = frame_payload(secret, options.key);
    if (cover.messages.empty()) throw InsufficientCapacity(0, frame.size());

    const auto pair = dominant_pair(cover);
    const Jid& sender = pair.first;
    const bool id_channel =
        std::find(config.enabled.begin(), config.enabled.end(), ChannelId::IdLsb) != config.enabled.end();

    std::optional<IdGenerator> gen;
    std::optional<DecoyScheduler> decoys;
    if (id_channel) {
        for (const auto& m : cover.messages) {
            if (m.from() == sender && m.id()) {
                gen = IdGenerator::infer(*m.id());
                break;
            }
        }
        if (!gen) throw ConfigError("IdLsb needs a cover session with counter-style message ids");
        if (options.decoy) {
            std::vector<std::string> filler = options.decoy_filler;
            if (filler.empty())
                for (const auto& m : cover.messages)
                    if (m.body() && !m.body()->text().empty()) filler.push_back(m.body()->text());
            decoys.emplace(*options.decoy, std::move(filler), cover.seed ^ kDecoySeedSalt);
        }
    }
    CounterAllocator allocator(gen ? &*gen : nullptr, decoys ? &*decoys : nullptr);

    SessionTranscript out;
    out.seed = cover.seed;
    out.corpus_name = cover.corpus_name;
    out.messages.reserve(cover.messages.size());
    for (const auto& m : cover.messages) {
        Stanza s = m;
        const bool from_sender = s.from() == sender;
        if (id_channel && from_sender) {
            std::string id = gen->next();
            if (s.id() != id) s.set_id(id);
        }
        if (from_sender && s.to() == pair.second && !frame.at_end()) {
            s = mux_embed(s, frame, config, id_channel ? &allocator : nullptr).stanza;
            if (decoys)
                for (auto& d : decoys->drain(sender)) out.messages.push_back(std::move(d));
        }
        out.messages.push_back(std::move(s));
    }
    if (!frame.at_end()) throw InsufficientCapacity(frame.cursor(), frame.size());
    out.participants = participants_of(out.messages);
    return out;
}

SessionTranscript generate_stego(std::span<const std::string> corpus, std::size_t n, std::uint64_t seed,
                                 std::string_view secret, const ChannelConfig& config, const StegoOptions& options,
                                 const HarnessOptions& harness) {
    SessionTranscript cover = generate_clean(corpus, n, seed, harness);
    StegoOptions opts = options;
    if (opts.decoy && opts.decoy_filler.empty()) opts.decoy_filler.assign(corpus.begin(), corpus.end());
    return embed_transcript(cover, secret, config, opts);
}

std::string recover_payload(const SessionTranscript& transcript, const ChannelConfig& config,
                            const std::optional<std::string>& key, std::optional<std::pair<Jid, Jid>> pair) {
    if (!pair) pair = dominant_pair(transcript);
    BitStream bits;
    for (const auto& m : transcript.messages)
        if (is_pair(m, *pair)) bits.append(mux_extract(m, config));
    return deframe_payload(std::move(bits), key);
}

CapacityPlan plan_capacity(const SessionTranscript& transcript, const ChannelConfig& config,
                           std::size_t secret_bytes) {
    config.validate();
    CapacityPlan plan;
    plan.required_bits = frame_bit_length(secret_bytes);
    if (transcript.messages.empty()) return plan;
    const auto pair = dominant_pair(transcript);
    for (const auto& m : transcript.messages) {
        if (!is_pair(m, pair)) continue;
        ++plan.carrier_messages;
        plan.available_bits += mux_capacity(m, config);
    }
    return plan;
}

}  // namespace xmppsteg

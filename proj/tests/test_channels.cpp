#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "golden.hpp"
#include "support.hpp"
#include "xmppsteg/channels.hpp"
#include "xmppsteg/errors.hpp"

using namespace xmppsteg;
using testsupport::config_of;

namespace {

Stanza clean() { return Stanza::parse(golden::kClean); }

std::string embed_bits(ChannelId ch, const Stanza& s, const std::string& bits, const ChannelConfig& c = {},
                       IdAllocator* ids = nullptr) {
    BitStream b = BitStream::from_string(bits);
    return embed(ch, s, b, c, ids).stanza.serialize();
}

ChannelConfig dictionary_config() {
    ChannelConfig c;
    c.synonyms.add("Message.", {"Message.", "Msg."});
    c.misspellings.add("Message", {"Message", "Mesage"});
    return c;
}

}  // namespace

TEST_CASE("golden embeddings on the clean message") {
    ChannelConfig dict = dictionary_config();
    CHECK(embed_bits(ChannelId::TypeCase, clean(), "1") == golden::kTypeCase);
    CHECK(embed_bits(ChannelId::TypeValue, clean(), "1") == golden::kTypeValue);
    CHECK(embed_bits(ChannelId::TypePresence, clean(), "1") == golden::kTypePresence);
    CHECK(embed_bits(ChannelId::IdLsb, clean(), "1") == golden::kIdLsb);
    CHECK(embed_bits(ChannelId::IdCase, clean(), "1") == golden::kIdCase);
    CHECK(embed_bits(ChannelId::XmlLangPresence, clean(), "1") == golden::kLangPresence);
    CHECK(embed_bits(ChannelId::LeadingSpace, clean(), "1") == golden::kLeadingSpace);
    CHECK(embed_bits(ChannelId::Synonym, clean(), "1", dict) == golden::kSynonym);
    CHECK(embed_bits(ChannelId::SpellingMistake, clean(), "1", dict) == golden::kSpelling);
    // xml:lang value works on a body that already carries a tag
    CHECK(embed_bits(ChannelId::XmlLangValue, Stanza::parse(golden::kLangPresence), "1") == golden::kLangValue);
    CHECK(embed_bits(ChannelId::XmlLangValue, clean(), "1") == golden::kLangValue);
}

TEST_CASE("golden extractions") {
    ChannelConfig dict = dictionary_config();
    auto bit = [&](ChannelId ch, std::string_view bytes) {
        return extract(ch, Stanza::parse(bytes), dict).to_string();
    };
    CHECK(bit(ChannelId::TypeCase, golden::kTypeCase) == "1");
    CHECK(bit(ChannelId::TypeCase, golden::kClean) == "0");
    CHECK(bit(ChannelId::TypeValue, golden::kTypeValue) == "1");
    CHECK(bit(ChannelId::TypePresence, golden::kTypePresence) == "1");
    CHECK(bit(ChannelId::IdLsb, golden::kIdLsb) == "1");
    CHECK(bit(ChannelId::IdLsb, golden::kClean) == "0");
    CHECK(bit(ChannelId::IdCase, golden::kIdCase) == "1");
    CHECK(bit(ChannelId::XmlLangPresence, golden::kLangPresence) == "1");
    CHECK(bit(ChannelId::XmlLangValue, golden::kLangValue) == "1");
    CHECK(bit(ChannelId::LeadingSpace, golden::kLeadingSpace) == "1");
    CHECK(bit(ChannelId::LeadingSpace, golden::kClean) == "0");
    CHECK(bit(ChannelId::Synonym, golden::kSynonym) == "1");
    CHECK(bit(ChannelId::SpellingMistake, golden::kSpelling) == "1");
}

TEST_CASE("IdLsb discards ids whose last bit is wrong") {
    SuccessorIdAllocator ids("7df1ddbe");
    CHECK(embed_bits(ChannelId::IdLsb, clean(), "1", {}, &ids) == golden::kIdLsb);
    CHECK(ids.discarded() == std::vector<std::string>{"7df1ddbe"});

    SuccessorIdAllocator none("ffffffff");
    Stanza s = Stanza::parse("<message from='a@x' to='b@x' id='ffffffff'/>");
    CHECK_THROWS_AS(embed_bits(ChannelId::IdLsb, s, "0", {}, &none), IdExhausted);
}

TEST_CASE("successor ids keep width and case") {
    CHECK(successor_id("7df1ddbe") == "7df1ddbf");
    CHECK(successor_id("7df1ddbf") == "7df1ddc0");
    CHECK(successor_id("7DF1DDBF") == "7DF1DDC0");
    CHECK(successor_id("0099") == "0100");
    CHECK(successor_id("msg-0f") == "msg-10");
    CHECK(!successor_id("ffff"));
    CHECK(!successor_id("999"));
    CHECK(!successor_id("xyz"));
}

TEST_CASE("capacity examples") {
    Stanza s = clean();
    CHECK(capacity(ChannelId::LeadingSpace, s, {}) == 1);
    CHECK(capacity(ChannelId::TrailingSpace, s, {}) == 1);
    CHECK(capacity(ChannelId::TypeValue, s, {}) == 1);
    ChannelConfig two;
    two.type_value_two_bits = true;
    CHECK(capacity(ChannelId::TypeValue, s, two) == 2);
    Stanza hello = Stanza::parse("<message from='a@x' to='b@x'><body>Hello</body></message>");
    CHECK(capacity(ChannelId::Synonym, hello, {}) == 0);
    CHECK(capacity(ChannelId::TypeCase, hello, {}) == 0);
    CHECK(capacity(ChannelId::IdLsb, hello, {}) == 0);
    Stanza digits = Stanza::parse("<message from='a@x' to='b@x' id='1234'/>");
    CHECK(capacity(ChannelId::IdCase, digits, {}) == 0);
    CHECK(capacity(ChannelId::XmlLangPresence, digits, {}) == 0);
    CHECK(capacity(ChannelId::LeadingSpace, digits, {}) == 0);
    Stanza blank = Stanza::parse("<message from='a@x' to='b@x'><body>  </body></message>");
    CHECK(capacity(ChannelId::TrailingSpace, blank, {}) == 0);
    CHECK_THROWS_AS(embed_bits(ChannelId::TrailingSpace, blank, "1"), NoCapacity);
    BitStream empty;
    CHECK_THROWS_AS(embed(ChannelId::TypePresence, s, empty, {}), NoCapacity);
}

TEST_CASE("two-bit type value uses the four-word alphabet") {
    ChannelConfig c;
    c.type_value_two_bits = true;
    const char* words[] = {"chat", "normal", "headline", "error"};
    const char* codes[] = {"00", "01", "10", "11"};
    for (int i = 0; i < 4; ++i) {
        BitStream b = BitStream::from_string(codes[i]);
        auto r = embed(ChannelId::TypeValue, clean(), b, c);
        CHECK(r.consumed == 2);
        CHECK(r.stanza.type() == words[i]);
        CHECK(extract(ChannelId::TypeValue, r.stanza, c).to_string() == codes[i]);
    }
}

TEST_CASE("embedding a zero on a zero-state stanza changes nothing") {
    ChannelConfig dict = dictionary_config();
    for (ChannelId ch : kAllChannels) {
        if (ch == ChannelId::XmlLangValue) continue;  // bit 0 still writes the first tag
        CAPTURE(to_string(ch));
        Stanza s = clean();
        BitStream zero = BitStream::from_string("0");
        auto r = embed(ch, s, zero, dict);
        CHECK(r.consumed == 1);
        CHECK(r.stanza.serialize() == golden::kClean);
        CHECK(r.stanza.raw());  // untouched, not rebuilt
    }
}

TEST_CASE("mux over presence and space channels for all sixteen payloads") {
    ChannelConfig c = config_of({ChannelId::TypePresence, ChannelId::XmlLangPresence, ChannelId::LeadingSpace,
                                 ChannelId::TrailingSpace});
    for (unsigned p = 0; p < 16; ++p) {
        std::string bits;
        for (int i = 3; i >= 0; --i) bits += ((p >> i) & 1) ? '1' : '0';
        CAPTURE(bits);
        // expected bytes built by hand from the bit meanings
        std::string expected = "<message from='adam@test.com' to='bart@test.com'";
        if (bits[0] == '0') expected += " type='chat'";
        expected += "\nid='7df1ddbe'><body";
        if (bits[1] == '1') expected += " xml:lang='en'";
        expected += ">";
        if (bits[2] == '1') expected += " ";
        expected += "Message.";
        if (bits[3] == '1') expected += " ";
        expected += "</body></message>";

        BitStream payload = BitStream::from_string(bits);
        auto r = mux_embed(clean(), payload, c);
        CHECK(r.consumed == 4);
        CHECK(r.stanza.serialize() == expected);
        CHECK(mux_extract(Stanza::parse(expected), c).to_string() == bits);
    }
}

TEST_CASE("mux edge cases") {
    BitStream payload = BitStream::from_string("1");
    auto r = mux_embed(clean(), payload, config_of({}));
    CHECK(r.consumed == 0);
    CHECK(r.stanza.serialize() == golden::kClean);

    BitStream one = BitStream::from_string("1");
    CHECK(mux_embed(clean(), one, config_of({ChannelId::IdLsb})).stanza.serialize() == golden::kIdLsb);
    CHECK(mux_extract(Stanza::parse(golden::kIdLsb), config_of({ChannelId::IdLsb})).to_string() == "1");
    CHECK(mux_extract(clean(), config_of({ChannelId::LeadingSpace})).to_string() == "0");

    // payload shorter than capacity: later channels untouched
    BitStream two = BitStream::from_string("11");
    auto partial = mux_embed(clean(), two, config_of({ChannelId::LeadingSpace, ChannelId::TrailingSpace,
                                                      ChannelId::TypePresence}));
    CHECK(partial.consumed == 2);
    CHECK(partial.stanza.type() == "chat");
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(config_of({ChannelId::TypePresence, ChannelId::TypeCase, ChannelId::IdLsb, ChannelId::IdCase})
                      .validate());
    CHECK_THROWS_AS(config_of({ChannelId::IdLsb, ChannelId::IdLsb}).validate(), ConfigError);
    CHECK_THROWS_AS(config_of({ChannelId::TypePresence, ChannelId::TypeValue}).validate(), ConfigError);
    CHECK_THROWS_AS(config_of({ChannelId::XmlLangValue, ChannelId::XmlLangPresence}).validate(), ConfigError);
    CHECK_THROWS_AS(config_of({ChannelId::TypeCase, ChannelId::TypePresence}).validate(), ConfigError);
    CHECK_THROWS_AS(config_of({ChannelId::TypeCase, ChannelId::TypeValue}).validate(), ConfigError);
    CHECK_THROWS_AS(config_of({ChannelId::IdCase, ChannelId::IdLsb}).validate(), ConfigError);

    ChannelConfig lang = config_of({ChannelId::XmlLangValue});
    lang.lang_pair = {"en", "en"};
    CHECK_THROWS_AS(lang.validate(), ConfigError);

    ChannelConfig overlap = config_of({ChannelId::Synonym, ChannelId::SpellingMistake});
    overlap.synonyms.add("Message.", {"Message.", "Msg."});
    overlap.misspellings.add("Message", {"Message", "Mesage"});
    CHECK_THROWS_AS(overlap.validate(), ConfigError);

    VariantDictionary d;
    CHECK_THROWS_AS(d.add("x", {"x"}), ConfigError);
    CHECK_THROWS_AS(d.add("x", {"x", "two words"}), ConfigError);
    d.add("you", {"you", "u"});
    CHECK_THROWS_AS(d.add("yes", {"yes", "u"}), ConfigError);
}

TEST_CASE("channel names and catalog") {
    for (ChannelId id : kAllChannels) {
        CHECK(channel_from_string(to_string(id)) == id);
        CHECK(channel_spec(id).id == id);
    }
    CHECK(!channel_from_string("typepresence"));
    CHECK(channel_spec(ChannelId::TypeCase).stateless_detectable);
    CHECK(channel_spec(ChannelId::TypePresence).stateful_detectable);
    CHECK(!channel_spec(ChannelId::LeadingSpace).stateful_detectable);
    CHECK(!channel_spec(ChannelId::TypeCase).recommended);
    CHECK(channel_catalog().size() == kAllChannels.size());
}

namespace {

enum class Carrier { Type, Id, Lang, Body };

Carrier carrier_of(ChannelId id) {
    switch (id) {
    case ChannelId::TypePresence:
    case ChannelId::TypeValue:
    case ChannelId::TypeCase: return Carrier::Type;
    case ChannelId::IdLsb:
    case ChannelId::IdCase: return Carrier::Id;
    case ChannelId::XmlLangPresence:
    case ChannelId::XmlLangValue: return Carrier::Lang;
    default: return Carrier::Body;
    }
}

ChannelConfig rich_dictionaries() {
    ChannelConfig c;
    c.synonyms.add("Message.", {"Message.", "Msg."});
    c.misspellings.add("see", {"see", "sea"});
    return c;
}

}  // namespace

TEST_CASE("embedding on one channel leaves every other carrier alone") {
    ChannelConfig c = rich_dictionaries();
    const std::string base_bytes =
        "<message from='adam@test.com' to='bart@test.com' type='chat' id='7df1ddbe'><body xml:lang='en'>Message. "
        "see you</body></message>";
    for (ChannelId x : kAllChannels) {
        for (const char* bit : {"0", "1"}) {
            Stanza base = Stanza::parse(base_bytes);
            BitStream b = BitStream::from_string(bit);
            Stanza after = embed(x, base, b, c).stanza;
            for (ChannelId y : kAllChannels) {
                if (y == x) continue;
                if (carrier_of(x) == carrier_of(y) && carrier_of(x) != Carrier::Body) continue;
                CAPTURE(to_string(x));
                CAPTURE(to_string(y));
                CHECK(capacity(y, after, c) == capacity(y, base, c));
                CHECK(extract(y, after, c) == extract(y, base, c));
            }
        }
    }
}

TEST_CASE("embedded stanzas stay well-formed and valid") {
    static const std::set<std::string> legal = {"normal", "chat", "error", "headline", "groupchat"};
    ChannelConfig c = rich_dictionaries();
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        Stanza s = Stanza::parse(testsupport::random_stanza_bytes(rng));
        for (ChannelId ch : kAllChannels) {
            if (capacity(ch, s, c) == 0) continue;
            BitStream b = BitStream::from_string(rng() % 2 ? "11" : "00");
            Stanza out = embed(ch, s, b, c).stanza;
            Stanza reparsed = Stanza::parse(out.serialize());
            CHECK(reparsed.serialize() == out.serialize());
            if (ch == ChannelId::TypeCase) continue;
            const bool was_valid = !s.type() || legal.contains(*s.type());
            if (was_valid && reparsed.type()) CHECK(legal.contains(*reparsed.type()));
        }
    }
}

TEST_CASE("random stanzas and configs round-trip and report honest capacity") {
    ChannelConfig dicts = rich_dictionaries();
    std::mt19937_64 rng(17);
    std::vector<ChannelId> all(kAllChannels.begin(), kAllChannels.end());
    int checked = 0;
    while (checked < 3000) {
        std::shuffle(all.begin(), all.end(), rng);
        ChannelConfig c = rich_dictionaries();
        c.type_value_two_bits = rng() % 2;
        c.enabled.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(1 + rng() % all.size()));
        try {
            c.validate();
        } catch (const ConfigError&) {
            continue;
        }
        ++checked;
        Stanza s = Stanza::parse(testsupport::random_stanza_bytes(rng));
        const std::size_t cap = mux_capacity(s, c);
        BitStream payload;
        for (std::size_t i = 0; i < cap; ++i) payload.push(rng() % 2);
        auto r = mux_embed(s, payload, c);
        CHECK(r.consumed == cap);
        BitStream got = mux_extract(Stanza::parse(r.stanza.serialize()), c);
        CHECK(got.size() >= cap);
        CHECK(got.to_string().substr(0, cap) == payload.to_string());
    }
}

TEST_CASE("capacity counts only bits every payload can use") {
    // removing type (bit 1) leaves TypeCase nothing to work with
    CHECK(mux_capacity(clean(), config_of({ChannelId::TypePresence, ChannelId::TypeCase})) == 1);
    CHECK(mux_capacity(clean(), config_of({ChannelId::TypeValue, ChannelId::TypeCase})) == 2);
    CHECK(mux_capacity(clean(), config_of({ChannelId::IdLsb, ChannelId::IdCase, ChannelId::LeadingSpace,
                                           ChannelId::TrailingSpace, ChannelId::XmlLangPresence})) == 5);
    // an all-digit id only gains a letter for some bit values
    Stanza digits = Stanza::parse("<message from='a@x' to='b@x' id='00000009'><body>x</body></message>");
    CHECK(mux_capacity(digits, config_of({ChannelId::IdLsb, ChannelId::IdCase})) == 1);
}

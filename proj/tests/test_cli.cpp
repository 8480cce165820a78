#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "support.hpp"
#include "xmppsteg/channel_config.hpp"
#include "xmppsteg/entropy.hpp"
#include "xmppsteg/harness.hpp"
#include "xmppsteg/warden.hpp"

using namespace xmppsteg;
using testsupport::TempDir;
using testsupport::read_text;
using testsupport::write_text;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "xmppsteg");
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string corpus_path() { return (testsupport::data_dir() / "chat_corpus.txt").string(); }

}  // namespace

TEST_CASE("simulate, embed and extract end to end") {
    TempDir dir;
    const std::string secret = "s\x00ecret\xff bytes";
    write_text(dir / "s.bin", std::string(secret.data(), 14));
    write_text(dir / "cfg.json", R"({"enabled": ["IdLsb", "XmlLangPresence", "TypePresence", "LeadingSpace"]})");
    auto p = [&](const char* name) { return (dir / name).string(); };

    auto sim = run({"simulate", "--corpus", corpus_path(), "--n", "200", "--seed", "7", "--out", p("clean.xml")});
    REQUIRE(sim.code == 0);
    CHECK(read_text(p("clean.xml")) == transcript_bytes(generate_clean(testsupport::corpus(), 200, 7)));

    auto emb = run({"embed", "--in", p("clean.xml"), "--secret-file", p("s.bin"), "--channels", p("cfg.json"), "--out",
                    p("stego.xml")});
    REQUIRE(emb.code == 0);
    auto cfg = load_channel_config(p("cfg.json"));
    auto lib = embed_transcript(load_transcript(p("clean.xml")), read_text(p("s.bin")), cfg);
    CHECK(read_text(p("stego.xml")) == transcript_bytes(lib));

    auto ext = run({"extract", "--in", p("stego.xml"), "--channels", p("cfg.json")});
    CHECK(ext.code == 0);
    CHECK(ext.out == read_text(p("s.bin")));

    CHECK(run({"extract", "--in", p("stego.xml"), "--channels", p("cfg.json"), "--out", p("got.bin")}).code == 0);
    CHECK(read_text(p("got.bin")) == read_text(p("s.bin")));
    CHECK(run({"extract", "--in", p("stego.xml"), "--channels", p("cfg.json"), "--from", "adam@test.com", "--to",
               "bart@test.com"}).out == read_text(p("s.bin")));
}

TEST_CASE("simulate can write the stego side with a key and decoy") {
    TempDir dir;
    auto p = [&](const char* name) { return (dir / name).string(); };
    write_text(dir / "s.bin", "Hello");
    write_text(dir / "key", "passphrase");
    write_text(dir / "cfg.json", R"({"enabled": ["IdLsb"]})");
    auto r = run({"simulate", "--n", "120", "--seed", "3", "--out", p("c.xml"), "--stego-out", p("s.xml"),
                  "--secret-file", p("s.bin"), "--channels", p("cfg.json"), "--key-file", p("key"), "--decoy",
                  "carl@test.com"});
    REQUIRE(r.code == 0);
    StegoOptions opts;
    opts.key = "passphrase";
    opts.decoy = kDefaultDecoy;
    auto lib = generate_stego(testsupport::corpus(), 120, 3, "Hello", testsupport::config_of({ChannelId::IdLsb}), opts);
    CHECK(read_text(p("s.xml")) == transcript_bytes(lib));
    CHECK(run({"extract", "--in", p("s.xml"), "--channels", p("cfg.json"), "--key-file", p("key")}).out == "Hello");
    CHECK(run({"scan", "--mode", "stateful", p("s.xml")}).code == 0);
}

TEST_CASE("scan exit codes and reports") {
    TempDir dir;
    auto p = [&](const char* name) { return (dir / name).string(); };
    write_text(dir / "s.bin", "TypeCase test");
    write_text(dir / "cfg.json", R"({"enabled": ["TypeCase"]})");
    REQUIRE(run({"simulate", "--n", "200", "--seed", "1", "--out", p("clean.xml"), "--stego-out", p("tc.xml"),
                 "--secret-file", p("s.bin"), "--channels", p("cfg.json")}).code == 0);

    auto stego = run({"scan", "--mode", "stateless", p("tc.xml")});
    CHECK(stego.code == 2);
    CHECK(stego.out.find("TypeCase         yes") != std::string::npos);
    CHECK(run({"scan", "--mode", "stateless", p("clean.xml")}).code == 0);

    auto json_run = run({"scan", "--mode", "stateless", "--json", p("tc.xml")});
    CHECK(json_run.code == 2);
    auto lib = scan_transcript(load_transcript(p("tc.xml")), WardenMode::Stateless);
    CHECK(nlohmann::json::parse(json_run.out) == to_json(lib));
    CHECK(nlohmann::json::parse(json_run.out)["summary"]["TypeCase"] == true);

    write_text(dir / "th.json", R"({"presence_toggles": 100})");
    auto th = run({"scan", "--mode", "stateful", "--thresholds", p("th.json"), "--json", p("clean.xml")});
    CHECK(nlohmann::json::parse(th.out)["thresholds"]["presence_toggles"] == 100);
    CHECK(run({"scan", "--mode", "paranoid", p("clean.xml")}).code == 64);
}

TEST_CASE("entropy and capacity match the library") {
    TempDir dir;
    auto p = [&](const char* name) { return (dir / name).string(); };
    write_text(dir / "s.bin", "0123456789");
    write_text(dir / "cfg.json", R"({"enabled": ["XmlLangPresence"]})");
    REQUIRE(run({"simulate", "--n", "300", "--seed", "2", "--out", p("clean.xml"), "--stego-out", p("lang.xml"),
                 "--secret-file", p("s.bin"), "--channels", p("cfg.json")}).code == 0);

    auto control = load_transcript(p("clean.xml"));
    auto variant = load_transcript(p("lang.xml"));
    auto cmp = compare_sessions(control, {{"lang", variant}});
    auto text = run({"entropy", "--control", p("clean.xml"), "--variant", "lang=" + p("lang.xml")});
    CHECK(text.code == 0);
    CHECK(text.out == format_entropy_table(cmp));
    auto js = run({"entropy", "--control", p("clean.xml"), "--variant", "lang=" + p("lang.xml"), "--json"});
    CHECK(nlohmann::json::parse(js.out) == to_json(cmp));
    CHECK(run({"entropy", "--control", p("clean.xml"), "--variant", p("lang.xml")}).code == 64);

    auto plan = plan_capacity(control, load_channel_config(p("cfg.json")), 10);
    auto cap = run({"capacity", "--in", p("clean.xml"), "--channels", p("cfg.json"), "--secret-file", p("s.bin"), "--json"});
    CHECK(cap.code == 0);
    auto doc = nlohmann::json::parse(cap.out);
    CHECK(doc["available_bits"] == plan.available_bits);
    CHECK(doc["required_bits"] == plan.required_bits);
    CHECK(doc["fits"] == true);
    auto human = run({"capacity", "--in", p("clean.xml"), "--channels", p("cfg.json"), "--bytes", "1000"});
    CHECK(human.out.find("fits:             no") != std::string::npos);
}

TEST_CASE("usage and data errors") {
    TempDir dir;
    auto p = [&](const char* name) { return (dir / name).string(); };
    CHECK(run({}).code == 64);
    CHECK(run({"frobnicate"}).code == 64);
    CHECK(run({"embed", "--in", p("missing.xml")}).code == 64);
    CHECK(run({"--help"}).code == 0);

    write_text(dir / "cfg.json", R"({"enabled": ["TypePresence"]})");
    write_text(dir / "big.bin", std::string(500, 'x'));
    REQUIRE(run({"simulate", "--n", "20", "--out", p("clean.xml")}).code == 0);
    auto short_cover = run({"embed", "--in", p("clean.xml"), "--secret-file", p("big.bin"), "--channels",
                            p("cfg.json"), "--out", p("x.xml")});
    CHECK(short_cover.code == 65);
    CHECK(short_cover.err.find("insufficient capacity") != std::string::npos);
    CHECK(run({"extract", "--in", p("clean.xml"), "--channels", p("cfg.json")}).code == 65);

    write_text(dir / "bad.json", R"({"enabled": ["Nope"]})");
    CHECK(run({"extract", "--in", p("clean.xml"), "--channels", p("bad.json")}).code == 65);
    write_text(dir / "junk.xml", "<message from='a@x'\n");
    CHECK(run({"scan", p("junk.xml")}).code == 65);
}

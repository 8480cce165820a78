#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "xmppsteg/channel_config.hpp"
#include "xmppsteg/entropy.hpp"
#include "xmppsteg/errors.hpp"
#include "xmppsteg/harness.hpp"
#include "xmppsteg/payload_codec.hpp"
#include "xmppsteg/transcript.hpp"
#include "xmppsteg/warden.hpp"

#ifndef XMPPSTEG_DEFAULT_CORPUS
#define XMPPSTEG_DEFAULT_CORPUS "data/chat_corpus.txt"
#endif

namespace xmppsteg::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::optional<std::string> read_key(const std::string& path) {
    if (path.empty()) return std::nullopt;
    return read_file(path);
}

Jid parse_jid(const std::string& text) {
    auto jid = Jid::parse(text);
    if (!jid) throw UsageError("not a valid JID: " + text);
    return *jid;
}

struct SimulateArgs {
    std::string corpus = XMPPSTEG_DEFAULT_CORPUS;
    std::size_t n = 200;
    std::uint64_t seed = 0;
    std::string out, stego_out, secret_file, channels, key_file, decoy;
};

struct EmbedArgs {
    std::string in, secret_file, channels, out, key_file, decoy;
};

struct ExtractArgs {
    std::string in, channels, key_file, from, to, out;
};

struct ScanArgs {
    std::string transcript, mode = "stateful", thresholds;
    bool json = false;
};

struct EntropyArgs {
    std::string control;
    std::vector<std::string> variants;
    bool json = false;
};

struct CapacityArgs {
    std::string in, channels, secret_file;
    std::optional<std::size_t> bytes;
    bool json = false;
};

StegoOptions stego_options(const std::string& key_file, const std::string& decoy) {
    StegoOptions opts;
    opts.key = read_key(key_file);
    if (!decoy.empty()) opts.decoy = parse_jid(decoy);
    return opts;
}

int do_simulate(const SimulateArgs& a, std::ostream& out) {
    if (!a.stego_out.empty() && (a.secret_file.empty() || a.channels.empty()))
        throw UsageError("--stego-out needs --secret-file and --channels");
    auto corpus = load_corpus(a.corpus);
    auto clean = generate_clean(corpus, a.n, a.seed);
    clean.corpus_name = std::filesystem::path(a.corpus).filename().string();
    save_transcript(a.out, clean);
    out << "wrote " << clean.messages.size() << " messages to " << a.out << '\n';
    if (!a.stego_out.empty()) {
        auto config = load_channel_config(a.channels);
        StegoOptions opts = stego_options(a.key_file, a.decoy);
        if (opts.decoy) opts.decoy_filler = corpus;
        auto stego = embed_transcript(clean, read_file(a.secret_file), config, opts);
        save_transcript(a.stego_out, stego);
        out << "wrote " << stego.messages.size() << " messages to " << a.stego_out << '\n';
    }
    return kExitOk;
}

int do_embed(const EmbedArgs& a, std::ostream& out) {
    auto cover = load_transcript(a.in);
    auto config = load_channel_config(a.channels);
    auto stego = embed_transcript(cover, read_file(a.secret_file), config, stego_options(a.key_file, a.decoy));
    save_transcript(a.out, stego);
    out << "wrote " << stego.messages.size() << " messages to " << a.out << '\n';
    return kExitOk;
}

int do_extract(const ExtractArgs& a, std::ostream& out) {
    if (a.from.empty() != a.to.empty()) throw UsageError("--from and --to must be given together");
    auto transcript = load_transcript(a.in);
    auto config = load_channel_config(a.channels);
    std::optional<std::pair<Jid, Jid>> pair;
    if (!a.from.empty()) pair.emplace(parse_jid(a.from), parse_jid(a.to));
    std::string secret = recover_payload(transcript, config, read_key(a.key_file), pair);
    if (a.out.empty()) out.write(secret.data(), static_cast<std::streamsize>(secret.size()));
    else write_file(a.out, secret);
    return kExitOk;
}

void print_report(const SessionReport& r, std::ostream& out) {
    out << "mode: " << to_string(r.mode) << "  stanzas: " << r.stanzas_scanned
        << "  flagged: " << r.flagged_stanzas() << '\n';
    out << "Channel          Detected\n";
    for (ChannelId id : kAllChannels) {
        std::string name(to_string(id));
        name.resize(17, ' ');
        const char* verdict = (id == ChannelId::Synonym || id == ChannelId::SpellingMistake)
                                  ? "not analyzed"
                                  : (r.detected(id) ? "yes" : "no");
        out << name << verdict << '\n';
    }
    std::size_t shown = 0;
    for (const auto& v : r.verdicts) {
        if (!v.suspicious()) continue;
        if (shown++ == 20) {
            out << "...\n";
            break;
        }
        for (const auto& f : v.flags) out << "stanza " << v.stanza_index << ": " << f.rule << ": " << f.detail << '\n';
    }
}

int do_scan(const ScanArgs& a, std::ostream& out) {
    auto mode = warden_mode_from_string(a.mode);
    if (!mode) throw UsageError("--mode must be stateless or stateful");
    WardenThresholds t = a.thresholds.empty() ? WardenThresholds{} : load_thresholds(a.thresholds);
    auto report = scan_transcript(load_transcript(a.transcript), *mode, t);
    if (a.json) out << to_json(report).dump(2) << '\n';
    else print_report(report, out);
    return report.suspicious() ? kExitSuspicious : kExitOk;
}

int do_entropy(const EntropyArgs& a, std::ostream& out) {
    std::vector<std::pair<std::string, SessionTranscript>> variants;
    for (const auto& arg : a.variants) {
        auto eq = arg.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size())
            throw UsageError("--variant expects name=path, got " + arg);
        variants.emplace_back(arg.substr(0, eq), load_transcript(arg.substr(eq + 1)));
    }
    auto cmp = compare_sessions(load_transcript(a.control), variants);
    if (a.json) out << to_json(cmp).dump(2) << '\n';
    else out << format_entropy_table(cmp);
    return kExitOk;
}

int do_capacity(const CapacityArgs& a, std::ostream& out) {
    if (!a.secret_file.empty() && a.bytes) throw UsageError("give either --secret-file or --bytes");
    std::size_t bytes = a.bytes.value_or(0);
    if (!a.secret_file.empty()) bytes = read_file(a.secret_file).size();
    auto plan = plan_capacity(load_transcript(a.in), load_channel_config(a.channels), bytes);
    if (a.json) {
        nlohmann::json doc{{"available_bits", plan.available_bits},
                           {"required_bits", plan.required_bits},
                           {"carrier_messages", plan.carrier_messages},
                           {"max_payload_bytes", plan.available_bits >= kFrameHeaderBits
                                                     ? (plan.available_bits - kFrameHeaderBits) / 8
                                                     : 0},
                           {"fits", plan.fits()}};
        out << doc.dump(2) << '\n';
    } else {
        out << "carrier messages: " << plan.carrier_messages << '\n'
            << "available bits:   " << plan.available_bits << '\n'
            << "required bits:    " << plan.required_bits << '\n'
            << "fits:             " << (plan.fits() ? "yes" : "no") << '\n';
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Covert channels in XMPP message stanzas: embedding, wardens and entropy analysis", "xmppsteg"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "generate a clean transcript (and optionally a stego one)");
    simulate->add_option("--corpus", sim.corpus, "chat corpus, one message per line")->check(CLI::ExistingFile);
    simulate->add_option("--n", sim.n, "messages per session")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim.seed, "RNG seed");
    simulate->add_option("--out", sim.out, "clean transcript to write")->required();
    simulate->add_option("--stego-out", sim.stego_out, "stego transcript to write");
    simulate->add_option("--secret-file", sim.secret_file)->check(CLI::ExistingFile);
    simulate->add_option("--channels", sim.channels, "channel config JSON")->check(CLI::ExistingFile);
    simulate->add_option("--key-file", sim.key_file)->check(CLI::ExistingFile);
    simulate->add_option("--decoy", sim.decoy, "JID that receives rejected ids");

    EmbedArgs emb;
    auto* embed = app.add_subcommand("embed", "hide a secret in a clean transcript");
    embed->add_option("--in", emb.in)->required()->check(CLI::ExistingFile);
    embed->add_option("--secret-file", emb.secret_file)->required()->check(CLI::ExistingFile);
    embed->add_option("--channels", emb.channels)->required()->check(CLI::ExistingFile);
    embed->add_option("--out", emb.out)->required();
    embed->add_option("--key-file", emb.key_file)->check(CLI::ExistingFile);
    embed->add_option("--decoy", emb.decoy);

    ExtractArgs ext;
    auto* extract = app.add_subcommand("extract", "recover a secret from a stego transcript");
    extract->add_option("--in", ext.in)->required()->check(CLI::ExistingFile);
    extract->add_option("--channels", ext.channels)->required()->check(CLI::ExistingFile);
    extract->add_option("--key-file", ext.key_file)->check(CLI::ExistingFile);
    extract->add_option("--from", ext.from, "sender of the covert pair");
    extract->add_option("--to", ext.to, "recipient of the covert pair");
    extract->add_option("--out", ext.out, "write the secret here instead of stdout");

    ScanArgs sc;
    auto* scan = app.add_subcommand("scan", "run a passive warden over a transcript (exit 2 when suspicious)");
    scan->add_option("transcript", sc.transcript)->required()->check(CLI::ExistingFile);
    scan->add_option("--mode", sc.mode)->check(CLI::IsMember({"stateless", "stateful"}));
    scan->add_option("--thresholds", sc.thresholds)->check(CLI::ExistingFile);
    scan->add_flag("--json", sc.json);

    EntropyArgs en;
    auto* entropy = app.add_subcommand("entropy", "compare byte statistics of stego sessions with a control");
    entropy->add_option("--control", en.control)->required()->check(CLI::ExistingFile);
    entropy->add_option("--variant", en.variants, "name=transcript")->required();
    entropy->add_flag("--json", en.json);

    CapacityArgs cap;
    auto* capacity = app.add_subcommand("capacity", "bits available in a transcript versus bits required");
    capacity->add_option("--in", cap.in)->required()->check(CLI::ExistingFile);
    capacity->add_option("--channels", cap.channels)->required()->check(CLI::ExistingFile);
    capacity->add_option("--secret-file", cap.secret_file)->check(CLI::ExistingFile);
    capacity->add_option("--bytes", cap.bytes, "secret length in bytes");
    capacity->add_flag("--json", cap.json);

    // CLI11 takes the arguments reversed and without the program name.
    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty()) rest.pop_back();
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*simulate) return do_simulate(sim, out);
        if (*embed) return do_embed(emb, out);
        if (*extract) return do_extract(ext, out);
        if (*scan) return do_scan(sc, out);
        if (*entropy) return do_entropy(en, out);
        return do_capacity(cap, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace xmppsteg::cli

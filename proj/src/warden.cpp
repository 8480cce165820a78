#include "xmppsteg/warden.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>

#include "xmppsteg/errors.hpp"

namespace xmppsteg {

namespace {

constexpr std::string_view kTypeValues[] = {"normal", "chat", "error", "headline", "groupchat"};

std::string lower(std::string s) {
    for (auto& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

bool valid_language_tag(const std::string& tag) {
    static const std::regex re("^[A-Za-z]{1,8}(-[A-Za-z0-9]{1,8})*$");
    return std::regex_match(tag, re);
}

void check_type(const Stanza& s, std::vector<Flag>& flags) {
    auto type = s.type();
    if (!type) return;
    std::string folded = lower(*type);
    bool known = std::find(std::begin(kTypeValues), std::end(kTypeValues), folded) != std::end(kTypeValues);
    if (known && folded == *type) return;
    if (known)
        flags.push_back({"R1-type-value", ChannelId::TypeCase, "type '" + *type + "' is not lower case"});
    else
        flags.push_back({"R1-type-value", ChannelId::TypeValue, "type '" + *type + "' is not a defined value"});
}

void check_lang(const Stanza& s, std::vector<Flag>& flags) {
    auto check = [&](const std::optional<std::string>& lang, const char* where) {
        if (lang && !valid_language_tag(*lang))
            flags.push_back({"R2-lang-tag", ChannelId::XmlLangValue,
                             std::string("invalid xml:lang '") + *lang + "' on " + where});
    };
    check(s.attribute("xml:lang"), "message");
    if (s.body()) check(s.body()->xml_lang(), "body");
}

void check_addresses(const Stanza& s, std::vector<Flag>& flags) {
    if (!s.attribute("from") || !s.attribute("to"))
        flags.push_back({"R3-well-formed", std::nullopt, "message lacks a from or to address"});
    else if (!s.from() || !s.to())
        flags.push_back({"R3-well-formed", std::nullopt, "from or to is not a valid JID"});
}

std::size_t toggles_in_window(const std::vector<bool>& v, std::size_t window) {
    std::size_t begin = v.size() > window ? v.size() - window : 0;
    std::size_t n = 0;
    for (std::size_t i = begin + 1; i < v.size(); ++i)
        if (v[i] != v[i - 1]) ++n;
    return n;
}

// Mean run length over the present values; nullopt unless at least two
// distinct values were seen in at least min_history observations.
std::optional<double> mean_run_length(const std::vector<std::optional<std::string>>& values, std::size_t min_history) {
    std::vector<const std::string*> present;
    for (const auto& v : values)
        if (v) present.push_back(&*v);
    if (present.size() < min_history) return std::nullopt;
    std::size_t runs = 1;
    std::set<std::string_view> distinct{*present.front()};
    for (std::size_t i = 1; i < present.size(); ++i) {
        if (*present[i] != *present[i - 1]) ++runs;
        distinct.insert(*present[i]);
    }
    if (distinct.size() < 2) return std::nullopt;
    return static_cast<double>(present.size()) / static_cast<double>(runs);
}

std::optional<std::uint64_t> parse_counter(std::string_view id, bool hex) {
    if (id.empty() || id.size() > (hex ? 16U : 19U)) return std::nullopt;
    std::uint64_t v = 0;
    for (char c : id) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else return std::nullopt;
        v = v * (hex ? 16 : 10) + static_cast<std::uint64_t>(d);
    }
    return v;
}

void observe_id(SessionState::SenderHistory& h, const std::string& id, const WardenThresholds& t,
                std::vector<Flag>& flags) {
    h.ids.push_back(id);

    bool has_lower = std::any_of(id.begin(), id.end(), [](char c) { return c >= 'a' && c <= 'z'; });
    bool has_upper = std::any_of(id.begin(), id.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
    if (has_lower && has_upper) {
        flags.push_back({"H3-id-case-flicker", ChannelId::IdCase, "id '" + id + "' mixes letter cases"});
    } else if (has_lower || has_upper) {
        if (h.last_upper && *h.last_upper != has_upper)
            flags.push_back({"H3-id-case-flicker", ChannelId::IdCase,
                             "id letter case switched to " + std::string(has_upper ? "upper" : "lower")});
        h.last_upper = has_upper;
    }

    const bool decimal = std::all_of(id.begin(), id.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (!h.hex) {
        if (!decimal && !parse_counter(id, true)) return;  // not a counter id at all
        h.hex = !decimal;
    } else if (!*h.hex && !decimal && parse_counter(id, true)) {
        // A hex counter whose earlier values happened to use only digits:
        // recount the history in base 16 if all of it parses that way.
        std::vector<std::uint64_t> values;
        for (std::size_t i = 0; i + 1 < h.ids.size(); ++i)
            if (auto v = parse_counter(h.ids[i], true)) values.push_back(*v);
        if (values.size() + 1 == h.ids.size()) {
            h.hex = true;
            h.steps = values.empty() ? 0 : values.size() - 1;
            h.irregular_steps = 0;
            for (std::size_t i = 1; i < values.size(); ++i)
                if (values[i] != values[i - 1] + 1) ++h.irregular_steps;
            h.last = values.empty() ? std::nullopt : std::optional<std::uint64_t>(values.back());
        }
    }
    auto value = parse_counter(id, *h.hex);
    if (!h.last) {
        h.last = value;
        return;
    }
    ++h.steps;
    if (!value) {
        ++h.irregular_steps;
        flags.push_back({"H2-id-sequence", ChannelId::IdLsb, "id '" + id + "' breaks the counter scheme"});
        return;
    }
    const std::uint64_t prev = *h.last;
    h.last = value;
    if (*value != prev + 1) ++h.irregular_steps;
    if (*value <= prev) {
        flags.push_back({"H2-id-sequence", ChannelId::IdLsb, "id '" + id + "' does not increase"});
    } else if (*value - prev > t.id_max_gap) {
        flags.push_back({"H2-id-sequence", ChannelId::IdLsb,
                         "id jumped by " + std::to_string(*value - prev) + " after '" + h.ids[h.ids.size() - 2] + "'"});
    } else if (h.steps >= t.min_history) {
        double fraction = static_cast<double>(h.irregular_steps) / static_cast<double>(h.steps);
        if (fraction > t.id_irregular_fraction)
            flags.push_back({"H2-id-sequence", ChannelId::IdLsb,
                             std::to_string(h.irregular_steps) + " of " + std::to_string(h.steps) +
                                 " id steps are not +1"});
    }
}

}  // namespace

WardenThresholds thresholds_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("thresholds must be a JSON object");
    WardenThresholds t;
    try {
        t.presence_window = doc.value("presence_window", t.presence_window);
        t.presence_toggles = doc.value("presence_toggles", t.presence_toggles);
        t.id_irregular_fraction = doc.value("id_irregular_fraction", t.id_irregular_fraction);
        t.id_max_gap = doc.value("id_max_gap", t.id_max_gap);
        t.value_min_mean_run = doc.value("value_min_mean_run", t.value_min_mean_run);
        t.min_history = doc.value("min_history", t.min_history);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("thresholds: ") + e.what());
    }
    if (t.presence_window < 2) throw ConfigError("presence_window must be at least 2");
    return t;
}

WardenThresholds load_thresholds(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return thresholds_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

nlohmann::json to_json(const WardenThresholds& t) {
    return {
        {"presence_window", t.presence_window},
        {"presence_toggles", t.presence_toggles},
        {"id_irregular_fraction", t.id_irregular_fraction},
        {"id_max_gap", t.id_max_gap},
        {"value_min_mean_run", t.value_min_mean_run},
        {"min_history", t.min_history},
    };
}

Verdict scan_stateless(const Stanza& stanza, std::size_t index) {
    Verdict v;
    v.stanza_index = index;
    check_type(stanza, v.flags);
    check_lang(stanza, v.flags);
    check_addresses(stanza, v.flags);
    return v;
}

Verdict scan_stateless(std::string_view bytes, std::size_t index) {
    try {
        return scan_stateless(Stanza::parse(bytes), index);
    } catch (const Error& e) {
        Verdict v;
        v.stanza_index = index;
        v.flags.push_back({"R3-well-formed", std::nullopt, e.what()});
        return v;
    }
}

const SessionState::PairHistory* SessionState::pair(const Jid& a, const Jid& b) const {
    auto key = std::minmax(a.str(), b.str());
    auto it = pairs_.find({key.first, key.second});
    return it == pairs_.end() ? nullptr : &it->second;
}

const SessionState::SenderHistory* SessionState::sender(const Jid& from) const {
    auto it = senders_.find(from.str());
    return it == senders_.end() ? nullptr : &it->second;
}

Verdict scan_stateful(SessionState& state, const Stanza& stanza, const WardenThresholds& t, std::size_t index) {
    Verdict v = scan_stateless(stanza, index);
    const std::string from = stanza.attribute("from").value_or("");
    const std::string to = stanza.attribute("to").value_or("");
    auto key = std::minmax(from, to);
    auto& h = state.pairs_[{key.first, key.second}];

    auto type = stanza.type();
    h.type_present.push_back(type.has_value());
    h.type_values.push_back(type ? std::optional<std::string>(lower(*type)) : std::nullopt);
    std::optional<std::string> lang = stanza.body() ? stanza.body()->xml_lang() : std::nullopt;
    h.lang_present.push_back(lang.has_value());
    h.lang_values.push_back(lang);

    if (auto n = toggles_in_window(h.type_present, t.presence_window); n >= t.presence_toggles)
        v.flags.push_back({"H1-type-presence-flicker", ChannelId::TypePresence,
                           "type attribute toggled " + std::to_string(n) + " times in the last " +
                               std::to_string(t.presence_window) + " messages"});
    if (auto n = toggles_in_window(h.lang_present, t.presence_window); n >= t.presence_toggles)
        v.flags.push_back({"H1-lang-presence-flicker", ChannelId::XmlLangPresence,
                           "xml:lang toggled " + std::to_string(n) + " times in the last " +
                               std::to_string(t.presence_window) + " messages"});

    if (auto run = mean_run_length(h.type_values, t.min_history); run && *run < t.value_min_mean_run)
        v.flags.push_back({"H4-type-value-flicker", ChannelId::TypeValue,
                           "type values alternate with mean run " + std::to_string(*run)});
    if (auto run = mean_run_length(h.lang_values, t.min_history); run && *run < t.value_min_mean_run)
        v.flags.push_back({"H4-lang-value-flicker", ChannelId::XmlLangValue,
                           "xml:lang values alternate with mean run " + std::to_string(*run)});

    if (auto id = stanza.id(); id && !from.empty()) observe_id(state.senders_[from], *id, t, v.flags);
    return v;
}

std::string_view to_string(WardenMode mode) { return mode == WardenMode::Stateless ? "stateless" : "stateful"; }

std::optional<WardenMode> warden_mode_from_string(std::string_view name) {
    if (name == "stateless") return WardenMode::Stateless;
    if (name == "stateful") return WardenMode::Stateful;
    return std::nullopt;
}

bool SessionReport::suspicious() const noexcept {
    return std::any_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.suspicious(); });
}

std::size_t SessionReport::flagged_stanzas() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.suspicious(); }));
}

SessionReport scan_transcript(const SessionTranscript& transcript, WardenMode mode, const WardenThresholds& t) {
    SessionReport report;
    report.mode = mode;
    report.thresholds = t;
    for (auto id : kAllChannels) report.summary[id] = false;
    SessionState state;
    report.verdicts.reserve(transcript.messages.size());
    for (std::size_t i = 0; i < transcript.messages.size(); ++i) {
        const auto& s = transcript.messages[i];
        Verdict v = mode == WardenMode::Stateless ? scan_stateless(s, i) : scan_stateful(state, s, t, i);
        for (const auto& f : v.flags)
            if (f.hypothesis) report.summary[*f.hypothesis] = true;
        report.verdicts.push_back(std::move(v));
    }
    report.stanzas_scanned = transcript.messages.size();
    return report;
}

nlohmann::json to_json(const SessionReport& report) {
    nlohmann::json doc;
    doc["mode"] = std::string(to_string(report.mode));
    doc["thresholds"] = to_json(report.thresholds);
    doc["stanzas"] = report.stanzas_scanned;
    doc["suspicious"] = report.suspicious();
    doc["flagged_stanzas"] = report.flagged_stanzas();
    doc["verdicts"] = nlohmann::json::array();
    for (const auto& v : report.verdicts) {
        nlohmann::json flags = nlohmann::json::array();
        for (const auto& f : v.flags)
            flags.push_back({{"rule", f.rule},
                             {"channel", f.hypothesis ? nlohmann::json(std::string(to_string(*f.hypothesis)))
                                                      : nlohmann::json(nullptr)},
                             {"detail", f.detail}});
        doc["verdicts"].push_back({{"index", v.stanza_index}, {"suspicious", v.suspicious()}, {"flags", flags}});
    }
    nlohmann::json summary = nlohmann::json::object();
    for (const auto& [id, detected] : report.summary) summary[std::string(to_string(id))] = detected;
    doc["summary"] = summary;
    doc["not_analyzed"] = {std::string(to_string(ChannelId::Synonym)),
                           std::string(to_string(ChannelId::SpellingMistake))};
    return doc;
}

}  // namespace xmppsteg

#include "xmppsteg/channel_config.hpp"

#include <algorithm>
#include <fstream>

#include "xmppsteg/errors.hpp"

namespace xmppsteg {

namespace {

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

VariantDictionary dictionary_field(const nlohmann::json& value, const std::filesystem::path& base_dir) {
    if (value.is_string()) return load_dictionary(base_dir / value.get<std::string>());
    return dictionary_from_json(value);
}

nlohmann::json dictionary_to_json(const VariantDictionary& dict) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [word, variants] : dict.entries()) out[word] = variants;
    return out;
}

}  // namespace

VariantDictionary dictionary_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("dictionary must be a JSON object");
    VariantDictionary dict;
    for (const auto& [word, value] : doc.items()) {
        std::vector<std::string> variants;
        if (value.is_string()) {
            variants = {word, value.get<std::string>()};
        } else if (value.is_array()) {
            for (const auto& v : value) {
                if (!v.is_string()) throw ConfigError("dictionary entry '" + word + "' must hold strings");
                variants.push_back(v.get<std::string>());
            }
            if (std::find(variants.begin(), variants.end(), word) == variants.end())
                variants.insert(variants.begin(), word);
        } else {
            throw ConfigError("dictionary entry '" + word + "' must be a string or an array");
        }
        dict.add(word, std::move(variants));
    }
    return dict;
}

VariantDictionary load_dictionary(const std::filesystem::path& path) { return dictionary_from_json(read_json_file(path)); }

ChannelConfig channel_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("channel config must be a JSON object");
    ChannelConfig config;
    try {
        const auto& enabled = doc.at("enabled");
        if (!enabled.is_array()) throw ConfigError("enabled must be an array of channel names");
        for (const auto& name : enabled) {
            auto id = channel_from_string(name.get<std::string>());
            if (!id) throw ConfigError("unknown channel '" + name.get<std::string>() + "'");
            config.enabled.push_back(*id);
        }
        if (doc.contains("lang_pair")) {
            const auto& pair = doc.at("lang_pair");
            if (!pair.is_array() || pair.size() != 2) throw ConfigError("lang_pair must be an array of two tags");
            config.lang_pair = {pair[0].get<std::string>(), pair[1].get<std::string>()};
        }
        config.type_value_two_bits = doc.value("type_value_two_bits", false);
        if (doc.contains("synonyms")) config.synonyms = dictionary_field(doc.at("synonyms"), base_dir);
        if (doc.contains("misspellings")) config.misspellings = dictionary_field(doc.at("misspellings"), base_dir);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("channel config: ") + e.what());
    }
    config.validate();
    return config;
}

ChannelConfig load_channel_config(const std::filesystem::path& path) {
    return channel_config_from_json(read_json_file(path), path.parent_path());
}

nlohmann::json to_json(const ChannelConfig& config) {
    nlohmann::json out;
    out["enabled"] = nlohmann::json::array();
    for (auto id : config.enabled) out["enabled"].push_back(std::string(to_string(id)));
    out["lang_pair"] = {config.lang_pair.first, config.lang_pair.second};
    out["type_value_two_bits"] = config.type_value_two_bits;
    out["synonyms"] = dictionary_to_json(config.synonyms);
    out["misspellings"] = dictionary_to_json(config.misspellings);
    return out;
}

}  // namespace xmppsteg

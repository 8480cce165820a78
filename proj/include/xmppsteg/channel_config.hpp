#pragma once

// JSON form of ChannelConfig:
//
//   {
//     "enabled": ["IdLsb", "XmlLangPresence", "TypePresence", "LeadingSpace"],
//     "lang_pair": ["en", "en-GB"],
//     "type_value_two_bits": false,
//     "synonyms": {"Message.": ["Message.", "Msg."]},
//     "misspellings": "misspellings.json"
//   }
//
// Dictionaries are either inline objects or paths (relative to the config
// file) to JSON objects of word -> array of variants. A misspelling entry may
// also be written word -> "misspelled".

#include <filesystem>

#include "json.hpp"
#include "xmppsteg/channels.hpp"

namespace xmppsteg {

/// Throws ConfigError for schema violations or an invalid resulting config.
ChannelConfig channel_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ChannelConfig load_channel_config(const std::filesystem::path& path);
nlohmann::json to_json(const ChannelConfig& config);

VariantDictionary dictionary_from_json(const nlohmann::json& doc);
VariantDictionary load_dictionary(const std::filesystem::path& path);

}  // namespace xmppsteg

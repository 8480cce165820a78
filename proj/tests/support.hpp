#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "xmppsteg/channels.hpp"

namespace testsupport {

std::filesystem::path data_dir();
const std::vector<std::string>& corpus();

/// A <message> written directly as bytes, exercising optional attributes,
/// both letter cases, quote styles, odd spacing, entities and edge whitespace.
std::string random_stanza_bytes(std::mt19937_64& rng);

/// Random bytes of the given length.
std::string random_bytes(std::mt19937_64& rng, std::size_t n);

xmppsteg::ChannelConfig config_of(std::vector<xmppsteg::ChannelId> channels);

/// Fresh temporary directory, removed by the destructor.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace testsupport

#pragma once

// Framing for hidden payloads.
//
//   +--------+----------------+----------------------+
//   | 0xA5   | length (u16 BE)| ciphertext (length B) |
//   +--------+----------------+----------------------+
//
// Serialized MSB-first into a BitStream. Only the payload is encrypted so a
// receiver can find frame boundaries without trying keys.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "xmppsteg/bitstream.hpp"

namespace xmppsteg {

inline constexpr std::uint8_t kFrameMagic = 0xA5;
inline constexpr std::size_t kFrameHeaderBits = 24;
inline constexpr std::size_t kMaxPayloadBytes = 0xFFFF;

constexpr std::size_t frame_bit_length(std::size_t payload_bytes) { return kFrameHeaderBits + 8 * payload_bytes; }

/// XOR keystream applied to frame payloads. Applying it twice is the identity.
class Keystream {
public:
    virtual ~Keystream() = default;
    virtual void apply(std::string& data) const = 0;
};

/// ChaCha20 with a BLAKE2b-derived key and a zero nonce. Confidentiality only;
/// there is no authentication and reusing a key across sessions repeats the stream.
class ChaCha20Keystream final : public Keystream {
public:
    explicit ChaCha20Keystream(std::string_view key_material);
    void apply(std::string& data) const override;

private:
    std::array<unsigned char, 32> key_{};
};

BitStream frame_payload(std::string_view secret, const Keystream* keystream = nullptr);
BitStream frame_payload(std::string_view secret, const std::optional<std::string>& key);

/// Reads one frame starting at the stream's cursor; bits after the frame are ignored.
/// Throws BadMagic or Truncated.
std::string deframe_payload(BitStream bits, const Keystream* keystream = nullptr);
std::string deframe_payload(BitStream bits, const std::optional<std::string>& key);

}  // namespace xmppsteg

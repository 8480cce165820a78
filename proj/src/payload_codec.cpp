#include "xmppsteg/payload_codec.hpp"

#include <sodium.h>

#include <stdexcept>

#include "xmppsteg/errors.hpp"

namespace xmppsteg {

ChaCha20Keystream::ChaCha20Keystream(std::string_view key_material) {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
    crypto_generichash(key_.data(), key_.size(), reinterpret_cast<const unsigned char*>(key_material.data()),
                       key_material.size(), nullptr, 0);
}

void ChaCha20Keystream::apply(std::string& data) const {
    if (data.empty()) return;
    static constexpr std::array<unsigned char, crypto_stream_chacha20_NONCEBYTES> nonce{};
    auto* p = reinterpret_cast<unsigned char*>(data.data());
    crypto_stream_chacha20_xor(p, p, data.size(), nonce.data(), key_.data());
}

BitStream frame_payload(std::string_view secret, const Keystream* keystream) {
    if (secret.size() > kMaxPayloadBytes) throw PayloadTooLarge(secret.size());
    std::string body(secret);
    if (keystream) keystream->apply(body);
    BitStream out;
    out.push_byte(kFrameMagic);
    out.push_uint(secret.size(), 16);
    for (char c : body) out.push_byte(static_cast<std::uint8_t>(c));
    return out;
}

BitStream frame_payload(std::string_view secret, const std::optional<std::string>& key) {
    if (!key) return frame_payload(secret, static_cast<const Keystream*>(nullptr));
    ChaCha20Keystream ks(*key);
    return frame_payload(secret, &ks);
}

std::string deframe_payload(BitStream bits, const Keystream* keystream) {
    const std::size_t available = bits.remaining();
    if (available >= 8) {
        auto magic = static_cast<unsigned>(bits.read_uint(8));
        if (magic != kFrameMagic) throw BadMagic(magic);
    }
    if (available < kFrameHeaderBits) throw Truncated(available, kFrameHeaderBits);
    auto length = static_cast<std::size_t>(bits.read_uint(16));
    if (available < frame_bit_length(length)) throw Truncated(available, frame_bit_length(length));
    std::string body;
    body.reserve(length);
    for (std::size_t i = 0; i < length; ++i) body.push_back(static_cast<char>(bits.read_uint(8)));
    if (keystream) keystream->apply(body);
    return body;
}

std::string deframe_payload(BitStream bits, const std::optional<std::string>& key) {
    if (!key) return deframe_payload(std::move(bits), static_cast<const Keystream*>(nullptr));
    ChaCha20Keystream ks(*key);
    return deframe_payload(std::move(bits), &ks);
}

}  // namespace xmppsteg

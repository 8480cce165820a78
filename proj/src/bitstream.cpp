#include "xmppsteg/bitstream.hpp"

#include <stdexcept>

namespace xmppsteg {

BitStream BitStream::from_bytes(std::string_view bytes) {
    BitStream out;
    out.bits_.reserve(bytes.size() * 8);
    for (char c : bytes) out.push_byte(static_cast<std::uint8_t>(c));
    return out;
}

BitStream BitStream::from_string(std::string_view bits) {
    BitStream out;
    for (char c : bits) {
        if (c != '0' && c != '1') throw std::invalid_argument("bit strings may only contain '0' and '1'");
        out.push(c == '1');
    }
    return out;
}

void BitStream::push_byte(std::uint8_t byte) { push_uint(byte, 8); }

void BitStream::push_uint(std::uint64_t value, unsigned width) {
    for (unsigned i = width; i-- > 0;) push(((value >> i) & 1U) != 0);
}

void BitStream::append(const BitStream& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

bool BitStream::read() {
    if (at_end()) throw std::out_of_range("read past the end of the bit stream");
    return bits_[cursor_++] != 0;
}

std::uint64_t BitStream::read_uint(unsigned width) {
    if (remaining() < width) throw std::out_of_range("read past the end of the bit stream");
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | (bits_[cursor_++] ? 1U : 0U);
    return v;
}

std::string BitStream::remaining_bytes() const {
    std::string out;
    out.reserve((remaining() + 7) / 8);
    for (std::size_t i = cursor_; i < bits_.size(); i += 8) {
        unsigned byte = 0;
        for (std::size_t k = 0; k < 8; ++k) {
            byte <<= 1;
            if (i + k < bits_.size() && bits_[i + k]) byte |= 1U;
        }
        out.push_back(static_cast<char>(byte));
    }
    return out;
}

std::string BitStream::to_string() const {
    std::string out;
    out.reserve(bits_.size());
    for (auto b : bits_) out.push_back(b ? '1' : '0');
    return out;
}

}  // namespace xmppsteg

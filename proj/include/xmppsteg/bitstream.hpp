#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace xmppsteg {

/// Ordered bit sequence with a read cursor. Bytes are expanded MSB-first.
class BitStream {
public:
    BitStream() = default;

    static BitStream from_bytes(std::string_view bytes);
    /// Parses a string of '0'/'1' characters; other characters are rejected.
    static BitStream from_string(std::string_view bits);

    void push(bool bit) { bits_.push_back(bit ? 1 : 0); }
    void push_byte(std::uint8_t byte);
    void push_uint(std::uint64_t value, unsigned width);
    void append(const BitStream& other);

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }
    bool operator[](std::size_t i) const { return bits_.at(i) != 0; }

    std::size_t cursor() const noexcept { return cursor_; }
    std::size_t remaining() const noexcept { return bits_.size() - cursor_; }
    bool at_end() const noexcept { return cursor_ >= bits_.size(); }
    void rewind() noexcept { cursor_ = 0; }

    /// Throws std::out_of_range at the end of the stream.
    bool read();
    std::uint64_t read_uint(unsigned width);

    /// Bits from the cursor to the end, packed MSB-first; a partial last byte is zero-padded.
    std::string remaining_bytes() const;
    std::string to_string() const;

    /// Equality of the bit sequences; cursors are ignored.
    friend bool operator==(const BitStream& a, const BitStream& b) { return a.bits_ == b.bits_; }

private:
    std::vector<std::uint8_t> bits_;
    std::size_t cursor_ = 0;
};

}  // namespace xmppsteg

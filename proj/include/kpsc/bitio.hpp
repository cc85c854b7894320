#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace kpsc {

// Base class for payload-level stream failures.
struct StreamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A read ran past the end of the underlying bytes.
struct TruncatedStream : StreamError {
    using StreamError::StreamError;
};

// The bytes are long enough but cannot be a valid stream.
struct CorruptStream : StreamError {
    using StreamError::StreamError;
};

// Growable bit buffer, most significant bit of each byte filled first.
// Unwritten tail bits of the last byte stay zero, so the buffer is always
// valid to flush as-is.
class BitWriter {
public:
    void write_bit(std::uint32_t bit) {
        const std::size_t byte = static_cast<std::size_t>(bit_count_ >> 3);
        if (byte == buffer_.size()) buffer_.push_back(0);
        if (bit & 1u) buffer_[byte] |= static_cast<std::uint8_t>(0x80u >> (bit_count_ & 7));
        ++bit_count_;
    }

    // Writes the low `count` bits of `value`, most significant first.
    void write_bits(std::uint32_t value, unsigned count) {
        if (count > 32) throw std::invalid_argument("write_bits: count exceeds 32");
        if (count < 32 && (value >> count) != 0)
            throw std::invalid_argument("write_bits: value does not fit in count bits");
        for (unsigned i = count; i-- > 0;) write_bit((value >> i) & 1u);
    }

    std::uint64_t bit_count() const { return bit_count_; }
    const std::vector<std::uint8_t>& bytes() const { return buffer_; }
    std::vector<std::uint8_t> release() {
        bit_count_ = 0;
        return std::move(buffer_);
    }

private:
    std::vector<std::uint8_t> buffer_;
    std::uint64_t bit_count_ = 0;
};

// Cursor over a fixed byte span, mirroring BitWriter's bit order.
class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint32_t read_bit() {
        if (pos_ >= std::uint64_t{data_.size()} * 8)
            throw TruncatedStream("bit stream exhausted");
        const std::uint8_t byte = data_[static_cast<std::size_t>(pos_ >> 3)];
        const std::uint32_t bit = (byte >> (7 - (pos_ & 7))) & 1u;
        ++pos_;
        return bit;
    }

    std::uint32_t read_bits(unsigned count) {
        if (count > 32) throw std::invalid_argument("read_bits: count exceeds 32");
        std::uint32_t value = 0;
        for (unsigned i = 0; i < count; ++i) value = (value << 1) | read_bit();
        return value;
    }

    std::uint64_t position() const { return pos_; }
    std::uint64_t remaining() const { return std::uint64_t{data_.size()} * 8 - pos_; }

private:
    std::span<const std::uint8_t> data_;
    std::uint64_t pos_ = 0;
};

// ---- order-0 exponential-Golomb coding ----
//
// ue(n): with L the bit length of n+1, the codeword is L-1 zero bits
// followed by the L bits of n+1.  se(v) maps signed values onto ue with
// positives on odd code numbers (0 -> 0, 1 -> 1, -1 -> 2, 2 -> 3, ...),
// the zigzag used by the H.264/HEVC family.

inline constexpr std::uint32_t kUeMax = std::numeric_limits<std::uint32_t>::max() - 1;
inline constexpr std::int32_t kSeMax = std::int32_t{1} << 30;  // |v| bound for se coding

inline void ue_encode(BitWriter& writer, std::uint32_t n) {
    if (n > kUeMax) throw std::overflow_error("ue_encode: value out of range");
    const unsigned len = static_cast<unsigned>(std::bit_width(n + 1));
    writer.write_bits(0, len - 1);
    writer.write_bits(n + 1, len);
}

inline std::uint32_t ue_decode(BitReader& reader) {
    unsigned zeros = 0;
    while (reader.read_bit() == 0)
        if (++zeros > 31) throw CorruptStream("ue_decode: prefix run too long");
    const std::uint64_t high = std::uint64_t{1} << zeros;
    const std::uint64_t rest = zeros ? reader.read_bits(zeros) : 0;
    return static_cast<std::uint32_t>(high + rest - 1);
}

inline std::uint32_t se_to_ue(std::int32_t v) {
    if (v > kSeMax || v < -kSeMax) throw std::overflow_error("se coding: |value| exceeds 2^30");
    const std::int64_t wide = v;
    return static_cast<std::uint32_t>(wide > 0 ? 2 * wide - 1 : -2 * wide);
}

inline std::int32_t se_from_ue(std::uint32_t u) {
    const std::int64_t half = (std::int64_t{u} + 1) / 2;
    return static_cast<std::int32_t>((u & 1u) ? half : -half);
}

inline void se_encode(BitWriter& writer, std::int32_t v) { ue_encode(writer, se_to_ue(v)); }
inline std::int32_t se_decode(BitReader& reader) { return se_from_ue(ue_decode(reader)); }

// Codeword lengths without emitting anything.
inline unsigned bit_length_ue(std::uint32_t n) {
    return 2 * static_cast<unsigned>(std::bit_width(n + 1)) - 1;
}

inline unsigned bit_length_se(std::int32_t v) { return bit_length_ue(se_to_ue(v)); }

// 64-bit variant for scoring hypothetical residuals that may fall outside
// the strict se range; agrees with bit_length_se on the shared domain.
inline unsigned bit_length_se64(std::int64_t v) {
    const std::uint64_t u =
        v > 0 ? 2 * static_cast<std::uint64_t>(v) - 1 : 2 * static_cast<std::uint64_t>(-v);
    return 2 * static_cast<unsigned>(std::bit_width(u + 1)) - 1;
}

}  // namespace kpsc

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hamstream {

// Width in bits needed for values in [0, count).
unsigned bits_for(std::uint64_t count);

// MSB-first bit packing. Doubles are written as their raw IEEE-754 64-bit image.
class BitWriter {
public:
    void put(std::uint64_t value, unsigned width);
    void put_double(double v);
    void put_bool(bool b) { put(b ? 1 : 0, 1); }

    std::size_t bit_count() const { return bits_; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t bits_ = 0;
};

class BitReader {
public:
    BitReader(const std::vector<std::uint8_t>& bytes, std::size_t bit_count)
        : bytes_(&bytes), limit_(bit_count) {}

    std::uint64_t get(unsigned width);
    double get_double();
    bool get_bool() { return get(1) != 0; }

    std::size_t position() const { return pos_; }
    bool exhausted() const { return pos_ == limit_; }

private:
    const std::vector<std::uint8_t>* bytes_;
    std::size_t limit_;
    std::size_t pos_ = 0;
};

}  // namespace hamstream

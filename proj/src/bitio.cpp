#include "hamstream/bitio.hpp"

#include <bit>
#include <stdexcept>

namespace hamstream {

unsigned bits_for(std::uint64_t count) {
    unsigned w = 0;
    while (w < 64 && (std::uint64_t{1} << w) < count) ++w;
    return w;
}

void BitWriter::put(std::uint64_t value, unsigned width) {
    if (width > 64) throw std::invalid_argument("BitWriter: width over 64");
    if (width < 64 && (value >> width) != 0) throw std::invalid_argument("BitWriter: value does not fit width");
    for (unsigned b = width; b-- > 0;) {
        if (bits_ % 8 == 0) bytes_.push_back(0);
        if ((value >> b) & 1) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ % 8));
        ++bits_;
    }
}

void BitWriter::put_double(double v) { put(std::bit_cast<std::uint64_t>(v), 64); }

std::uint64_t BitReader::get(unsigned width) {
    if (width > 64) throw std::invalid_argument("BitReader: width over 64");
    if (pos_ + width > limit_) throw std::out_of_range("BitReader: read past end of payload");
    std::uint64_t v = 0;
    for (unsigned b = 0; b < width; ++b) {
        const std::uint8_t byte = (*bytes_)[pos_ / 8];
        v = (v << 1) | ((byte >> (7 - pos_ % 8)) & 1);
        ++pos_;
    }
    return v;
}

double BitReader::get_double() { return std::bit_cast<double>(get(64)); }

}  // namespace hamstream

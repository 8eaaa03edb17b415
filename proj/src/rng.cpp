#include "hamstream/rng.hpp"

#include <sodium.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace hamstream {

namespace {

void ensure_sodium() {
    static const bool ok = sodium_init() >= 0;
    if (!ok) throw std::runtime_error("libsodium initialization failed");
}

void put_le32(std::uint8_t* p, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint64_t get_le64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

constexpr std::uint64_t kSignColStride = 1ULL << 24;
constexpr std::uint64_t kStableColStride = 1ULL << 26;

}  // namespace

Seed Seed::from_hex(std::string_view hex) {
    if (hex.size() != 64) throw std::invalid_argument("seed must be 64 hex characters");
    std::array<std::uint8_t, 32> b{};
    for (std::size_t i = 0; i < 32; ++i) {
        int hi = hex_digit(hex[2 * i]);
        int lo = hex_digit(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("seed contains a non-hex character");
        b[i] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return Seed(b);
}

Seed Seed::from_u64(std::uint64_t v) {
    std::array<std::uint8_t, 32> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return Seed(b);
}

std::string Seed::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s(64, '0');
    for (std::size_t i = 0; i < 32; ++i) {
        s[2 * i] = digits[bytes_[i] >> 4];
        s[2 * i + 1] = digits[bytes_[i] & 15];
    }
    return s;
}

Seed Seed::derive(std::uint32_t label, std::uint64_t index) const {
    std::uint8_t block[64];
    prf_block(*this, stream_id(Purpose::derive, label), index, block);
    std::array<std::uint8_t, 32> b{};
    std::memcpy(b.data(), block, 32);
    return Seed(b);
}

void prf_blocks(const Seed& seed, std::uint32_t stream, std::uint64_t counter,
                std::size_t count, std::uint8_t* out) {
    ensure_sodium();
    if (count == 0) return;
    if ((counter & 0xffffffffULL) + count - 1 > 0xffffffffULL)
        throw std::out_of_range("prf block range wraps the 32-bit counter");
    std::uint8_t nonce[crypto_stream_chacha20_IETF_NONCEBYTES] = {};
    put_le32(nonce, stream);
    put_le32(nonce + 4, static_cast<std::uint32_t>(counter >> 32));
    std::memset(out, 0, 64 * count);
    crypto_stream_chacha20_ietf_xor_ic(out, out, 64 * count, nonce,
                                       static_cast<std::uint32_t>(counter & 0xffffffffULL),
                                       seed.bytes().data());
}

void prf_block(const Seed& seed, std::uint32_t stream, std::uint64_t counter, std::uint8_t* out) {
    prf_blocks(seed, stream, counter, 1, out);
}

int SignSource::sign_at(std::uint64_t row, std::uint64_t col) const {
    std::uint8_t block[64];
    prf_block(seed_, stream_, col * kSignColStride + row / 512, block);
    unsigned b = static_cast<unsigned>(row % 512);
    return ((block[b / 8] >> (b % 8)) & 1) ? 1 : -1;
}

void SignSource::column(std::uint64_t col, std::size_t rows, std::vector<std::uint64_t>& words) const {
    std::size_t blocks = (rows + 511) / 512;
    words.assign(blocks * 8, 0);
    prf_blocks(seed_, stream_, col * kSignColStride, blocks,
               reinterpret_cast<std::uint8_t*>(words.data()));
    // The byte layout is little-endian by definition; fix up on big-endian hosts.
    if constexpr (std::endian::native == std::endian::big) {
        for (auto& w : words) w = get_le64(reinterpret_cast<const std::uint8_t*>(&w));
    }
    std::size_t full = rows / 64;
    if (rows % 64) {
        words[full] &= (1ULL << (rows % 64)) - 1;
        ++full;
    }
    words.resize(full);
}

double unit_open(std::uint64_t w) {
    return (static_cast<double>(w >> 11) + 0.5) * 0x1p-53;
}

double cms_sample(double p, double u1, double u2) {
    const double v = std::numbers::pi * (u1 - 0.5);
    const double w = -std::log(u2);
    if (p == 1.0) return std::tan(v);
    const double a = std::sin(p * v) / std::pow(std::cos(v), 1.0 / p);
    const double b = std::pow(std::cos((1.0 - p) * v) / w, (1.0 - p) / p);
    return a * b;
}

StableSource::StableSource(const Seed& seed, std::uint32_t stream, double p)
    : seed_(seed), stream_(stream), p_(p) {
    if (!(p > 0.0 && p <= 2.0)) throw std::invalid_argument("stability parameter must lie in (0, 2]");
}

double StableSource::stable_at(std::uint64_t row, std::uint64_t col) const {
    std::uint8_t block[64];
    prf_block(seed_, stream_, col * kStableColStride + row / 4, block);
    const std::uint8_t* q = block + 16 * (row % 4);
    return cms_sample(p_, unit_open(get_le64(q)), unit_open(get_le64(q + 8)));
}

void StableSource::column(std::uint64_t col, std::size_t rows, double* out) const {
    std::size_t blocks = (rows + 3) / 4;
    std::vector<std::uint8_t> buf(blocks * 64);
    prf_blocks(seed_, stream_, col * kStableColStride, blocks, buf.data());
    for (std::size_t r = 0; r < rows; ++r) {
        const std::uint8_t* q = buf.data() + 16 * r;
        out[r] = cms_sample(p_, unit_open(get_le64(q)), unit_open(get_le64(q + 8)));
    }
}

std::uint64_t PrfStream::next_u64() {
    if (used_ + 8 > 64) {
        prf_block(seed_, stream_, counter_++, buf_.data());
        used_ = 0;
    }
    std::uint64_t v = get_le64(buf_.data() + used_);
    used_ += 8;
    return v;
}

std::uint64_t PrfStream::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("bound must be positive");
    const std::uint64_t limit = ~0ULL - (~0ULL % bound);
    for (;;) {
        std::uint64_t v = next_u64();
        if (v < limit) return v % bound;
    }
}

double PrfStream::uniform() { return unit_open(next_u64()); }

}  // namespace hamstream

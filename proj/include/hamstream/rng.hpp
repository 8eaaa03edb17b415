#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hamstream {

// 256-bit key for every random object in the library.
class Seed {
public:
    Seed() = default;
    explicit Seed(const std::array<std::uint8_t, 32>& bytes) : bytes_(bytes) {}

    static Seed from_hex(std::string_view hex);
    // Little-endian encoding of `v` in the first eight bytes, rest zero.
    static Seed from_u64(std::uint64_t v);

    std::string hex() const;
    const std::array<std::uint8_t, 32>& bytes() const { return bytes_; }

    // Child seed: first 32 bytes of prf_block(*this, derive-stream(label), index).
    Seed derive(std::uint32_t label, std::uint64_t index) const;

    friend bool operator==(const Seed&, const Seed&) = default;

private:
    std::array<std::uint8_t, 32> bytes_{};
};

enum class Purpose : std::uint32_t {
    matrix = 1,
    sigma = 2,
    stable = 3,
    karloff = 4,
    calibration = 5,
    derive = 6,
    data = 7,
};

constexpr std::uint32_t stream_id(Purpose purpose, std::uint32_t instance = 0) {
    return (instance << 8) | static_cast<std::uint32_t>(purpose);
}

// One 64-byte ChaCha20 keystream block.
// key = seed, nonce = LE32(stream) || LE32(counter >> 32) || LE32(0),
// block counter = counter & 0xffffffff.
void prf_block(const Seed& seed, std::uint32_t stream, std::uint64_t counter,
               std::uint8_t* out);
// `count` consecutive blocks starting at `counter`; the low 32 bits must not wrap.
void prf_blocks(const Seed& seed, std::uint32_t stream, std::uint64_t counter,
                std::size_t count, std::uint8_t* out);

// Lazily materialized ±1 matrix. Entry (row, col) is bit (row mod 512) of block
// col * 2^24 + row / 512, bit b taken as (byte[b / 8] >> (b % 8)) & 1; 1 means +1.
class SignSource {
public:
    SignSource(const Seed& seed, std::uint32_t stream) : seed_(seed), stream_(stream) {}

    int sign_at(std::uint64_t row, std::uint64_t col) const;
    // Bits of rows [0, rows) of column `col`, packed little-endian into 64-bit words.
    void column(std::uint64_t col, std::size_t rows, std::vector<std::uint64_t>& words) const;

    const Seed& seed() const { return seed_; }
    std::uint32_t stream() const { return stream_; }

private:
    Seed seed_;
    std::uint32_t stream_;
};

// Symmetric p-stable samples by Chambers-Mallows-Stuck. Sample (row, col) uses
// the 16 bytes at offset 16 * (row mod 4) of block col * 2^26 + row / 4:
// two little-endian u64 words mapped to (0,1) as ((w >> 11) + 0.5) * 2^-53.
class StableSource {
public:
    StableSource(const Seed& seed, std::uint32_t stream, double p);

    double stable_at(std::uint64_t row, std::uint64_t col) const;
    void column(std::uint64_t col, std::size_t rows, double* out) const;

    double p() const { return p_; }

private:
    Seed seed_;
    std::uint32_t stream_;
    double p_;
};

double cms_sample(double p, double u1, double u2);
double unit_open(std::uint64_t w);

// Sequential generator over consecutive PRF blocks; used for synthetic data.
class PrfStream {
public:
    PrfStream(const Seed& seed, std::uint32_t stream) : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64();
    // Uniform in [0, bound), bound > 0, by rejection.
    std::uint64_t below(std::uint64_t bound);
    double uniform();

private:
    Seed seed_;
    std::uint32_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint8_t, 64> buf_{};
    std::size_t used_ = 64;
};

}  // namespace hamstream

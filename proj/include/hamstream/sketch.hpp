#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hamstream/rng.hpp"
#include "hamstream/types.hpp"

namespace hamstream {

// k = ceil(1 / eps) and r = 9 k^2.
std::size_t sketch_k(double eps);
std::size_t sketch_rows_for_k(std::size_t k);

// M is r x B with entries from a SignSource; never stored.
class Sketcher {
public:
    Sketcher(std::size_t rows, std::size_t block_len, SignSource source);

    std::size_t rows() const { return rows_; }
    std::size_t block_len() const { return block_len_; }
    const SignSource& source() const { return source_; }
    std::uint64_t provenance() const { return provenance_; }

    // acc += coef * M[:, col]
    void add_column(std::span<std::int64_t> acc, std::size_t col, std::int64_t coef) const;
    // Same, reusing a column fetched with column_bits.
    static void add_bits(std::span<std::int64_t> acc, const std::vector<std::uint64_t>& bits,
                         std::int64_t coef);
    void column_bits(std::size_t col, std::vector<std::uint64_t>& bits) const;

private:
    std::size_t rows_;
    std::size_t block_len_;
    SignSource source_;
    std::uint64_t provenance_;
};

struct Sketch {
    std::vector<std::int64_t> values;
    std::size_t logical_len = 0;
    std::uint64_t provenance = 0;
};

struct SuperSketch {
    std::vector<std::int64_t> values;
    std::size_t block_count = 0;
    std::uint64_t provenance = 0;
};

Sketch empty_sketch(const Sketcher& s);
Sketch sketch_block(const Sketcher& s, TextView block);
void update_sketch(Sketch& sk, const Sketcher& s, std::size_t pos, Symbol bit);
SuperSketch combine_super(std::span<const Sketch> sketches, std::span<const int> signs);

unsigned __int128 squared_distance(std::span<const std::int64_t> a, std::span<const std::int64_t> b);
// ||a - b||^2 / r; unbiased for the Hamming distance of the summarized strings.
DistanceEstimate estimate_distance(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                                   double eps);

// Lower median for even sizes.
double median_amplify(std::vector<double> estimates);

// LE64 r, LE64 logical_len, then r LE64 two's-complement entries.
std::vector<std::uint8_t> serialize_sketch(const Sketch& sk);
Sketch deserialize_sketch(const std::vector<std::uint8_t>& bytes);

}  // namespace hamstream

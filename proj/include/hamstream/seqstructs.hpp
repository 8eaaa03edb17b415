#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hamstream/types.hpp"

namespace hamstream {

// Smallest shift ell in [2, n] whose self-overlap has at most x mismatches.
std::size_t x_period(TextView s, std::size_t x);

struct Run {
    Symbol symbol;
    std::size_t count;

    friend bool operator==(const Run&, const Run&) = default;
};

// runs[c] is the run-length encoding of s[c], s[c + ell], s[c + 2 ell], ...
struct RleEncoding {
    std::size_t ell = 1;
    std::size_t total_len = 0;
    std::vector<std::vector<Run>> runs;

    friend bool operator==(const RleEncoding&, const RleEncoding&) = default;
};

RleEncoding rle_encode(TextView s, std::size_t ell);
Text rle_decode(const RleEncoding& enc);
std::size_t rle_size(const RleEncoding& enc);

// Byte layout: varint ell, varint total_len, then for each class a varint run
// count followed by (varint symbol, varint count) pairs. Varints are LEB128.
std::vector<std::uint8_t> rle_serialize(const RleEncoding& enc);
RleEncoding rle_deserialize(const std::vector<std::uint8_t>& bytes);

}  // namespace hamstream

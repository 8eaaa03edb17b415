#pragma once

#include <cstddef>
#include <vector>

#include "hamstream/types.hpp"

// Brute-force ground truth. Nothing here depends on the sketching code.
namespace hamstream::oracle {

std::size_t hamming(TextView a, TextView b);
// Independent recount for binary inputs using packed 64-bit words.
std::size_t hamming_bitparallel(TextView a, TextView b);

// Distance of P against T[a, a + |P|) for every a in [0, |T| - |P|].
std::vector<std::size_t> sliding_hamming(TextView pattern, TextView text);

struct OracleReport {
    std::vector<std::size_t> distances;
    std::size_t min = 0;
    std::size_t argmin = 0;

    std::size_t count_at_most(double tau) const;
};

OracleReport report(TextView pattern, TextView text);

// Exhaustive scan over every shift.
std::size_t x_period(TextView s, std::size_t x);

// d[i] = HD(pattern[0, L - i), text[i, L)) with L = |text| <= |pattern|.
std::vector<std::size_t> prefix_distances(TextView text, TextView pattern);

// f[m] = HD(P[0, m), P[shift, shift + m)) for m in [0, |P| - shift].
std::vector<std::size_t> self_overlap(TextView pattern, std::size_t shift);

}  // namespace hamstream::oracle

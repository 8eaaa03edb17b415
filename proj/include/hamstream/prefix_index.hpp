#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hamstream/bitio.hpp"
#include "hamstream/pstable.hpp"
#include "hamstream/types.hpp"

namespace hamstream {

// Anchor level j: leftmost alignment whose prefix distance is at most k^(j+1),
// plus a greedy partition of [pos, L) into blocks whose interior carries at most
// `cap` mismatches against the pattern placed at pos. Level 0 has cap 0.
struct AnchorLevel {
    unsigned level = 0;
    std::size_t pos = 0;
    std::size_t threshold = 0;
    std::size_t cap = 0;
    std::vector<std::size_t> borders;  // ascending, borders.front() == pos
};

struct PrefixSkeleton {
    std::size_t length = 0;
    std::size_t k = 0;
    std::vector<AnchorLevel> levels;  // ascending level, strictly decreasing pos
    std::vector<unsigned> omitted;    // levels with no qualifying position or a duplicate position

    struct Location {
        std::size_t level_index = 0;
        std::size_t anchor = 0;
        std::size_t border_index = 0;  // == borders.size() when no border is at or after i
        std::size_t border = 0;        // == length in that case
    };

    // Governing anchor is the rightmost one at or before i (finest level on ties);
    // the border is the smallest one at or after i.
    Location locate(std::size_t i) const;
};

// floor(log_k length), so that level q always anchors at 0.
std::size_t prefix_top_level(std::size_t k, std::size_t length);
std::size_t ipow(std::size_t k, std::size_t e);

// Builds anchors then borders from exact prefix distances; resumable in unit steps.
class SkeletonBuilder {
public:
    SkeletonBuilder() = default;
    SkeletonBuilder(TextView text, TextView pattern, std::vector<std::size_t> dist, std::size_t k,
                    std::size_t top_level);

    bool run(std::size_t& budget);
    bool done() const { return stage_ == 3; }
    PrefixSkeleton& skeleton() { return skel_; }

    static std::size_t cost(std::size_t length, std::size_t top_level);

private:
    TextView text_;
    TextView pattern_;
    std::vector<std::size_t> dist_;
    PrefixSkeleton skel_;
    std::vector<std::size_t> found_;
    std::size_t top_ = 0;
    int stage_ = 3;
    std::size_t i_ = 0;
    std::size_t level_ = 0;
    std::size_t count_ = 0;
};

PrefixSkeleton build_skeleton(TextView text, TextView pattern, std::vector<std::size_t> dist, std::size_t k);

// L[d][j] = largest m <= B - d with HD(P[0, m), P[d, d + m)) <= (1 + eps)^j,
// for d in [0, B) and j in [0, floor(log_{1+eps} n)].
class PrefixLengthTable {
public:
    PrefixLengthTable() = default;
    PrefixLengthTable(TextView pattern, std::size_t block_len, double eps);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t at(std::size_t d, std::size_t j) const { return table_[d * cols_ + j]; }
    double level_value(std::size_t j) const;

    // Bounds on HD(P[0, len), P[d, d + len)) by binary search over j.
    std::pair<std::size_t, std::size_t> bounds(std::size_t d, std::size_t len) const;

    std::size_t entry_bits() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    double eps_ = 0.0;
    std::vector<std::size_t> table_;
};

// Alice's structure over the first text half. sketches[l][b][a] is the p-stable
// sketch of T1[border, n) in text coordinates for instance a.
struct Problem1Index {
    std::size_t n = 0;
    PrefixSkeleton skeleton;
    std::vector<std::vector<std::vector<StableSketch>>> sketches;
};

std::size_t problem1_k(double eps);

Problem1Index build_prefix_index(TextView text_half, TextView pattern, double eps,
                                 std::span<const PStableSketcher> sketchers, std::size_t k = 0);

struct PrefixQuery {
    DistanceEstimate estimate;  // (h1 + h2) / (1 - eps / 3)
    double h1 = 0.0;
    double h2 = 0.0;
    PrefixSkeleton::Location where;
};

// Sum over c >= border of Y[:, c] * P[c - i], per instance.
std::vector<StableSketch> pattern_side_sketches(std::span<const PStableSketcher> sketchers, TextView pattern,
                                                std::size_t n, std::size_t i, std::size_t border);

// pattern_side may carry precomputed pattern_side_sketches for this alignment.
PrefixQuery query_prefix_distance(const Problem1Index& idx, std::size_t i, TextView pattern, double eps,
                                  std::span<const PStableSketcher> sketchers,
                                  const PrefixLengthTable* table = nullptr,
                                  const std::vector<StableSketch>* pattern_side = nullptr);

struct IndexHeader {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t instances = 0;
    std::size_t rows = 0;
    bool extended = false;
    double p = 0.0;
    double scale = 0.0;
};

// Header: n:32 k:16 instances:8 rows:32 extended:1 p:64 scale:64 levels:8.
// Per level: j:8 pos:w count:w then count-1 further borders of w bits, where
// w = bits_for(2n). Then per border and instance, rows entries of 64 bits (hi),
// each followed by 64 bits (lo) when extended.
void serialize_index(const Problem1Index& idx, const IndexHeader& header, BitWriter& w);
Problem1Index deserialize_index(BitReader& r, IndexHeader& header);

}  // namespace hamstream

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "hamstream/fft.hpp"
#include "hamstream/prefix_index.hpp"
#include "hamstream/rng.hpp"
#include "hamstream/sketch.hpp"
#include "hamstream/types.hpp"

namespace hamstream {

struct EngineConfig {
    double eps = 0.25;
    std::size_t instances = 9;
    std::size_t anchor_k = 0;  // 0: problem1_k(eps)
    PrefixDistanceTask::Method method = PrefixDistanceTask::Method::fft;
    // Prefix and suffix parts are charged zero once H_m exceeds factor * 2B / eps. 0 disables.
    double discard_factor = 0.0;
    bool verify_rolling = false;
    bool verify_preprocess = false;
    std::size_t block_len = 0;  // 0: chosen by stream_block_len
};

// k * ceil(sqrt n) when it divides n with at least two blocks, otherwise the
// largest divisor of n not above min(k * ceil(sqrt n), n / 2).
std::size_t stream_block_len(std::size_t n, double eps);

// Bits for a signed entry of magnitude at most `bound`.
std::size_t signed_width(std::size_t bound);

// Sign columns of M kept packed, one vector of words per column.
class ColumnCache {
public:
    ColumnCache() = default;
    ColumnCache(const Sketcher& s);

    const std::vector<std::uint64_t>& col(std::size_t c) const { return cols_[c]; }
    std::size_t bits() const { return rows_ * cols_.size(); }

private:
    std::size_t rows_ = 0;
    std::vector<std::vector<std::uint64_t>> cols_;
};

struct PatternIndex {
    std::size_t n = 0;
    std::size_t B = 0;
    std::size_t blocks = 0;  // n / B
    std::size_t r = 0;
    std::size_t anchor_k = 0;
    std::size_t top_level = 0;
    double eps = 0.0;
    Text first_block;
    std::unique_ptr<Sketcher> sketcher;
    ColumnCache columns;
    std::vector<int> sigma;                   // blocks - 1 signs
    std::vector<SuperSketch> super_sketches;  // d in [0, B]: P[d, d + n - B)
    std::vector<Sketch> suffix_sketches;      // i in [1, B] at index i - 1: M * (P[n - i, n) 0^(B - i))
    std::vector<std::vector<std::int64_t>> placed;  // d in [0, B): sum_{c >= d} M[:, c] P[c - d]
    PrefixLengthTable table;
    std::vector<Complex> spectrum;  // empty for the naive method
    PrefixDistanceTask::Method method = PrefixDistanceTask::Method::fft;

    std::size_t resident_bits() const;
};

std::unique_ptr<PatternIndex> preprocess_pattern(TextView pattern, const EngineConfig& cfg, const Seed& seed,
                                                 std::size_t instance);

// Per-block structure: anchors and borders of the block against P[0, B), and for
// each border b of the level anchored at a, C_b = sum_{c >= b} M[:, c] (X[c] - P[c - a]).
struct BlockIndex {
    std::size_t block = 0;
    PrefixSkeleton skeleton;
    std::vector<std::vector<std::vector<std::int64_t>>> residual;  // [level][border]

    std::size_t resident_bits(std::size_t r, std::size_t B) const;
};

// Builds a BlockIndex in unit steps: prefix distances, skeleton, residual sweep.
class BlockIndexBuild {
public:
    BlockIndexBuild(const PatternIndex& idx, Text block, std::size_t number);

    bool run(std::size_t& budget);
    bool done() const { return stage_ == 3; }
    BlockIndex take();
    std::size_t resident_bits() const;

    // Upper bound on units over the whole build.
    static std::size_t cost(const PatternIndex& idx);

private:
    const PatternIndex* idx_;
    Text block_;
    BlockIndex out_;
    PrefixDistanceTask dist_task_;
    SkeletonBuilder skel_;
    int stage_ = 0;
    std::size_t level_ = 0;
    std::size_t pos_ = 0;
    std::size_t border_ = 0;
    std::vector<std::int64_t> acc_;
};

BlockIndex build_block_index(const PatternIndex& idx, TextView block, std::size_t number);

struct StreamParts {
    double hp = 0.0;
    double hm = 0.0;
    double hs = 0.0;
    bool discarded = false;
};

struct StepCounters {
    std::size_t last = 0;
    std::size_t max = 0;
    std::size_t total = 0;
    std::size_t symbols = 0;
};

// One stream against one PatternIndex. push returns nothing for the first n - 1 symbols.
class StreamState {
public:
    StreamState(const PatternIndex& idx, const EngineConfig& cfg);

    std::optional<StreamParts> push(Symbol bit);

    std::size_t symbols() const { return count_; }
    std::size_t resident_bits() const;
    const StepCounters& steps() const { return steps_; }
    std::size_t rolling_checks() const { return rolling_checks_; }
    std::size_t deadline_checks() const { return deadline_checks_; }
    std::size_t build_budget() const { return budget_per_symbol_; }

private:
    void finalize_block();
    StreamParts query(std::size_t i);
    void charge(std::size_t units) { step_units_ += units; }

    const PatternIndex* idx_;
    EngineConfig cfg_;
    std::size_t count_ = 0;
    std::size_t budget_per_symbol_ = 0;

    Text cur_block_;
    Sketch cur_sketch_;
    std::vector<Sketch> ring_;  // last blocks - 1 complete block sketches, oldest first
    std::vector<std::int64_t> rolling_;
    std::vector<std::int64_t> partial_;
    std::size_t partial_added_ = 0;

    std::vector<BlockIndex> indexes_;  // oldest first
    std::unique_ptr<BlockIndexBuild> pending_;

    std::vector<std::int64_t> anchor_sum_;  // sum_{c >= i} M[:, c] P[c - a]
    std::size_t anchor_ = 0;

    StepCounters steps_;
    std::size_t step_units_ = 0;
    std::size_t rolling_checks_ = 0;
    std::size_t deadline_checks_ = 0;
};

struct StreamOutput {
    std::size_t position = 0;  // window start
    double estimate = 0.0;
    StreamParts parts;
};

struct SpaceReport {
    std::vector<std::size_t> pattern_bits;  // per instance
    std::vector<std::size_t> state_bits;
    std::size_t total() const;
};

// Independent instances, each with its own matrix, signs and state; the output
// is the sum of the per-part medians.
class StreamingEngine {
public:
    StreamingEngine(TextView pattern, const EngineConfig& cfg, const Seed& seed);

    std::optional<StreamOutput> push(Symbol bit);

    std::size_t n() const { return n_; }
    std::size_t block_len() const { return patterns_.front()->B; }
    std::size_t instances() const { return patterns_.size(); }
    const PatternIndex& pattern_index(std::size_t t) const { return *patterns_[t]; }
    const StreamState& state(std::size_t t) const { return states_[t]; }
    SpaceReport space_report() const;
    std::size_t max_steps_per_symbol() const;

private:
    std::size_t n_;
    EngineConfig cfg_;
    std::vector<std::unique_ptr<PatternIndex>> patterns_;
    std::vector<StreamState> states_;
};

StreamOutput combine_parts(std::size_t position, const std::vector<StreamParts>& parts);

std::vector<StreamOutput> run_stream(TextView pattern, TextView text, const EngineConfig& cfg, const Seed& seed);

// Same estimates computed directly per alignment, with no scheduling or rolling state.
std::vector<StreamOutput> offline_estimates(TextView pattern, TextView text, const EngineConfig& cfg,
                                            const Seed& seed);

}  // namespace hamstream

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hamstream/bitio.hpp"
#include "hamstream/prefix_index.hpp"
#include "hamstream/pstable.hpp"
#include "hamstream/rng.hpp"
#include "hamstream/seqstructs.hpp"
#include "hamstream/types.hpp"

namespace hamstream {

enum class Party { alice = 0, bob = 1, charlie = 2 };
const char* party_name(Party p);

struct Message {
    Party sender;
    Party receiver;
    std::string payload_id;
    std::size_t bits;
};

// Messages only move forward: each one goes from a party to the next, and the
// sender never moves backwards.
class Transcript {
public:
    void add(Party sender, Party receiver, std::string payload_id, std::size_t bits);
    const std::vector<Message>& messages() const { return messages_; }
    std::size_t total_bits() const;
    std::string to_jsonl() const;

private:
    std::vector<Message> messages_;
};

struct ProtocolConfig {
    double eps = 0.5;
    std::size_t instances = 9;
    double c_m = 64.0;
    std::size_t test_k = 0;
    std::uint32_t sigma = 0;  // 0: inferred from the inputs, at least 2
};

std::uint32_t infer_sigma(TextView a, TextView b);

// Public randomness shared by all parties: independent sketchers per instance.
std::vector<PStableSketcher> make_sketchers(double eps, std::uint32_t sigma, const Seed& seed,
                                            std::size_t instances, std::size_t width, std::uint32_t label,
                                            double c_m);

// One item per shift a: the sketch sum_x Y[:, x] * g[a + x] over x < min(cols, |g| - a).
std::vector<StableSketch> shifted_sketches(const PStableSketcher& s, TextView g, std::size_t cols,
                                           std::size_t shifts);
// One item per alignment i: sum_u Y[:, i + u] * f[u] over i + u < n.
std::vector<StableSketch> placed_sketches(const PStableSketcher& s, TextView f, std::size_t n);

struct Problem1Result {
    std::vector<double> estimates;  // n + 1 alignments
    Transcript transcript;
    Problem1Index index;
};

Problem1Result run_problem1(TextView pattern, TextView text, const ProtocolConfig& cfg, const Seed& seed);

struct Problem2Params {
    std::size_t n = 0;
    std::size_t B = 0;
    std::size_t blocks = 0;  // ceil(n / B)
    double tau = 0.0;        // 2 B / eps
    double period_bound = 0.0;  // (2 + eps) tau
    double eps = 0.0;

    static Problem2Params make(std::size_t n, double eps);
    // |P[0, n - jB)|, clamped at zero.
    std::size_t prefix_len(std::size_t j) const;
};

// A payload as it crosses a party boundary: named bit sections.
struct Wire {
    std::vector<std::pair<std::string, BitWriter>> sections;
    std::size_t total_bits() const;
    const BitWriter& section(const std::string& name) const;
};

struct AlicePayload {
    std::size_t n = 0;
    std::uint32_t sigma = 2;
    std::size_t instances = 0;
    std::size_t rows = 0;
    bool extended = false;
    double p = 0.0;
    double scale = 0.0;
    std::vector<std::vector<StableSketch>> suffix;  // [s][instance], P[s, n), s < B
    std::vector<std::vector<StableSketch>> prefix;  // [j][instance], P[0, n - jB), j < blocks
    std::size_t j_star = 0;
    std::optional<RleEncoding> rle;  // empty only when the encoded prefix is empty
};

struct SmallAlignment {
    std::size_t alignment;
    double estimate;
};

struct Mismatch {
    std::size_t offset;
    Symbol symbol;
};

struct BobPayload {
    AlicePayload alice;
    std::vector<std::vector<StableSketch>> borders;  // [g][instance], T1[gB, n)
    std::vector<SmallAlignment> small;
    bool has_p = false;
    std::size_t p = 0;
    std::size_t j_star_star = 0;
    std::vector<Mismatch> mismatches;
    Text last_block;
};

Wire p2_alice_message(TextView pattern, const ProtocolConfig& cfg, const Seed& seed);
AlicePayload decode_alice(const Wire& w);

Wire p2_bob_message(const Wire& alice, TextView t1, const ProtocolConfig& cfg, const Seed& seed);
BobPayload decode_bob(const Wire& w);

struct CharlieResult {
    std::vector<double> estimates;  // n + 1 alignments
    std::size_t known_start = 0;    // T1[known_start, n) was reconstructed
    Text reconstructed;
    Transcript transcript;
};

CharlieResult p2_charlie_eval(const Wire& bob, TextView t2, const ProtocolConfig& cfg, const Seed& seed);

struct Problem2Result {
    std::vector<double> estimates;
    Transcript transcript;
    Problem2Params params;
    BobPayload bob;
    CharlieResult charlie;
};

Problem2Result run_problem2(TextView pattern, TextView text, const ProtocolConfig& cfg, const Seed& seed);

}  // namespace hamstream

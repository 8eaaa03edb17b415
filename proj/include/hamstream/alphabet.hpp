#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hamstream/rng.hpp"
#include "hamstream/streaming.hpp"
#include "hamstream/types.hpp"

namespace hamstream {

// Symbol c in [0, sigma) becomes sigma bits with a single 1 at offset c.
Text onehot_map(TextView s, std::uint32_t sigma);

// Uniform random maps of the alphabet onto {0, 1}. Bit of symbol c under map j is
// bit (c mod 512) of block j * ceil(sigma / 512) + c / 512 on the karloff stream.
class KarloffFamily {
public:
    KarloffFamily(std::size_t count, const Seed& seed, std::uint32_t sigma);

    // ceil(c_k * eps^-2 * log2(n)^2)
    static std::size_t count_for(double eps, std::size_t n, double c_k = 1.0);

    std::size_t count() const { return count_; }
    std::uint32_t sigma() const { return sigma_; }
    Symbol map(std::size_t j, Symbol c) const { return table_[j * sigma_ + c]; }
    Text apply(std::size_t j, TextView s) const;

private:
    std::size_t count_;
    std::uint32_t sigma_;
    std::vector<std::uint8_t> table_;
};

// 2 * mean of the per-map distances.
double karloff_estimate(std::span<const double> per_map);

enum class Reduction { karloff, onehot };

struct GeneralConfig {
    double eps = 0.25;
    std::uint32_t sigma = 0;  // 0: inferred
    std::size_t maps = 0;     // 0: KarloffFamily::count_for
    double c_k = 1.0;
    std::size_t inner_instances = 1;
    Reduction reduction = Reduction::karloff;
    PrefixDistanceTask::Method method = PrefixDistanceTask::Method::fft;
};

struct GeneralOutput {
    std::size_t position = 0;
    double estimate = 0.0;
};

// Karloff: one binary engine at eps / 3 per map, fed the mapped symbols.
// One-hot: a single binary engine at eps over the doubled strings, halved.
// Per alignment, the binary engine estimate under each map in map order. The
// maps of a family of m are the first m maps of any larger family.
std::vector<std::vector<double>> karloff_per_map(TextView pattern, TextView text, const GeneralConfig& cfg,
                                                 const Seed& seed);

std::vector<GeneralOutput> stream_general(TextView pattern, TextView text, const GeneralConfig& cfg,
                                          const Seed& seed);

}  // namespace hamstream

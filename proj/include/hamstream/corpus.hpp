#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hamstream/rng.hpp"
#include "hamstream/types.hpp"

namespace hamstream {

// Synthetic inputs. Every generator draws from the data stream of `seed` under
// its own label, so outputs depend only on the arguments.
Text random_text(std::size_t len, std::uint32_t sigma, const Seed& seed, std::uint32_t label = 0);

struct Plant {
    std::size_t position;
    std::size_t distance;
};

// Random text with copies of `pattern` at the given positions, each with exactly
// `distance` substituted symbols. Later plants overwrite earlier ones.
Text planted_text(TextView pattern, std::size_t len, std::uint32_t sigma, const std::vector<Plant>& plants,
                  const Seed& seed, std::uint32_t label = 1);

// A random period of length `period` repeated to `len`, then floor(x / 2)
// substitutions, so the self-overlap at shift `period` has at most x mismatches.
Text periodic_text(std::size_t len, std::size_t period, std::size_t x, std::uint32_t sigma, const Seed& seed,
                   std::uint32_t label = 2);

// Runs with lengths uniform in [1, max_run], each run a symbol different from the last.
Text runs_text(std::size_t len, std::size_t max_run, std::uint32_t sigma, const Seed& seed,
               std::uint32_t label = 3);

}  // namespace hamstream

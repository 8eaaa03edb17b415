#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hamstream {

using Symbol = std::uint32_t;
using Text = std::vector<Symbol>;
using TextView = std::span<const Symbol>;

struct DistanceEstimate {
    enum class Kind { exact, sketched };

    double value = 0.0;
    double eps = 0.0;
    Kind kind = Kind::sketched;
};

}  // namespace hamstream

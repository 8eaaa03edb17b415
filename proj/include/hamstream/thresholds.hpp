#pragma once

#include <string>

namespace hamstream {

// Empirical success-rate targets shared by the tests and the documentation.
struct Thresholds {
    double raw_success = 0.6;
    double end_to_end = 0.9;
    double amplified = 0.95;

    friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

Thresholds builtin_thresholds();
Thresholds load_thresholds(const std::string& path);
// config/thresholds.json in the source tree.
std::string default_thresholds_path();

}  // namespace hamstream

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "hamstream/rng.hpp"
#include "hamstream/types.hpp"

namespace hamstream {

// p = eps for binary alphabets, otherwise eps / log2(sigma) clamped to [0.05, 2].
double stability_for(double eps, std::uint32_t sigma);
// max(16, ceil(c_m / eps^2)).
std::size_t pstable_rows(double eps, double c_m = 64.0);
// Below this p, sums are kept as unevaluated double-double pairs.
constexpr double kExtendedBelow = 0.2;

// hi + lo is the value of each entry; lo is empty unless the sketcher is extended.
struct StableSketch {
    std::vector<double> hi;
    std::vector<double> lo;
    std::size_t offset = 0;
    std::size_t len = 0;
};

class PStableSketcher {
public:
    // Columns [0, width) are generated once and kept; others are recomputed per call.
    PStableSketcher(std::size_t m, double p, const Seed& seed, std::uint32_t stream, double scale,
                    std::size_t width = 0);

    std::size_t rows() const { return m_; }
    double p() const { return p_; }
    double scale() const { return scale_; }
    bool extended() const { return extended_; }
    std::size_t width() const { return width_; }
    // Bits charged per transmitted entry.
    std::size_t real_bits() const { return extended_ ? 128 : 64; }

    // Pointer to Y[:, col]; valid until the next call for an uncached column on this thread.
    const double* column(std::size_t col) const;

    StableSketch zero(std::size_t offset, std::size_t len) const;
    // Y[:, offset + j] * x[j] summed over j.
    StableSketch sketch(TextView x, std::size_t offset) const;
    void accumulate(StableSketch& sk, std::size_t col, double coef) const;

private:
    std::size_t m_;
    double p_;
    double scale_;
    bool extended_;
    std::size_t width_;
    StableSource source_;
    std::vector<double> cache_;
};

void two_sum_into(double& hi, double& lo, double v);

// Entrywise a - b (and the compensated difference for extended sketches).
std::vector<double> sketch_difference(const StableSketch& a, const StableSketch& b);
StableSketch sketch_add(const StableSketch& a, const StableSketch& b, double coef_b);

// (median_i |a_i - b_i| / scale)^p
DistanceEstimate pstable_estimate(const PStableSketcher& s, const StableSketch& a, const StableSketch& b);
double pstable_estimate_diff(double p, double scale, std::vector<double> diff);

// Median over trials of the sample median of |Y| across m rows (unit distance).
double calibrate_scale(double p, std::size_t m, std::size_t trials, const Seed& seed);

// Memoized calibration keyed by (p, m); values can be persisted as JSON.
class CalibrationTable {
public:
    static CalibrationTable& global();

    double scale(double p, std::size_t m);
    void set(double p, std::size_t m, double scale);
    std::string to_json() const;
    void load_json(const std::string& text);

    static constexpr std::size_t kTrials = 2000;
    static Seed calibration_seed();

private:
    mutable std::mutex mu_;
    std::map<std::pair<long long, std::size_t>, double> table_;
};

}  // namespace hamstream

#include <doctest.h>

#include <cmath>
#include <vector>

#include "hamstream/corpus.hpp"
#include "hamstream/pstable.hpp"

using namespace hamstream;

namespace {

PStableSketcher make(double eps, std::uint32_t sigma, std::uint64_t seed, std::size_t width = 0) {
    const double p = stability_for(eps, sigma);
    const std::size_t m = pstable_rows(eps);
    return PStableSketcher(m, p, Seed::from_u64(seed), stream_id(Purpose::stable),
                           CalibrationTable::global().scale(p, m), width);
}

}  // namespace

TEST_CASE("stability and rows") {
    CHECK(stability_for(0.5, 2) == 0.5);
    CHECK(stability_for(3.0, 2) == 2.0);
    CHECK(stability_for(0.5, 4) == doctest::Approx(0.25));
    CHECK(stability_for(0.01, 256) == 0.05);
    CHECK_THROWS(stability_for(0.0, 2));
    CHECK(pstable_rows(0.5) == 256);
    CHECK(pstable_rows(0.25) == 1024);
    CHECK(pstable_rows(4.0) == 16);
}

TEST_CASE("sketch is linear in the input") {
    const PStableSketcher s = make(0.5, 4, 1, 8);
    const Text x{1, 0, 3, 2, 0, 1}, y{0, 2, 1, 1, 3, 0};
    Text sum(6);
    for (std::size_t i = 0; i < 6; ++i) sum[i] = x[i] + y[i];
    const auto a = s.sketch(x, 2), b = s.sketch(y, 2), c = s.sketch(sum, 2);
    const auto ab = sketch_add(a, b, 1.0);
    for (std::size_t i = 0; i < s.rows(); ++i) CHECK(ab.hi[i] == doctest::Approx(c.hi[i]).epsilon(1e-12));
}

TEST_CASE("cached and uncached columns agree") {
    const PStableSketcher cached = make(0.5, 2, 2, 16), plain = make(0.5, 2, 2, 0);
    for (std::size_t c : {0u, 5u, 15u}) {
        std::vector<double> a(cached.column(c), cached.column(c) + cached.rows());
        std::vector<double> b(plain.column(c), plain.column(c) + plain.rows());
        CHECK(a == b);
    }
}

TEST_CASE("identical inputs estimate to zero") {
    const PStableSketcher s = make(0.5, 4, 3);
    const Text x{1, 2, 3, 0, 1};
    CHECK(pstable_estimate(s, s.sketch(x, 0), s.sketch(x, 0)).value == 0.0);
}

TEST_CASE("calibration") {
    CHECK_THROWS(calibrate_scale(1.0, 16, 10, Seed::from_u64(1)));
    // At p = 1 the median of |Cauchy| is 1.
    CHECK(calibrate_scale(1.0, 257, 2000, Seed::from_u64(4)) == doctest::Approx(1.0).epsilon(0.05));
    // At p = 2 samples are N(0, 2): the median of |Y| is sqrt(2) * 0.6745.
    CHECK(calibrate_scale(2.0, 257, 2000, Seed::from_u64(4)) == doctest::Approx(0.9539).epsilon(0.05));
    CalibrationTable t;
    t.set(0.5, 64, 1.25);
    CHECK(t.scale(0.5, 64) == 1.25);
    CalibrationTable u;
    u.load_json(t.to_json());
    CHECK(u.scale(0.5, 64) == 1.25);
    CHECK_THROWS(u.load_json("{}"));
}

TEST_CASE("binary estimates are close to the Hamming distance") {
    const double eps = 0.5;
    int ok = 0;
    const int trials = 40;
    for (int t = 0; t < trials; ++t) {
        const PStableSketcher s = make(eps, 2, 100 + t);
        const Seed seed = Seed::from_u64(t);
        const Text x = random_text(400, 2, seed, 0), y = random_text(400, 2, seed, 1);
        std::size_t d = 0;
        for (std::size_t i = 0; i < 400; ++i) d += x[i] != y[i];
        const double est = pstable_estimate(s, s.sketch(x, 0), s.sketch(y, 0)).value;
        ok += est >= d / (1 + eps) && est <= d * (1 + eps);
    }
    CHECK(ok >= 0.9 * trials);
}

TEST_CASE("general alphabet estimates approach the mismatch count") {
    // |x - y|^p for p < log(1+eps)/log(sigma) sits within a 1 + eps factor of [x != y].
    const double eps = 0.5;
    const std::uint32_t sigma = 8;
    int ok = 0;
    const int trials = 30;
    for (int t = 0; t < trials; ++t) {
        const PStableSketcher s = make(eps, sigma, 300 + t);
        const Seed seed = Seed::from_u64(50 + t);
        const Text x = random_text(300, sigma, seed, 0), y = random_text(300, sigma, seed, 1);
        std::size_t d = 0;
        for (std::size_t i = 0; i < 300; ++i) d += x[i] != y[i];
        const double est = pstable_estimate(s, s.sketch(x, 0), s.sketch(y, 0)).value;
        ok += est >= d / (1 + eps) / (1 + eps) && est <= d * (1 + eps) * (1 + eps);
    }
    CHECK(ok >= 0.9 * trials);
}

TEST_CASE("extended accumulation at small p") {
    const PStableSketcher s(16, 0.1, Seed::from_u64(7), stream_id(Purpose::stable), 1.0, 4);
    CHECK(s.extended());
    CHECK(s.real_bits() == 128);
    const Text x{1, 1, 0, 1};
    const auto a = s.sketch(x, 0);
    CHECK(a.lo.size() == 16);
    for (auto v : sketch_difference(a, a)) CHECK(v == 0.0);
    double two_hi = 1e16, lo = 0.0;
    two_sum_into(two_hi, lo, 1.0);
    CHECK(two_hi + 0.0 == 1e16);
    CHECK(lo == 1.0);
}

TEST_CASE("constructor validation") {
    CHECK_THROWS(PStableSketcher(8, 1.0, Seed{}, 3, 1.0));
    CHECK_THROWS(PStableSketcher(16, 1.0, Seed{}, 3, 0.0));
}

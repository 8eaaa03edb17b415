#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "hamstream/rng.hpp"

using namespace hamstream;

TEST_CASE("seed hex round trip and validation") {
    const Seed s = Seed::from_u64(0x0123456789abcdefULL);
    CHECK(s.hex().substr(0, 16) == "efcdab8967452301");
    CHECK(Seed::from_hex(s.hex()) == s);
    CHECK_THROWS(Seed::from_hex("abc"));
    CHECK_THROWS(Seed::from_hex(std::string(63, '0') + "g"));
}

TEST_CASE("chacha20 block matches the published test vector") {
    std::array<std::uint8_t, 32> key{};
    for (int i = 0; i < 32; ++i) key[i] = static_cast<std::uint8_t>(i);
    // nonce 00000009 0000004a 00000000, block counter 1
    const std::uint32_t stream = 0x09000000u;
    const std::uint64_t counter = (0x4a000000ULL << 32) | 1;
    std::uint8_t out[64];
    prf_block(Seed(key), stream, counter, out);
    const std::uint8_t expect[16] = {0x10, 0xf1, 0xe7, 0xe4, 0xd1, 0x3b, 0x59, 0x15,
                                     0x50, 0x0f, 0xdd, 0x1f, 0xa3, 0x20, 0x71, 0xc4};
    CHECK(std::equal(expect, expect + 16, out));
}

TEST_CASE("prf blocks are consecutive and refuse to wrap") {
    const Seed s = Seed::from_u64(7);
    std::uint8_t many[192], one[64];
    prf_blocks(s, 3, 10, 3, many);
    prf_block(s, 3, 12, one);
    CHECK(std::equal(one, one + 64, many + 128));
    CHECK_THROWS(prf_blocks(s, 3, 0xffffffffULL, 2, many));
}

TEST_CASE("derived seeds are deterministic and distinct") {
    const Seed s = Seed::from_u64(42);
    CHECK(s.derive(1, 5) == s.derive(1, 5));
    std::set<std::string> seen;
    for (std::uint32_t l = 0; l < 4; ++l)
        for (std::uint64_t i = 0; i < 16; ++i) seen.insert(s.derive(l, i).hex());
    CHECK(seen.size() == 64);
}

TEST_CASE("sign columns agree with single entries and are balanced") {
    const SignSource src(Seed::from_u64(1), stream_id(Purpose::matrix, 2));
    std::vector<std::uint64_t> words;
    std::size_t ones = 0, total = 0;
    for (std::uint64_t col = 0; col < 40; ++col) {
        src.column(col, 700, words);
        REQUIRE(words.size() == (700 + 63) / 64);
        for (std::size_t row = 0; row < 700; ++row) {
            const int bit = static_cast<int>((words[row / 64] >> (row % 64)) & 1);
            CHECK(src.sign_at(row, col) == (bit ? 1 : -1));
            ones += bit;
            ++total;
        }
        CHECK((words.back() >> (700 % 64)) == 0);
    }
    const double frac = static_cast<double>(ones) / static_cast<double>(total);
    CHECK(std::fabs(frac - 0.5) < 4.0 * 0.5 / std::sqrt(static_cast<double>(total)));
}

TEST_CASE("stable source matches its column form") {
    const StableSource src(Seed::from_u64(9), stream_id(Purpose::stable), 0.7);
    std::vector<double> col(37);
    src.column(5, col.size(), col.data());
    for (std::size_t r = 0; r < col.size(); ++r) CHECK(col[r] == src.stable_at(r, 5));
    CHECK_THROWS(StableSource(Seed{}, 1, 0.0));
    CHECK_THROWS(StableSource(Seed{}, 1, 2.5));
}

namespace {

std::vector<double> samples(double p, std::size_t count) {
    const StableSource src(Seed::from_u64(11), stream_id(Purpose::stable, 1), p);
    std::vector<double> v(count);
    src.column(0, count, v.data());
    return v;
}

double ks_statistic(std::vector<double> v, double (*cdf)(double)) {
    std::sort(v.begin(), v.end());
    double d = 0.0;
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = cdf(v[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

double normal_sd2_cdf(double x) { return 0.5 * std::erfc(-x / 2.0); }  // N(0, 2)
double cauchy_cdf(double x) { return 0.5 + std::atan(x) / M_PI; }

}  // namespace

TEST_CASE("stable samples follow the expected laws") {
    const std::size_t n = 20000;
    const double crit = 1.63 / std::sqrt(static_cast<double>(n));  // 1% level
    CHECK(ks_statistic(samples(2.0, n), normal_sd2_cdf) < crit);
    CHECK(ks_statistic(samples(1.0, n), cauchy_cdf) < crit);
    // Symmetry at a small p.
    auto v = samples(0.3, n);
    const auto neg = std::count_if(v.begin(), v.end(), [](double x) { return x < 0; });
    CHECK(std::fabs(static_cast<double>(neg) / n - 0.5) < 0.02);
}

TEST_CASE("prf stream below is uniform and deterministic") {
    PrfStream a(Seed::from_u64(3), stream_id(Purpose::data)), b(Seed::from_u64(3), stream_id(Purpose::data));
    std::vector<std::size_t> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto x = a.below(7);
        CHECK(x == b.below(7));
        ++counts[x];
    }
    for (auto c : counts) CHECK(std::fabs(static_cast<double>(c) - 10000.0) < 400.0);
    CHECK_THROWS(a.below(0));
    const double u = a.uniform();
    CHECK((u > 0.0 && u < 1.0));
}

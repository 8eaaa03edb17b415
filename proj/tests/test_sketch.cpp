#include <doctest.h>

#include <cmath>
#include <vector>

#include "hamstream/corpus.hpp"
#include "hamstream/sketch.hpp"

using namespace hamstream;

namespace {

Sketcher make(std::size_t rows, std::size_t B, std::uint64_t seed, std::uint32_t inst = 0) {
    return Sketcher(rows, B, SignSource(Seed::from_u64(seed), stream_id(Purpose::matrix, inst)));
}

// Dense M * x straight from sign_at.
std::vector<std::int64_t> matrix_product(const Sketcher& s, const std::vector<std::int64_t>& x) {
    std::vector<std::int64_t> out(s.rows(), 0);
    for (std::size_t r = 0; r < s.rows(); ++r)
        for (std::size_t c = 0; c < x.size(); ++c) out[r] += s.source().sign_at(r, c) * x[c];
    return out;
}

std::size_t hd(const Text& a, const Text& b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

// Binary pair of length len at distance exactly d.
std::pair<Text, Text> pair_at(std::size_t len, std::size_t d, const Seed& seed) {
    Text a = random_text(len, 2, seed, 0);
    Text b = a;
    PrfStream g(seed, stream_id(Purpose::data, 9));
    std::vector<std::size_t> idx(len);
    for (std::size_t i = 0; i < len; ++i) idx[i] = i;
    for (std::size_t i = 0; i < d; ++i) {
        std::swap(idx[i], idx[i + g.below(len - i)]);
        b[idx[i]] ^= 1;
    }
    return {a, b};
}

}  // namespace

TEST_CASE("parameters") {
    CHECK(sketch_k(0.5) == 2);
    CHECK(sketch_k(0.3) == 4);
    CHECK(sketch_k(0.25) == 4);
    CHECK(sketch_rows_for_k(2) == 36);
    CHECK_THROWS(sketch_k(0.0));
}

TEST_CASE("zero block and unit vector") {
    const Sketcher s = make(36, 4, 1);
    const Sketch z = sketch_block(s, Text{0, 0, 0});
    for (auto v : z.values) CHECK(v == 0);
    const Sketch e = sketch_block(s, Text{1});
    for (std::size_t r = 0; r < 36; ++r) CHECK(e.values[r] == s.source().sign_at(r, 0));
    CHECK_THROWS(sketch_block(s, Text{0, 0, 0, 0, 0}));
    CHECK_THROWS(sketch_block(s, Text{2}));
}

TEST_CASE("difference of sketches equals the sketch of the signed difference") {
    const Sketcher s = make(36, 32, 2);
    for (std::uint64_t t = 0; t < 100; ++t) {
        const Seed seed = Seed::from_u64(t);
        const Text x = random_text(32, 2, seed, 0), y = random_text(32, 2, seed, 1);
        std::vector<std::int64_t> diff(32);
        for (std::size_t i = 0; i < 32; ++i) diff[i] = static_cast<std::int64_t>(x[i]) - static_cast<std::int64_t>(y[i]);
        const auto a = sketch_block(s, x).values, b = sketch_block(s, y).values;
        const auto m = matrix_product(s, diff);
        for (std::size_t r = 0; r < 36; ++r) CHECK(a[r] - b[r] == m[r]);
    }
}

TEST_CASE("disjoint supports add") {
    const Sketcher s = make(36, 16, 3);
    Text x(16, 0), y(16, 0), u(16, 0);
    for (std::size_t i = 0; i < 16; ++i) {
        if (i % 3 == 0) x[i] = 1;
        if (i % 3 == 1) y[i] = 1;
        u[i] = x[i] | y[i];
    }
    const auto a = sketch_block(s, x).values, b = sketch_block(s, y).values, c = sketch_block(s, u).values;
    for (std::size_t r = 0; r < 36; ++r) CHECK(a[r] + b[r] == c[r]);
}

TEST_CASE("incremental updates equal the batch sketch") {
    const Sketcher s = make(36, 4, 4);
    Sketch sk = empty_sketch(s);
    const Text bits{0, 1, 1, 0};
    update_sketch(sk, s, 0, 0);
    CHECK(sk.logical_len == 1);
    for (auto v : sk.values) CHECK(v == 0);
    for (std::size_t i = 1; i < 4; ++i) update_sketch(sk, s, i, bits[i]);
    CHECK(sk.values == sketch_block(s, bits).values);
    CHECK(sk.logical_len == 4);
    CHECK_THROWS(update_sketch(sk, s, 4, 1));
    Sketch other = empty_sketch(s);
    CHECK_THROWS(update_sketch(other, s, 1, 1));
    CHECK_THROWS(update_sketch(other, make(36, 4, 5), 0, 1));
}

TEST_CASE("combine_super") {
    const Sketcher s = make(36, 8, 6);
    const Text a{1, 0, 1, 1, 0, 0, 1, 0};
    const Sketch sa = sketch_block(s, a);
    const std::vector<int> plus{1};
    CHECK(combine_super(std::vector<Sketch>{sa}, plus).values == sa.values);
    const std::vector<int> pm{1, -1};
    for (auto v : combine_super(std::vector<Sketch>{sa, sa}, pm).values) CHECK(v == 0);

    const Text b{0, 1, 1, 0, 1, 0, 0, 1}, c{1, 1, 1, 0, 0, 0, 0, 1};
    const std::vector<int> sg{1, -1, -1};
    const auto super = combine_super(std::vector<Sketch>{sa, sketch_block(s, b), sketch_block(s, c)}, sg);
    std::vector<std::int64_t> direct(36, 0);
    const Text* blocks[3] = {&a, &b, &c};
    for (std::size_t r = 0; r < 36; ++r)
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t col = 0; col < 8; ++col)
                direct[r] += sg[i] * s.source().sign_at(r, col) * static_cast<std::int64_t>((*blocks[i])[col]);
    CHECK(super.values == direct);

    CHECK_THROWS(combine_super(std::vector<Sketch>{sa, sketch_block(make(36, 8, 7), a)}, pm));
    CHECK_THROWS(combine_super(std::vector<Sketch>{sa}, pm));
    const std::vector<int> bad{2};
    CHECK_THROWS(combine_super(std::vector<Sketch>{sa}, bad));
}

TEST_CASE("estimate of identical inputs is zero") {
    const std::vector<std::int64_t> a{3, -1, 4};
    CHECK(estimate_distance(a, a, 0.3).value == 0.0);
    CHECK_THROWS(estimate_distance(a, std::vector<std::int64_t>{1}, 0.3));
}

TEST_CASE("median_amplify") {
    CHECK(median_amplify({5}) == 5);
    CHECK(median_amplify({1, 100, 3}) == 3);
    CHECK(median_amplify({4, 1, 3, 2}) == 2);
    CHECK_THROWS(median_amplify({}));
}

TEST_CASE("serialization round trip") {
    const Sketcher s = make(36, 8, 8);
    const Sketch sk = sketch_block(s, Text{1, 1, 0, 1});
    const auto bytes = serialize_sketch(sk);
    CHECK(bytes.size() == 16 + 8 * 36);
    const Sketch back = deserialize_sketch(bytes);
    CHECK(back.values == sk.values);
    CHECK(back.logical_len == 4);
    auto cut = bytes;
    cut.pop_back();
    CHECK_THROWS(deserialize_sketch(cut));
}

TEST_CASE("estimator mean over seeds") {
    const double eps = 0.3;
    const std::size_t r = sketch_rows_for_k(sketch_k(eps));
    const auto [x, y] = pair_at(512, 37, Seed::from_u64(100));
    REQUIRE(hd(x, y) == 37);
    double sum = 0.0;
    const int seeds = 200;
    for (int t = 0; t < seeds; ++t) {
        const Sketcher s = make(r, 512, 1000 + t);
        sum += estimate_distance(sketch_block(s, x).values, sketch_block(s, y).values, eps).value;
    }
    CHECK(std::fabs(sum / seeds / 37.0 - 1.0) <= 0.05);
}

TEST_CASE("raw and amplified success at eps 0.3") {
    const double eps = 0.3, et = eps / 3.0;
    const std::size_t r = sketch_rows_for_k(sketch_k(eps));
    const auto [x, y] = pair_at(1024, 100, Seed::from_u64(200));
    const int seeds = 1000;
    std::vector<double> est;
    for (int t = 0; t < seeds * 9; ++t) {
        const Sketcher s = make(r, 1024, 5000 + t);
        est.push_back(estimate_distance(sketch_block(s, x).values, sketch_block(s, y).values, eps).value);
    }
    auto ok = [&](double v) { return v >= (1.0 - et) * 100.0 && v <= (1.0 + et) * 100.0; };
    int raw = 0, amp = 0;
    for (int t = 0; t < seeds; ++t) raw += ok(est[static_cast<std::size_t>(t)]);
    for (int t = 0; t < seeds; ++t)
        amp += ok(median_amplify(std::vector<double>(est.begin() + 9 * t, est.begin() + 9 * t + 9)));
    CHECK(raw >= 0.6 * seeds);
    CHECK(amp >= 0.95 * seeds);
}

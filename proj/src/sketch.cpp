#include "hamstream/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace hamstream {

std::size_t sketch_k(double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
    return static_cast<std::size_t>(std::ceil(1.0 / eps - 1e-12));
}

std::size_t sketch_rows_for_k(std::size_t k) { return 9 * k * k; }

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h * 0xff51afd7ed558ccdULL;
}

}  // namespace

Sketcher::Sketcher(std::size_t rows, std::size_t block_len, SignSource source)
    : rows_(rows), block_len_(block_len), source_(std::move(source)) {
    if (rows == 0) throw std::invalid_argument("Sketcher: rows must be positive");
    if (block_len == 0) throw std::invalid_argument("Sketcher: block length must be positive");
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (auto b : source_.seed().bytes()) h = mix(h, b);
    h = mix(h, source_.stream());
    h = mix(h, rows_);
    provenance_ = mix(h, block_len_);
}

void Sketcher::column_bits(std::size_t col, std::vector<std::uint64_t>& bits) const {
    source_.column(col, rows_, bits);
}

void Sketcher::add_bits(std::span<std::int64_t> acc, const std::vector<std::uint64_t>& bits,
                        std::int64_t coef) {
    const std::size_t r = acc.size();
    for (std::size_t j = 0; j < r; ++j) {
        const std::int64_t bit = static_cast<std::int64_t>((bits[j >> 6] >> (j & 63)) & 1);
        acc[j] += coef * (2 * bit - 1);
    }
}

void Sketcher::add_column(std::span<std::int64_t> acc, std::size_t col, std::int64_t coef) const {
    if (acc.size() != rows_) throw std::invalid_argument("add_column: accumulator size mismatch");
    std::vector<std::uint64_t> bits;
    column_bits(col, bits);
    add_bits(acc, bits, coef);
}

Sketch empty_sketch(const Sketcher& s) {
    Sketch sk;
    sk.values.assign(s.rows(), 0);
    sk.provenance = s.provenance();
    return sk;
}

Sketch sketch_block(const Sketcher& s, TextView block) {
    if (block.size() > s.block_len()) throw std::invalid_argument("sketch_block: block longer than B");
    Sketch sk = empty_sketch(s);
    std::vector<std::uint64_t> bits;
    for (std::size_t c = 0; c < block.size(); ++c) {
        if (block[c] > 1) throw std::invalid_argument("sketch_block: non-binary symbol");
        if (block[c]) {
            s.column_bits(c, bits);
            Sketcher::add_bits(sk.values, bits, 1);
        }
    }
    sk.logical_len = block.size();
    return sk;
}

void update_sketch(Sketch& sk, const Sketcher& s, std::size_t pos, Symbol bit) {
    if (sk.provenance != s.provenance()) throw std::invalid_argument("update_sketch: sketcher mismatch");
    if (pos != sk.logical_len) throw std::invalid_argument("update_sketch: position out of order");
    if (pos >= s.block_len()) throw std::out_of_range("update_sketch: block is full");
    if (bit > 1) throw std::invalid_argument("update_sketch: non-binary symbol");
    if (bit) s.add_column(sk.values, pos, 1);
    ++sk.logical_len;
}

SuperSketch combine_super(std::span<const Sketch> sketches, std::span<const int> signs) {
    if (sketches.size() != signs.size()) throw std::invalid_argument("combine_super: length mismatch");
    if (sketches.empty()) throw std::invalid_argument("combine_super: no sketches");
    SuperSketch out;
    out.provenance = sketches[0].provenance;
    out.values.assign(sketches[0].values.size(), 0);
    out.block_count = sketches.size();
    for (std::size_t b = 0; b < sketches.size(); ++b) {
        const Sketch& sk = sketches[b];
        if (sk.provenance != out.provenance || sk.values.size() != out.values.size())
            throw std::invalid_argument("combine_super: mixed sketcher provenance");
        if (signs[b] != 1 && signs[b] != -1) throw std::invalid_argument("combine_super: sign must be +-1");
        for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] += signs[b] * sk.values[j];
    }
    return out;
}

unsigned __int128 squared_distance(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("estimate_distance: length mismatch");
    unsigned __int128 acc = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const __int128 d = static_cast<__int128>(a[j]) - b[j];
        acc += static_cast<unsigned __int128>(d * d);
    }
    return acc;
}

DistanceEstimate estimate_distance(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                                   double eps) {
    const unsigned __int128 n2 = squared_distance(a, b);
    DistanceEstimate e;
    e.value = a.empty() ? 0.0 : static_cast<double>(n2) / static_cast<double>(a.size());
    e.eps = eps;
    e.kind = DistanceEstimate::Kind::sketched;
    return e;
}

double median_amplify(std::vector<double> estimates) {
    if (estimates.empty()) throw std::invalid_argument("median_amplify: empty list");
    auto mid = estimates.begin() + static_cast<std::ptrdiff_t>((estimates.size() - 1) / 2);
    std::nth_element(estimates.begin(), mid, estimates.end());
    return *mid;
}

namespace {

void put_le64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le64(const std::vector<std::uint8_t>& in, std::size_t pos) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | in[pos + static_cast<std::size_t>(i)];
    return v;
}

}  // namespace

std::vector<std::uint8_t> serialize_sketch(const Sketch& sk) {
    std::vector<std::uint8_t> out;
    out.reserve(16 + 8 * sk.values.size());
    put_le64(out, sk.values.size());
    put_le64(out, sk.logical_len);
    for (std::int64_t v : sk.values) put_le64(out, static_cast<std::uint64_t>(v));
    return out;
}

Sketch deserialize_sketch(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16) throw std::invalid_argument("deserialize_sketch: truncated header");
    const std::uint64_t r = get_le64(bytes, 0);
    if (bytes.size() != 16 + 8 * r) throw std::invalid_argument("deserialize_sketch: size mismatch");
    Sketch sk;
    sk.logical_len = get_le64(bytes, 8);
    sk.values.resize(r);
    for (std::uint64_t j = 0; j < r; ++j) sk.values[j] = static_cast<std::int64_t>(get_le64(bytes, 16 + 8 * j));
    return sk;
}

}  // namespace hamstream

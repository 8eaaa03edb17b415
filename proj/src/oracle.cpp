#include "hamstream/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>

namespace hamstream::oracle {

std::size_t hamming(TextView a, TextView b) {
    if (a.size() != b.size()) throw std::invalid_argument("hamming: length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

std::size_t hamming_bitparallel(TextView a, TextView b) {
    if (a.size() != b.size()) throw std::invalid_argument("hamming: length mismatch");
    auto pack = [](TextView s) {
        std::vector<std::uint64_t> w((s.size() + 63) / 64, 0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] > 1) throw std::invalid_argument("hamming_bitparallel: non-binary symbol");
            w[i / 64] |= static_cast<std::uint64_t>(s[i]) << (i % 64);
        }
        return w;
    };
    auto wa = pack(a), wb = pack(b);
    std::size_t d = 0;
    for (std::size_t i = 0; i < wa.size(); ++i) d += std::popcount(wa[i] ^ wb[i]);
    return d;
}

std::vector<std::size_t> sliding_hamming(TextView pattern, TextView text) {
    if (pattern.size() > text.size()) throw std::invalid_argument("sliding_hamming: pattern longer than text");
    std::vector<std::size_t> out(text.size() - pattern.size() + 1);
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = hamming(pattern, text.subspan(a, pattern.size()));
    return out;
}

std::size_t OracleReport::count_at_most(double tau) const {
    return static_cast<std::size_t>(
        std::count_if(distances.begin(), distances.end(), [tau](std::size_t d) { return d <= tau; }));
}

OracleReport report(TextView pattern, TextView text) {
    OracleReport r;
    r.distances = sliding_hamming(pattern, text);
    auto it = std::min_element(r.distances.begin(), r.distances.end());
    r.min = *it;
    r.argmin = static_cast<std::size_t>(it - r.distances.begin());
    return r;
}

std::size_t x_period(TextView s, std::size_t x) {
    const std::size_t n = s.size();
    if (n == 0) throw std::invalid_argument("x_period: empty string");
    if (n == 1) return 1;
    for (std::size_t ell = 2; ell <= n; ++ell) {
        if (hamming(s.subspan(0, n - ell), s.subspan(ell)) <= x) return ell;
    }
    return n;
}

std::vector<std::size_t> prefix_distances(TextView text, TextView pattern) {
    const std::size_t len = text.size();
    if (pattern.size() < len) throw std::invalid_argument("prefix_distances: pattern shorter than text");
    std::vector<std::size_t> d(len);
    for (std::size_t i = 0; i < len; ++i) d[i] = hamming(pattern.subspan(0, len - i), text.subspan(i));
    return d;
}

std::vector<std::size_t> self_overlap(TextView pattern, std::size_t shift) {
    if (shift > pattern.size()) throw std::invalid_argument("self_overlap: shift too large");
    std::vector<std::size_t> f(pattern.size() - shift + 1, 0);
    for (std::size_t m = 1; m < f.size(); ++m)
        f[m] = hamming(pattern.subspan(0, m), pattern.subspan(shift, m));
    return f;
}

}  // namespace hamstream::oracle

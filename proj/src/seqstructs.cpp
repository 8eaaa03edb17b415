#include "hamstream/seqstructs.hpp"

#include <stdexcept>

namespace hamstream {

std::size_t x_period(TextView s, std::size_t x) {
    const std::size_t n = s.size();
    if (n == 0) throw std::invalid_argument("x_period: empty string");
    if (n == 1) return 1;
    for (std::size_t ell = 2; ell < n; ++ell) {
        std::size_t mism = 0;
        for (std::size_t i = 0; i + ell < n && mism <= x; ++i) mism += s[i] != s[i + ell];
        if (mism <= x) return ell;
    }
    return n;
}

RleEncoding rle_encode(TextView s, std::size_t ell) {
    if (ell < 1 || ell > s.size()) throw std::invalid_argument("rle_encode: period out of range");
    RleEncoding enc;
    enc.ell = ell;
    enc.total_len = s.size();
    enc.runs.resize(ell);
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto& runs = enc.runs[i % ell];
        if (!runs.empty() && runs.back().symbol == s[i])
            ++runs.back().count;
        else
            runs.push_back({s[i], 1});
    }
    return enc;
}

Text rle_decode(const RleEncoding& enc) {
    if (enc.ell == 0 || enc.runs.size() != enc.ell) throw std::invalid_argument("rle_decode: malformed class list");
    std::vector<std::size_t> expect(enc.ell, enc.total_len / enc.ell);
    for (std::size_t c = 0; c < enc.total_len % enc.ell; ++c) ++expect[c];
    Text out(enc.total_len);
    for (std::size_t c = 0; c < enc.ell; ++c) {
        std::size_t got = 0;
        for (const Run& r : enc.runs[c]) {
            if (r.count == 0) throw std::invalid_argument("rle_decode: empty run");
            if (got + r.count > expect[c]) throw std::invalid_argument("rle_decode: runs exceed total_len");
            for (std::size_t t = 0; t < r.count; ++t) out[(got + t) * enc.ell + c] = r.symbol;
            got += r.count;
        }
        if (got != expect[c]) throw std::invalid_argument("rle_decode: runs do not cover total_len");
    }
    return out;
}

std::size_t rle_size(const RleEncoding& enc) {
    std::size_t s = 0;
    for (const auto& r : enc.runs) s += r.size();
    return s;
}

namespace {

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(v | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint64_t get_varint(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
        if (pos >= in.size()) throw std::invalid_argument("rle_deserialize: truncated input");
        std::uint8_t b = in[pos++];
        v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
        if (!(b & 0x80)) return v;
    }
    throw std::invalid_argument("rle_deserialize: varint too long");
}

}  // namespace

std::vector<std::uint8_t> rle_serialize(const RleEncoding& enc) {
    std::vector<std::uint8_t> out;
    put_varint(out, enc.ell);
    put_varint(out, enc.total_len);
    for (const auto& runs : enc.runs) {
        put_varint(out, runs.size());
        for (const Run& r : runs) {
            put_varint(out, r.symbol);
            put_varint(out, r.count);
        }
    }
    return out;
}

RleEncoding rle_deserialize(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    RleEncoding enc;
    enc.ell = get_varint(bytes, pos);
    enc.total_len = get_varint(bytes, pos);
    if (enc.ell == 0 || enc.ell > enc.total_len + 1) throw std::invalid_argument("rle_deserialize: bad header");
    enc.runs.resize(enc.ell);
    for (auto& runs : enc.runs) {
        std::uint64_t count = get_varint(bytes, pos);
        if (count > enc.total_len) throw std::invalid_argument("rle_deserialize: bad run count");
        for (std::uint64_t t = 0; t < count; ++t) {
            Run r;
            r.symbol = static_cast<Symbol>(get_varint(bytes, pos));
            r.count = get_varint(bytes, pos);
            runs.push_back(r);
        }
    }
    if (pos != bytes.size()) throw std::invalid_argument("rle_deserialize: trailing bytes");
    return enc;
}

}  // namespace hamstream

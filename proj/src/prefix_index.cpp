#include "hamstream/prefix_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hamstream {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

}  // namespace

std::size_t ipow(std::size_t k, std::size_t e) {
    std::size_t v = 1;
    for (std::size_t t = 0; t < e; ++t) {
        if (v > std::numeric_limits<std::size_t>::max() / k) return std::numeric_limits<std::size_t>::max();
        v *= k;
    }
    return v;
}

std::size_t prefix_top_level(std::size_t k, std::size_t length) {
    if (k < 2) throw std::invalid_argument("anchor base k must be at least 2");
    std::size_t q = 0;
    while (ipow(k, q + 1) <= length) ++q;
    return q;
}

PrefixSkeleton::Location PrefixSkeleton::locate(std::size_t i) const {
    Location loc;
    bool found = false;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        if (levels[l].pos <= i) {
            loc.level_index = l;
            loc.anchor = levels[l].pos;
            found = true;
            break;
        }
    }
    if (!found) throw std::logic_error("locate: no anchor at or before the alignment");
    const auto& b = levels[loc.level_index].borders;
    auto it = std::lower_bound(b.begin(), b.end(), i);
    loc.border_index = static_cast<std::size_t>(it - b.begin());
    loc.border = it == b.end() ? length : *it;
    return loc;
}

SkeletonBuilder::SkeletonBuilder(TextView text, TextView pattern, std::vector<std::size_t> dist, std::size_t k,
                                 std::size_t top_level)
    : text_(text), pattern_(pattern), dist_(std::move(dist)), top_(top_level), stage_(0) {
    if (dist_.size() != text_.size()) throw std::invalid_argument("SkeletonBuilder: distance count mismatch");
    if (pattern_.size() < text_.size()) throw std::invalid_argument("SkeletonBuilder: pattern too short");
    skel_.length = text_.size();
    skel_.k = k;
    found_.assign(top_ + 1, kNone);
}

std::size_t SkeletonBuilder::cost(std::size_t length, std::size_t top_level) {
    return (top_level + 1) * (2 * length + 1);
}

bool SkeletonBuilder::run(std::size_t& budget) {
    const std::size_t len = text_.size();
    const std::size_t k = skel_.k;
    while (budget > 0 && stage_ != 3) {
        if (stage_ == 0) {
            if (i_ < len) {
                // One unit per (alignment, level) check.
                while (level_ <= top_ && budget > 0) {
                    if (found_[level_] == kNone && dist_[i_] <= ipow(k, level_ + 1)) found_[level_] = i_;
                    ++level_;
                    --budget;
                }
                if (level_ > top_) {
                    level_ = 0;
                    ++i_;
                }
                continue;
            }
            stage_ = 1;
        } else if (stage_ == 1) {
            for (std::size_t j = 0; j <= top_; ++j) {
                if (found_[j] == kNone ||
                    (!skel_.levels.empty() && skel_.levels.back().pos == found_[j])) {
                    skel_.omitted.push_back(static_cast<unsigned>(j));
                    continue;
                }
                AnchorLevel a;
                a.level = static_cast<unsigned>(j);
                a.pos = found_[j];
                a.threshold = ipow(k, j + 1);
                a.cap = j == 0 ? 0 : ipow(k, j - 1);
                a.borders.push_back(a.pos);
                skel_.levels.push_back(std::move(a));
            }
            budget -= std::min(budget, top_ + 1);
            stage_ = 2;
            level_ = 0;
            i_ = skel_.levels.empty() ? len : skel_.levels[0].pos + 1;
            count_ = 0;
        } else {
            if (level_ >= skel_.levels.size()) {
                stage_ = 3;
                break;
            }
            AnchorLevel& a = skel_.levels[level_];
            while (i_ < len && budget > 0) {
                if (text_[i_] != pattern_[i_ - a.pos]) {
                    if (count_ == a.cap) {
                        a.borders.push_back(i_);
                        count_ = 0;
                    } else {
                        ++count_;
                    }
                }
                ++i_;
                --budget;
            }
            if (i_ >= len) {
                ++level_;
                count_ = 0;
                i_ = level_ < skel_.levels.size() ? skel_.levels[level_].pos + 1 : len;
                if (level_ >= skel_.levels.size()) stage_ = 3;
            }
        }
    }
    return stage_ == 3;
}

PrefixSkeleton build_skeleton(TextView text, TextView pattern, std::vector<std::size_t> dist, std::size_t k) {
    const std::size_t top = prefix_top_level(k, text.size());
    SkeletonBuilder b(text, pattern, std::move(dist), k, top);
    std::size_t budget = SkeletonBuilder::cost(text.size(), top);
    if (!b.run(budget)) throw std::logic_error("skeleton build exceeded its cost bound");
    return std::move(b.skeleton());
}

PrefixLengthTable::PrefixLengthTable(TextView pattern, std::size_t block_len, double eps)
    : rows_(block_len), eps_(eps) {
    const std::size_t n = pattern.size();
    if (block_len == 0 || block_len > n) throw std::invalid_argument("PrefixLengthTable: bad block length");
    cols_ = static_cast<std::size_t>(std::floor(std::log(static_cast<double>(n)) / std::log1p(eps) + 1e-9)) + 1;
    table_.assign(rows_ * cols_, 0);
    std::vector<std::size_t> f;
    for (std::size_t d = 0; d < rows_; ++d) {
        const std::size_t maxlen = block_len - d;
        f.assign(maxlen + 1, 0);
        for (std::size_t m = 1; m <= maxlen; ++m) f[m] = f[m - 1] + (pattern[m - 1] != pattern[d + m - 1]);
        std::size_t m = 0;
        for (std::size_t j = 0; j < cols_; ++j) {
            const double lim = level_value(j);
            while (m < maxlen && static_cast<double>(f[m + 1]) <= lim) ++m;
            table_[d * cols_ + j] = m;
        }
    }
}

double PrefixLengthTable::level_value(std::size_t j) const {
    return std::pow(1.0 + eps_, static_cast<double>(j));
}

std::pair<std::size_t, std::size_t> PrefixLengthTable::bounds(std::size_t d, std::size_t len) const {
    if (d >= rows_ || len > rows_ - d) throw std::out_of_range("PrefixLengthTable: query out of range");
    std::size_t lo = 0, hi = cols_;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (at(d, mid) >= len)
            hi = mid;
        else
            lo = mid + 1;
    }
    if (lo == cols_) throw std::logic_error("PrefixLengthTable: distance above every level");
    const auto upper = static_cast<std::size_t>(std::floor(level_value(lo) + 1e-9));
    const std::size_t lower = lo == 0 ? 0 : static_cast<std::size_t>(std::floor(level_value(lo - 1) + 1e-9)) + 1;
    return {std::min(lower, len), std::min(upper, len)};
}

std::size_t PrefixLengthTable::entry_bits() const { return bits_for(rows_ + 1); }

std::size_t problem1_k(double eps) {
    return static_cast<std::size_t>(std::ceil(6.0 / eps - 1e-12));
}

namespace {

std::vector<std::size_t> exact_prefix_distances(TextView text, TextView pattern) {
    const std::size_t len = text.size();
    std::vector<std::size_t> d(len, 0);
    for (std::size_t i = 0; i < len; ++i)
        for (std::size_t c = i; c < len; ++c) d[i] += text[c] != pattern[c - i];
    return d;
}

}  // namespace

Problem1Index build_prefix_index(TextView text_half, TextView pattern, double eps,
                                 std::span<const PStableSketcher> sketchers, std::size_t k) {
    const std::size_t n = pattern.size();
    if (text_half.size() != n) throw std::invalid_argument("build_prefix_index: text half must have length n");
    if (k == 0) k = problem1_k(eps);
    Problem1Index idx;
    idx.n = n;
    idx.skeleton = build_skeleton(text_half, pattern, exact_prefix_distances(text_half, pattern), k);

    // One right-to-left sweep per instance, snapshotting at every border.
    std::vector<std::pair<std::size_t, std::pair<std::size_t, std::size_t>>> stops;
    idx.sketches.resize(idx.skeleton.levels.size());
    for (std::size_t l = 0; l < idx.skeleton.levels.size(); ++l) {
        const auto& b = idx.skeleton.levels[l].borders;
        idx.sketches[l].resize(b.size());
        for (std::size_t t = 0; t < b.size(); ++t) stops.push_back({b[t], {l, t}});
    }
    std::sort(stops.begin(), stops.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    for (const PStableSketcher& s : sketchers) {
        StableSketch run = s.zero(n, 0);
        std::size_t c = n;
        for (const auto& [pos, where] : stops) {
            while (c > pos) {
                --c;
                if (text_half[c] != 0) s.accumulate(run, c, static_cast<double>(text_half[c]));
            }
            StableSketch snap = run;
            snap.offset = pos;
            snap.len = n - pos;
            idx.sketches[where.first][where.second].push_back(std::move(snap));
        }
    }
    return idx;
}

std::vector<StableSketch> pattern_side_sketches(std::span<const PStableSketcher> sketchers, TextView pattern,
                                                std::size_t n, std::size_t i, std::size_t border) {
    std::vector<StableSketch> out;
    for (const PStableSketcher& s : sketchers) {
        StableSketch sk = s.zero(border, n - border);
        for (std::size_t c = border; c < n; ++c)
            if (pattern[c - i] != 0) s.accumulate(sk, c, static_cast<double>(pattern[c - i]));
        out.push_back(std::move(sk));
    }
    return out;
}

PrefixQuery query_prefix_distance(const Problem1Index& idx, std::size_t i, TextView pattern, double eps,
                                  std::span<const PStableSketcher> sketchers, const PrefixLengthTable* table,
                                  const std::vector<StableSketch>* pattern_side) {
    const std::size_t n = idx.n;
    if (i > n) throw std::out_of_range("query_prefix_distance: alignment out of range");
    PrefixQuery q;
    q.estimate.eps = eps;
    if (i == n) {
        q.estimate.kind = DistanceEstimate::Kind::exact;
        return q;
    }
    q.where = idx.skeleton.locate(i);
    const std::size_t a = q.where.anchor;
    const std::size_t b = q.where.border;
    if (table) {
        q.h1 = static_cast<double>(table->bounds(i - a, b - i).second);
    } else {
        std::size_t h1 = 0;
        for (std::size_t c = i; c < b; ++c) h1 += pattern[c - i] != pattern[c - a];
        q.h1 = static_cast<double>(h1);
    }
    if (b < n) {
        std::vector<StableSketch> local;
        if (!pattern_side) {
            local = pattern_side_sketches(sketchers, pattern, n, i, b);
            pattern_side = &local;
        }
        const auto& text_side = idx.sketches[q.where.level_index][q.where.border_index];
        std::vector<double> ests;
        for (std::size_t t = 0; t < sketchers.size(); ++t)
            ests.push_back(pstable_estimate(sketchers[t], text_side[t], (*pattern_side)[t]).value);
        std::sort(ests.begin(), ests.end());
        q.h2 = ests[(ests.size() - 1) / 2];
        q.estimate.kind = DistanceEstimate::Kind::sketched;
    } else {
        q.estimate.kind = DistanceEstimate::Kind::exact;
    }
    q.estimate.value = (q.h1 + q.h2) / (1.0 - eps / 3.0);
    return q;
}

void serialize_index(const Problem1Index& idx, const IndexHeader& h, BitWriter& w) {
    const unsigned pw = bits_for(2 * idx.n);
    w.put(h.n, 32);
    w.put(h.k, 16);
    w.put(h.instances, 8);
    w.put(h.rows, 32);
    w.put_bool(h.extended);
    w.put_double(h.p);
    w.put_double(h.scale);
    w.put(idx.skeleton.levels.size(), 8);
    for (const AnchorLevel& a : idx.skeleton.levels) {
        w.put(a.level, 8);
        w.put(a.pos, pw);
        w.put(a.borders.size(), pw);
        for (std::size_t t = 1; t < a.borders.size(); ++t) w.put(a.borders[t], pw);
    }
    for (const auto& level : idx.sketches)
        for (const auto& border : level)
            for (const StableSketch& sk : border)
                for (std::size_t i = 0; i < h.rows; ++i) {
                    w.put_double(sk.hi[i]);
                    if (h.extended) w.put_double(sk.lo[i]);
                }
}

Problem1Index deserialize_index(BitReader& r, IndexHeader& h) {
    Problem1Index idx;
    h.n = r.get(32);
    h.k = r.get(16);
    h.instances = r.get(8);
    h.rows = r.get(32);
    h.extended = r.get_bool();
    h.p = r.get_double();
    h.scale = r.get_double();
    idx.n = h.n;
    idx.skeleton.length = h.n;
    idx.skeleton.k = h.k;
    const unsigned pw = bits_for(2 * h.n);
    const std::size_t levels = r.get(8);
    for (std::size_t l = 0; l < levels; ++l) {
        AnchorLevel a;
        a.level = static_cast<unsigned>(r.get(8));
        a.pos = r.get(pw);
        const std::size_t count = r.get(pw);
        if (count == 0 || a.pos >= h.n) throw std::invalid_argument("deserialize_index: malformed anchor");
        a.threshold = ipow(h.k, a.level + 1);
        a.cap = a.level == 0 ? 0 : ipow(h.k, a.level - 1);
        a.borders.push_back(a.pos);
        for (std::size_t t = 1; t < count; ++t) {
            a.borders.push_back(r.get(pw));
            if (a.borders.back() <= a.borders[t - 1] || a.borders.back() >= h.n)
                throw std::invalid_argument("deserialize_index: borders out of order");
        }
        idx.skeleton.levels.push_back(std::move(a));
    }
    idx.sketches.resize(levels);
    for (std::size_t l = 0; l < levels; ++l) {
        const auto& borders = idx.skeleton.levels[l].borders;
        idx.sketches[l].resize(borders.size());
        for (std::size_t t = 0; t < borders.size(); ++t) {
            for (std::size_t a = 0; a < h.instances; ++a) {
                StableSketch sk;
                sk.offset = borders[t];
                sk.len = h.n - borders[t];
                sk.hi.resize(h.rows);
                if (h.extended) sk.lo.resize(h.rows);
                for (std::size_t i = 0; i < h.rows; ++i) {
                    sk.hi[i] = r.get_double();
                    if (h.extended) sk.lo[i] = r.get_double();
                }
                idx.sketches[l][t].push_back(std::move(sk));
            }
        }
    }
    return idx;
}

}  // namespace hamstream

#include "hamstream/streaming.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hamstream {

namespace {

std::size_t ceil_sqrt(std::size_t n) {
    auto s = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (s * s < n) ++s;
    while (s > 0 && (s - 1) * (s - 1) >= n) --s;
    return s;
}

void add_col(const PatternIndex& idx, std::vector<std::int64_t>& acc, std::size_t c, std::int64_t coef) {
    Sketcher::add_bits(acc, idx.columns.col(c), coef);
}

unsigned __int128 squared_norm(std::span<const std::int64_t> v) {
    unsigned __int128 acc = 0;
    for (std::int64_t x : v) {
        const __int128 d = x;
        acc += static_cast<unsigned __int128>(d * d);
    }
    return acc;
}

// Shared by the streaming and offline paths so that both round identically.
StreamParts finish_parts(const PatternIndex& idx, const EngineConfig& cfg, unsigned __int128 nm,
                         unsigned __int128 ns, unsigned __int128 np, std::size_t lower) {
    const double r = static_cast<double>(idx.r);
    const double shrink = 1.0 - idx.eps / 3.0;
    StreamParts out;
    out.hm = static_cast<double>(nm) / r / shrink;
    if (cfg.discard_factor > 0.0 &&
        out.hm > cfg.discard_factor * 2.0 * static_cast<double>(idx.B) / idx.eps) {
        out.discarded = true;
        return out;
    }
    out.hs = static_cast<double>(ns) / r / shrink;
    out.hp = std::max(static_cast<double>(np) / r, static_cast<double>(lower)) / shrink;
    return out;
}

}  // namespace

std::size_t stream_block_len(std::size_t n, double eps) {
    if (n < 4) throw std::invalid_argument("stream_block_len: n must be at least 4");
    const std::size_t want = sketch_k(eps) * ceil_sqrt(n);
    if (n % want == 0 && n / want >= 2) return want;
    const std::size_t limit = std::min(want, n / 2);
    for (std::size_t b = limit; b >= 1; --b)
        if (n % b == 0) return b;
    return 1;
}

std::size_t signed_width(std::size_t bound) { return bits_for(2 * static_cast<std::uint64_t>(bound) + 1); }

ColumnCache::ColumnCache(const Sketcher& s) : rows_(s.rows()), cols_(s.block_len()) {
    for (std::size_t c = 0; c < cols_.size(); ++c) s.column_bits(c, cols_[c]);
}

std::size_t PatternIndex::resident_bits() const {
    const std::size_t wb = signed_width(B), wm = signed_width(n - B);
    std::size_t bits = columns.bits() + sigma.size() + first_block.size();
    bits += super_sketches.size() * r * wm;
    bits += suffix_sketches.size() * r * wb;
    bits += placed.size() * r * wb;
    bits += table.rows() * table.cols() * table.entry_bits();
    bits += spectrum.size() * 128;
    return bits;
}

std::unique_ptr<PatternIndex> preprocess_pattern(TextView pattern, const EngineConfig& cfg, const Seed& seed,
                                                 std::size_t instance) {
    const std::size_t n = pattern.size();
    if (n < 4) throw std::invalid_argument("preprocess_pattern: pattern must have length at least 4");
    for (Symbol s : pattern)
        if (s > 1) throw std::invalid_argument("preprocess_pattern: pattern is not binary");
    auto idx = std::make_unique<PatternIndex>();
    PatternIndex& x = *idx;
    x.n = n;
    x.eps = cfg.eps;
    x.B = cfg.block_len ? cfg.block_len : stream_block_len(n, cfg.eps);
    if (n % x.B != 0 || n / x.B < 2) throw std::invalid_argument("preprocess_pattern: block length must divide n twice");
    x.blocks = n / x.B;
    x.r = sketch_rows_for_k(sketch_k(cfg.eps));
    x.anchor_k = cfg.anchor_k ? cfg.anchor_k : problem1_k(cfg.eps);
    x.top_level = prefix_top_level(x.anchor_k, x.B);
    x.method = cfg.method;
    const auto inst = static_cast<std::uint32_t>(instance);
    x.sketcher = std::make_unique<Sketcher>(x.r, x.B, SignSource(seed, stream_id(Purpose::matrix, inst)));
    x.columns = ColumnCache(*x.sketcher);
    x.first_block.assign(pattern.begin(), pattern.begin() + static_cast<std::ptrdiff_t>(x.B));

    const SignSource sig(seed, stream_id(Purpose::sigma, inst));
    for (std::size_t m = 0; m + 1 < x.blocks; ++m) x.sigma.push_back(sig.sign_at(0, m));

    // Fold the signed blocks first: g[y] = sum_m sigma_m P[y + mB] for y < 2B.
    const std::size_t B = x.B;
    std::vector<std::int64_t> g(2 * B, 0);
    for (std::size_t y = 0; y < 2 * B; ++y)
        for (std::size_t m = 0; m + 1 < x.blocks && y + m * B < n; ++m)
            g[y] += x.sigma[m] * static_cast<std::int64_t>(pattern[y + m * B]);
    x.super_sketches.resize(B + 1);
    for (std::size_t d = 0; d <= B; ++d) {
        SuperSketch& ss = x.super_sketches[d];
        ss.values.assign(x.r, 0);
        ss.block_count = x.blocks - 1;
        ss.provenance = x.sketcher->provenance();
        for (std::size_t u = 0; u < B; ++u)
            if (g[d + u] != 0) add_col(x, ss.values, u, g[d + u]);
    }

    x.suffix_sketches.resize(B);
    for (std::size_t i = 1; i <= B; ++i) {
        Sketch& sk = x.suffix_sketches[i - 1];
        sk = empty_sketch(*x.sketcher);
        sk.logical_len = i;
        for (std::size_t u = 0; u < i; ++u)
            if (pattern[n - i + u]) add_col(x, sk.values, u, 1);
    }

    x.placed.resize(B);
    for (std::size_t d = 0; d < B; ++d) {
        x.placed[d].assign(x.r, 0);
        for (std::size_t c = d; c < B; ++c)
            if (pattern[c - d]) add_col(x, x.placed[d], c, 1);
    }

    x.table = PrefixLengthTable(pattern, B, cfg.eps);
    if (cfg.method == PrefixDistanceTask::Method::fft)
        x.spectrum = reversed_prefix_spectrum(pattern, B, next_pow2(2 * B));

    if (cfg.verify_preprocess) {
        std::vector<Sketch> blocks(x.blocks - 1);
        for (std::size_t d = 0; d <= B; ++d) {
            for (std::size_t m = 0; m + 1 < x.blocks; ++m)
                blocks[m] = sketch_block(*x.sketcher, pattern.subspan(d + m * B, B));
            if (combine_super(blocks, x.sigma).values != x.super_sketches[d].values)
                throw std::logic_error("preprocess_pattern: folded super-sketch disagrees with direct sum");
        }
    }
    return idx;
}

std::size_t BlockIndex::resident_bits(std::size_t r, std::size_t B) const {
    const std::size_t pw = bits_for(B + 1), wb = signed_width(B);
    std::size_t bits = 0;
    for (const AnchorLevel& a : skeleton.levels) bits += 8 + pw * (1 + a.borders.size());
    for (const auto& level : residual) bits += level.size() * r * wb;
    return bits;
}

BlockIndexBuild::BlockIndexBuild(const PatternIndex& idx, Text block, std::size_t number)
    : idx_(&idx), block_(std::move(block)) {
    if (block_.size() != idx.B) throw std::invalid_argument("BlockIndexBuild: block has the wrong length");
    out_.block = number;
    const std::vector<Complex>* spec = idx.method == PrefixDistanceTask::Method::fft ? &idx.spectrum : nullptr;
    dist_task_ = PrefixDistanceTask(block_, idx.first_block, spec, idx.method);
}

std::size_t BlockIndexBuild::cost(const PatternIndex& idx) {
    std::size_t c = PrefixDistanceTask::cost(idx.B, idx.method) + SkeletonBuilder::cost(idx.B, idx.top_level);
    for (std::size_t j = 0; j <= idx.top_level; ++j) {
        const std::size_t mism = std::min(ipow(idx.anchor_k, j + 1), idx.B);
        c += idx.B + idx.r * (2 * mism + 1);
    }
    return c + idx.top_level + 2;
}

bool BlockIndexBuild::run(std::size_t& budget) {
    const PatternIndex& idx = *idx_;
    while (budget > 0 && stage_ != 3) {
        if (stage_ == 0) {
            if (!dist_task_.run(budget)) break;
            skel_ = SkeletonBuilder(block_, idx.first_block, std::move(dist_task_.result()), idx.anchor_k,
                                    idx.top_level);
            stage_ = 1;
        } else if (stage_ == 1) {
            if (!skel_.run(budget)) break;
            out_.skeleton = std::move(skel_.skeleton());
            out_.residual.resize(out_.skeleton.levels.size());
            for (std::size_t l = 0; l < out_.skeleton.levels.size(); ++l)
                out_.residual[l].resize(out_.skeleton.levels[l].borders.size());
            stage_ = 2;
            level_ = 0;
            pos_ = idx.B;
            border_ = out_.skeleton.levels.empty() ? 0 : out_.skeleton.levels[0].borders.size();
            acc_.assign(idx.r, 0);
        } else {
            const auto& levels = out_.skeleton.levels;
            if (level_ >= levels.size()) {
                stage_ = 3;
                break;
            }
            const AnchorLevel& a = levels[level_];
            if (pos_ > a.pos) {
                const std::size_t c = pos_ - 1;
                const auto diff = static_cast<std::int64_t>(block_[c]) - static_cast<std::int64_t>(idx.first_block[c - a.pos]);
                std::size_t units = 1;
                if (diff != 0) {
                    add_col(idx, acc_, c, diff);
                    units += idx.r;
                }
                if (border_ > 0 && a.borders[border_ - 1] == c) {
                    out_.residual[level_][border_ - 1] = acc_;
                    --border_;
                    units += idx.r;
                }
                pos_ = c;
                budget -= std::min(budget, units);
            } else {
                ++level_;
                pos_ = idx.B;
                acc_.assign(idx.r, 0);
                border_ = level_ < levels.size() ? levels[level_].borders.size() : 0;
            }
        }
    }
    return stage_ == 3;
}

BlockIndex BlockIndexBuild::take() {
    if (!done()) throw std::logic_error("BlockIndexBuild: result taken before completion");
    return std::move(out_);
}

std::size_t BlockIndexBuild::resident_bits() const {
    const PatternIndex& idx = *idx_;
    std::size_t bits = block_.size() + idx.B * bits_for(idx.B + 1);
    if (stage_ == 0 && idx.method == PrefixDistanceTask::Method::fft) bits += idx.spectrum.size() * 128;
    if (stage_ >= 2) {
        bits += out_.resident_bits(idx.r, idx.B);
        bits += acc_.size() * signed_width(idx.B);
    }
    return bits;
}

BlockIndex build_block_index(const PatternIndex& idx, TextView block, std::size_t number) {
    BlockIndexBuild b(idx, Text(block.begin(), block.end()), number);
    std::size_t budget = BlockIndexBuild::cost(idx);
    if (!b.run(budget)) throw std::logic_error("block index build exceeded its cost bound");
    return b.take();
}

StreamState::StreamState(const PatternIndex& idx, const EngineConfig& cfg) : idx_(&idx), cfg_(cfg) {
    budget_per_symbol_ = (BlockIndexBuild::cost(idx) + idx.B - 1) / idx.B;
    cur_block_.reserve(idx.B);
    cur_sketch_ = empty_sketch(*idx.sketcher);
    ring_.assign(idx.blocks - 1, empty_sketch(*idx.sketcher));
    rolling_.assign(idx.r, 0);
    partial_.assign(idx.r, 0);
    anchor_sum_.assign(idx.r, 0);
}

std::optional<StreamParts> StreamState::push(Symbol bit) {
    const PatternIndex& idx = *idx_;
    if (bit > 1) throw std::invalid_argument("push: non-binary symbol");
    step_units_ = 0;

    const std::size_t pos = cur_block_.size();
    cur_block_.push_back(bit);
    if (bit) {
        add_col(idx, cur_sketch_.values, pos, 1);
        charge(idx.r);
    } else {
        charge(1);
    }
    ++cur_sketch_.logical_len;
    ++count_;

    // Partial super-sketch of the blocks that stay in the middle part after this block.
    const std::size_t terms = idx.blocks - 2;
    const std::size_t per_symbol = (terms + idx.B - 1) / idx.B;
    for (std::size_t t = 0; t < per_symbol && partial_added_ < terms; ++t) {
        const Sketch& sk = ring_[partial_added_ + 1];
        const std::int64_t s = idx.sigma[partial_added_];
        for (std::size_t j = 0; j < idx.r; ++j) partial_[j] += s * sk.values[j];
        ++partial_added_;
        charge(idx.r);
    }

    if (pending_ && !pending_->done()) {
        std::size_t budget = budget_per_symbol_;
        pending_->run(budget);
        charge(budget_per_symbol_ - budget);
    }

    if (cur_block_.size() == idx.B) finalize_block();

    std::optional<StreamParts> out;
    if (count_ >= idx.n) out = query(count_ % idx.B);

    steps_.last = step_units_;
    steps_.max = std::max(steps_.max, step_units_);
    steps_.total += step_units_;
    ++steps_.symbols;
    return out;
}

void StreamState::finalize_block() {
    const PatternIndex& idx = *idx_;
    if (cur_block_.size() != idx.B) throw std::logic_error("finalize_block: block is not full");
    if (pending_) {
        if (!pending_->done()) throw std::logic_error("deferred block build missed its deadline");
        indexes_.push_back(pending_->take());
        pending_.reset();
        ++deadline_checks_;
    }
    if (partial_added_ != idx.blocks - 2) throw std::logic_error("partial super-sketch missed its deadline");

    const std::int64_t last_sign = idx.sigma[idx.blocks - 2];
    for (std::size_t j = 0; j < idx.r; ++j) rolling_[j] = partial_[j] + last_sign * cur_sketch_.values[j];
    charge(idx.r);
    ring_.erase(ring_.begin());
    ring_.push_back(std::move(cur_sketch_));
    charge(1);

    if (cfg_.verify_rolling) {
        if (combine_super(ring_, idx.sigma).values != rolling_)
            throw std::logic_error("rolling super-sketch disagrees with the direct sum");
        ++rolling_checks_;
    }

    const std::size_t number = count_ / idx.B - 1;
    pending_ = std::make_unique<BlockIndexBuild>(idx, std::move(cur_block_), number);
    cur_block_ = Text();
    cur_block_.reserve(idx.B);
    cur_sketch_ = empty_sketch(*idx.sketcher);
    std::fill(partial_.begin(), partial_.end(), 0);
    partial_added_ = 0;

    const std::size_t current = count_ / idx.B;
    while (!indexes_.empty() && indexes_.front().block + idx.blocks < current) indexes_.erase(indexes_.begin());
}

StreamParts StreamState::query(std::size_t i) {
    const PatternIndex& idx = *idx_;
    const std::size_t prefix_block = count_ / idx.B - idx.blocks;
    if (indexes_.empty() || indexes_.front().block != prefix_block)
        throw std::logic_error("prefix block index is not available");
    const BlockIndex& bi = indexes_.front();

    const auto nm = squared_distance(rolling_, idx.super_sketches[idx.B - i].values);
    charge(idx.r);
    const auto ns = i == 0 ? 0 : squared_distance(cur_sketch_.values, idx.suffix_sketches[i - 1].values);
    charge(idx.r);

    const auto loc = bi.skeleton.locate(i);
    charge(bi.skeleton.levels.size() + bits_for(idx.B + 1));
    if (i == 0 || loc.anchor != anchor_) {
        if (loc.anchor != i) throw std::logic_error("governing anchor changed away from an anchor position");
        anchor_sum_ = idx.placed[i];
        anchor_ = i;
        charge(idx.r);
    }
    std::vector<std::int64_t> v(anchor_sum_);
    const auto& placed = idx.placed[i];
    if (loc.border < idx.B) {
        const auto& c = bi.residual[loc.level_index][loc.border_index];
        for (std::size_t j = 0; j < idx.r; ++j) v[j] += c[j] - placed[j];
    } else {
        for (std::size_t j = 0; j < idx.r; ++j) v[j] -= placed[j];
    }
    const auto np = squared_norm(v);
    charge(2 * idx.r);
    const std::size_t lower = idx.table.bounds(i - loc.anchor, loc.border - i).first;
    charge(bits_for(idx.table.cols() + 1));

    // Advance the running pattern sum to alignment i + 1.
    if (idx.first_block[i - anchor_]) {
        add_col(idx, anchor_sum_, i, -1);
        charge(idx.r);
    }
    return finish_parts(idx, cfg_, nm, ns, np, lower);
}

std::size_t StreamState::resident_bits() const {
    const PatternIndex& idx = *idx_;
    const std::size_t wb = signed_width(idx.B), wm = signed_width(idx.n - idx.B);
    std::size_t bits = idx.B;                   // current block buffer
    bits += idx.r * wb * (1 + ring_.size());    // current and ring sketches
    bits += 2 * idx.r * wm;                     // rolling and partial super-sketches
    bits += idx.r * wb;                         // running anchor sum
    bits += 4 * 64;                             // counters and cursors
    for (const BlockIndex& b : indexes_) bits += b.resident_bits(idx.r, idx.B);
    if (pending_) bits += pending_->resident_bits();
    return bits;
}

std::size_t SpaceReport::total() const {
    std::size_t t = 0;
    for (auto b : pattern_bits) t += b;
    for (auto b : state_bits) t += b;
    return t;
}

StreamingEngine::StreamingEngine(TextView pattern, const EngineConfig& cfg, const Seed& seed)
    : n_(pattern.size()), cfg_(cfg) {
    if (cfg.instances == 0) throw std::invalid_argument("StreamingEngine: need at least one instance");
    for (std::size_t t = 0; t < cfg.instances; ++t) {
        patterns_.push_back(preprocess_pattern(pattern, cfg, seed, t));
        states_.emplace_back(*patterns_.back(), cfg);
    }
}

StreamOutput combine_parts(std::size_t position, const std::vector<StreamParts>& parts) {
    std::vector<double> hp, hm, hs;
    std::size_t discarded = 0;
    for (const auto& p : parts) {
        hp.push_back(p.hp);
        hm.push_back(p.hm);
        hs.push_back(p.hs);
        discarded += p.discarded;
    }
    StreamOutput out;
    out.position = position;
    out.parts.hp = median_amplify(hp);
    out.parts.hm = median_amplify(hm);
    out.parts.hs = median_amplify(hs);
    out.parts.discarded = 2 * discarded > parts.size();
    out.estimate = out.parts.hp + out.parts.hm + out.parts.hs;
    return out;
}

std::optional<StreamOutput> StreamingEngine::push(Symbol bit) {
    std::vector<StreamParts> parts;
    for (auto& s : states_) {
        auto p = s.push(bit);
        if (p) parts.push_back(*p);
    }
    if (parts.empty()) return std::nullopt;
    return combine_parts(states_.front().symbols() - n_, parts);
}

SpaceReport StreamingEngine::space_report() const {
    SpaceReport r;
    for (std::size_t t = 0; t < states_.size(); ++t) {
        r.pattern_bits.push_back(patterns_[t]->resident_bits());
        r.state_bits.push_back(states_[t].resident_bits());
    }
    return r;
}

std::size_t StreamingEngine::max_steps_per_symbol() const {
    std::size_t m = 0;
    for (const auto& s : states_) m = std::max(m, s.steps().max);
    return m;
}

std::vector<StreamOutput> run_stream(TextView pattern, TextView text, const EngineConfig& cfg, const Seed& seed) {
    StreamingEngine eng(pattern, cfg, seed);
    std::vector<StreamOutput> out;
    for (Symbol s : text)
        if (auto o = eng.push(s)) out.push_back(*o);
    return out;
}

std::vector<StreamOutput> offline_estimates(TextView pattern, TextView text, const EngineConfig& cfg,
                                            const Seed& seed) {
    const std::size_t n = pattern.size();
    if (text.size() < n) return {};
    const std::size_t outputs = text.size() - n + 1;
    std::vector<std::vector<StreamParts>> parts(outputs);
    for (std::size_t t = 0; t < cfg.instances; ++t) {
        const auto idx = preprocess_pattern(pattern, cfg, seed, t);
        const std::size_t B = idx->B, r = idx->r;
        const std::size_t full = text.size() / B;
        std::vector<Sketch> sk(full);
        for (std::size_t b = 0; b < full; ++b) sk[b] = sketch_block(*idx->sketcher, text.subspan(b * B, B));
        std::vector<std::optional<BlockIndex>> bidx(full);
        for (std::size_t T = n; T <= text.size(); ++T) {
            const std::size_t i = T % B, cur = T / B, pb = cur - idx->blocks;
            const SuperSketch mid = combine_super(std::span<const Sketch>(sk).subspan(pb + 1, idx->blocks - 1), idx->sigma);
            const auto nm = squared_distance(mid.values, idx->super_sketches[B - i].values);
            unsigned __int128 ns = 0;
            if (i > 0) {
                const Sketch part = sketch_block(*idx->sketcher, text.subspan(cur * B, i));
                ns = squared_distance(part.values, idx->suffix_sketches[i - 1].values);
            }
            if (!bidx[pb]) bidx[pb] = build_block_index(*idx, text.subspan(pb * B, B), pb);
            const BlockIndex& bi = *bidx[pb];
            const auto loc = bi.skeleton.locate(i);
            // Text minus pattern at i beyond the border, pattern at the anchor minus pattern at i before it.
            const TextView x = text.subspan(pb * B, B);
            const TextView p = idx->first_block;
            std::vector<std::int64_t> v(r, 0);
            for (std::size_t c = i; c < B; ++c) {
                const std::int64_t lhs = c >= loc.border ? x[c] : p[c - loc.anchor];
                const std::int64_t d = lhs - static_cast<std::int64_t>(p[c - i]);
                if (d != 0) add_col(*idx, v, c, d);
            }
            const std::size_t lower = idx->table.bounds(i - loc.anchor, loc.border - i).first;
            parts[T - n].push_back(finish_parts(*idx, cfg, nm, ns, squared_norm(v), lower));
        }
    }
    std::vector<StreamOutput> out;
    for (std::size_t a = 0; a < outputs; ++a) out.push_back(combine_parts(a, parts[a]));
    return out;
}

}  // namespace hamstream

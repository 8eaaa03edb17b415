#include "hamstream/alphabet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hamstream {

Text onehot_map(TextView s, std::uint32_t sigma) {
    if (sigma < 1) throw std::invalid_argument("onehot_map: empty alphabet");
    Text out(s.size() * sigma, 0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] >= sigma) throw std::invalid_argument("onehot_map: symbol out of range");
        out[i * sigma + s[i]] = 1;
    }
    return out;
}

KarloffFamily::KarloffFamily(std::size_t count, const Seed& seed, std::uint32_t sigma)
    : count_(count), sigma_(sigma), table_(count * sigma) {
    if (count == 0) throw std::invalid_argument("KarloffFamily: need at least one map");
    if (sigma < 2) throw std::invalid_argument("KarloffFamily: alphabet must have at least two symbols");
    const std::size_t per_map = (sigma + 511) / 512;
    std::vector<std::uint8_t> block(64 * per_map);
    for (std::size_t j = 0; j < count; ++j) {
        prf_blocks(seed, stream_id(Purpose::karloff), j * per_map, per_map, block.data());
        for (std::uint32_t c = 0; c < sigma; ++c)
            table_[j * sigma + c] = (block[c / 8] >> (c % 8)) & 1;
    }
}

std::size_t KarloffFamily::count_for(double eps, std::size_t n, double c_k) {
    const double lg = std::log2(static_cast<double>(std::max<std::size_t>(n, 2)));
    return static_cast<std::size_t>(std::ceil(c_k * lg * lg / (eps * eps) - 1e-9));
}

Text KarloffFamily::apply(std::size_t j, TextView s) const {
    Text out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] >= sigma_) throw std::invalid_argument("KarloffFamily: symbol out of range");
        out[i] = map(j, s[i]);
    }
    return out;
}

double karloff_estimate(std::span<const double> per_map) {
    if (per_map.empty()) throw std::invalid_argument("karloff_estimate: no maps");
    double sum = 0.0;
    for (double d : per_map) sum += d;
    return 2.0 * sum / static_cast<double>(per_map.size());
}

namespace {

std::uint32_t alphabet_of(TextView p, TextView t) {
    Symbol mx = 1;
    for (Symbol s : p) mx = std::max(mx, s);
    for (Symbol s : t) mx = std::max(mx, s);
    return mx + 1;
}

std::vector<GeneralOutput> run_onehot(TextView pattern, TextView text, const GeneralConfig& cfg,
                                      std::uint32_t sigma, const Seed& seed) {
    const Text p = onehot_map(pattern, sigma);
    EngineConfig ec;
    ec.eps = cfg.eps;
    ec.instances = cfg.inner_instances;
    ec.method = cfg.method;
    StreamingEngine eng(p, ec, seed);
    std::vector<GeneralOutput> out;
    Text bits(sigma);
    for (Symbol s : text) {
        if (s >= sigma) throw std::invalid_argument("stream_general: symbol out of range");
        std::fill(bits.begin(), bits.end(), 0);
        bits[s] = 1;
        std::optional<StreamOutput> last;
        for (Symbol b : bits) last = eng.push(b);
        // Only windows that start on a symbol boundary correspond to alignments.
        if (last) out.push_back({last->position / sigma, last->estimate / 2.0});
    }
    return out;
}

}  // namespace

std::vector<std::vector<double>> karloff_per_map(TextView pattern, TextView text, const GeneralConfig& cfg,
                                                 const Seed& seed) {
    const std::uint32_t sigma = cfg.sigma ? cfg.sigma : alphabet_of(pattern, text);
    const std::size_t n = pattern.size();
    const std::size_t m = cfg.maps ? cfg.maps : KarloffFamily::count_for(cfg.eps, n, cfg.c_k);
    const KarloffFamily fam(m, seed, sigma);
    EngineConfig ec;
    ec.eps = cfg.eps / 3.0;
    ec.instances = cfg.inner_instances;
    ec.method = cfg.method;

    if (text.size() < n) return {};
    std::vector<std::vector<double>> per(text.size() - n + 1);
    for (std::size_t j = 0; j < m; ++j) {
        StreamingEngine eng(fam.apply(j, pattern), ec, seed.derive(1, j));
        for (Symbol s : text) {
            if (s >= sigma) throw std::invalid_argument("stream_general: symbol out of range");
            if (auto o = eng.push(fam.map(j, s))) per[o->position].push_back(o->estimate);
        }
    }
    return per;
}

std::vector<GeneralOutput> stream_general(TextView pattern, TextView text, const GeneralConfig& cfg,
                                          const Seed& seed) {
    if (cfg.reduction == Reduction::onehot) {
        const std::uint32_t sigma = cfg.sigma ? cfg.sigma : alphabet_of(pattern, text);
        return run_onehot(pattern, text, cfg, sigma, seed);
    }
    const auto per = karloff_per_map(pattern, text, cfg, seed);
    std::vector<GeneralOutput> out;
    for (std::size_t a = 0; a < per.size(); ++a) out.push_back({a, karloff_estimate(per[a])});
    return out;
}

}  // namespace hamstream

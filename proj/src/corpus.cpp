#include "hamstream/corpus.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace hamstream {

namespace {

Symbol other_symbol(Symbol s, std::uint32_t sigma, PrfStream& g) {
    const auto shift = static_cast<Symbol>(1 + g.below(sigma - 1));
    return (s + shift) % sigma;
}

void check_sigma(std::uint32_t sigma) {
    if (sigma < 2) throw std::invalid_argument("alphabet must have at least two symbols");
}

}  // namespace

Text random_text(std::size_t len, std::uint32_t sigma, const Seed& seed, std::uint32_t label) {
    check_sigma(sigma);
    PrfStream g(seed, stream_id(Purpose::data, label));
    Text t(len);
    for (auto& s : t) s = static_cast<Symbol>(g.below(sigma));
    return t;
}

Text planted_text(TextView pattern, std::size_t len, std::uint32_t sigma, const std::vector<Plant>& plants,
                  const Seed& seed, std::uint32_t label) {
    check_sigma(sigma);
    Text t = random_text(len, sigma, seed, label);
    PrfStream g(seed, stream_id(Purpose::data, label + 1024));
    const std::size_t n = pattern.size();
    for (const Plant& p : plants) {
        if (p.position + n > len) throw std::invalid_argument("planted_text: plant runs past the end");
        if (p.distance > n) throw std::invalid_argument("planted_text: distance exceeds pattern length");
        std::copy(pattern.begin(), pattern.end(), t.begin() + static_cast<std::ptrdiff_t>(p.position));
        // Partial Fisher-Yates picks distinct offsets.
        std::vector<std::size_t> offs(n);
        for (std::size_t i = 0; i < n; ++i) offs[i] = i;
        for (std::size_t i = 0; i < p.distance; ++i) {
            const std::size_t j = i + g.below(n - i);
            std::swap(offs[i], offs[j]);
            Symbol& s = t[p.position + offs[i]];
            s = other_symbol(s, sigma, g);
        }
    }
    return t;
}

Text periodic_text(std::size_t len, std::size_t period, std::size_t x, std::uint32_t sigma, const Seed& seed,
                   std::uint32_t label) {
    check_sigma(sigma);
    if (period == 0) throw std::invalid_argument("periodic_text: period must be positive");
    const Text base = random_text(period, sigma, seed, label);
    Text t(len);
    for (std::size_t i = 0; i < len; ++i) t[i] = base[i % period];
    PrfStream g(seed, stream_id(Purpose::data, label + 1024));
    for (std::size_t f = 0; f < x / 2 && len > 0; ++f) {
        Symbol& s = t[g.below(len)];
        s = other_symbol(s, sigma, g);
    }
    return t;
}

Text runs_text(std::size_t len, std::size_t max_run, std::uint32_t sigma, const Seed& seed, std::uint32_t label) {
    check_sigma(sigma);
    if (max_run == 0) throw std::invalid_argument("runs_text: runs must have positive length");
    PrfStream g(seed, stream_id(Purpose::data, label));
    Text t;
    t.reserve(len);
    Symbol cur = static_cast<Symbol>(g.below(sigma));
    while (t.size() < len) {
        const std::size_t run = 1 + g.below(max_run);
        for (std::size_t i = 0; i < run && t.size() < len; ++i) t.push_back(cur);
        cur = other_symbol(cur, sigma, g);
    }
    return t;
}

}  // namespace hamstream

#include "hamstream/protocol.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <mutex>
#include <stdexcept>

#include "hamstream/fft.hpp"

namespace hamstream {

const char* party_name(Party p) {
    switch (p) {
    case Party::alice: return "alice";
    case Party::bob: return "bob";
    case Party::charlie: return "charlie";
    }
    return "?";
}

void Transcript::add(Party sender, Party receiver, std::string payload_id, std::size_t bits) {
    if (static_cast<int>(receiver) != static_cast<int>(sender) + 1)
        throw std::logic_error("transcript: messages must go to the next party");
    if (!messages_.empty() && static_cast<int>(sender) < static_cast<int>(messages_.back().sender))
        throw std::logic_error("transcript: message flows backward");
    messages_.push_back({sender, receiver, std::move(payload_id), bits});
}

std::size_t Transcript::total_bits() const {
    std::size_t t = 0;
    for (const auto& m : messages_) t += m.bits;
    return t;
}

std::string Transcript::to_jsonl() const {
    std::string out;
    for (const auto& m : messages_) {
        nlohmann::json j = {{"sender", party_name(m.sender)},
                            {"receiver", party_name(m.receiver)},
                            {"message", m.payload_id},
                            {"bits", m.bits}};
        out += j.dump() + "\n";
    }
    nlohmann::json t = {{"message", "total"}, {"bits", total_bits()}};
    out += t.dump() + "\n";
    return out;
}

std::uint32_t infer_sigma(TextView a, TextView b) {
    Symbol mx = 1;
    for (Symbol s : a) mx = std::max(mx, s);
    for (Symbol s : b) mx = std::max(mx, s);
    return mx + 1;
}

std::vector<PStableSketcher> make_sketchers(double eps, std::uint32_t sigma, const Seed& seed,
                                            std::size_t instances, std::size_t width, std::uint32_t label,
                                            double c_m) {
    // Every party regenerates the same public randomness; keep the last set.
    struct Memo {
        std::mutex mu;
        std::string key;
        std::vector<PStableSketcher> value;
    };
    static Memo memo;
    nlohmann::json key = {seed.hex(), eps, sigma, instances, width, label, c_m};
    {
        std::lock_guard<std::mutex> lock(memo.mu);
        if (memo.key == key.dump()) return memo.value;
    }
    const double p = stability_for(eps, sigma);
    const std::size_t m = pstable_rows(eps, c_m);
    const double scale = CalibrationTable::global().scale(p, m);
    std::vector<PStableSketcher> out;
    out.reserve(instances);
    for (std::size_t a = 0; a < instances; ++a)
        out.emplace_back(m, p, seed, stream_id(Purpose::stable, label * 64 + static_cast<std::uint32_t>(a)), scale,
                         width);
    std::lock_guard<std::mutex> lock(memo.mu);
    memo.key = key.dump();
    memo.value = out;
    return out;
}

namespace {

// c[a] = sum_x f[x] g[a + x] for x < F and a + x < G, through real FFTs of size
// next_pow2(F + G).
class Xcorr {
public:
    Xcorr(std::size_t f_len, std::size_t g_len)
        : f_(f_len), g_(g_len), n_(next_pow2(f_len + g_len)), spec_(n_ / 2 + 1) {
        real_ = static_cast<double*>(fftw_malloc(sizeof(double) * n_));
        cplx_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * spec_));
        fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, cplx_, FFTW_ESTIMATE);
        inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), cplx_, real_, FFTW_ESTIMATE);
    }
    ~Xcorr() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
        fftw_free(real_);
        fftw_free(cplx_);
    }
    Xcorr(const Xcorr&) = delete;
    Xcorr& operator=(const Xcorr&) = delete;

    template <class Get>
    std::vector<Complex> spectrum_f(Get f) {
        std::fill(real_, real_ + n_, 0.0);
        for (std::size_t u = 0; u < f_; ++u) real_[u] = f(f_ - 1 - u);
        return transform();
    }
    template <class Get>
    std::vector<Complex> spectrum_g(Get g) {
        std::fill(real_, real_ + n_, 0.0);
        for (std::size_t x = 0; x < g_; ++x) real_[x] = g(x);
        return transform();
    }
    // out[a] for a < count
    void correlate(const std::vector<Complex>& sf, const std::vector<Complex>& sg, std::size_t count,
                   std::vector<double>& out) {
        for (std::size_t k = 0; k < spec_; ++k) {
            const Complex z = sf[k] * sg[k];
            cplx_[k][0] = z.real();
            cplx_[k][1] = z.imag();
        }
        fftw_execute(inv_);
        out.resize(count);
        const double norm = static_cast<double>(n_);
        for (std::size_t a = 0; a < count; ++a) out[a] = real_[a + f_ - 1] / norm;
    }

private:
    std::vector<Complex> transform() {
        fftw_execute(fwd_);
        std::vector<Complex> s(spec_);
        for (std::size_t k = 0; k < spec_; ++k) s[k] = Complex(cplx_[k][0], cplx_[k][1]);
        return s;
    }

    std::size_t f_, g_, n_, spec_;
    double* real_;
    fftw_complex* cplx_;
    fftw_plan fwd_, inv_;
};

}  // namespace

std::vector<StableSketch> shifted_sketches(const PStableSketcher& s, TextView g, std::size_t cols,
                                           std::size_t shifts) {
    const std::size_t glen = g.size();
    if (shifts > glen) throw std::invalid_argument("shifted_sketches: too many shifts");
    std::vector<StableSketch> out(shifts);
    for (std::size_t a = 0; a < shifts; ++a) out[a] = s.zero(0, std::min(cols, glen - a));
    if (shifts == 0 || cols == 0) return out;
    const std::size_t m = s.rows();
    if (s.extended() || s.width() < cols) {
        for (std::size_t a = 0; a < shifts; ++a)
            for (std::size_t x = 0; x < out[a].len; ++x)
                if (g[a + x] != 0) s.accumulate(out[a], x, static_cast<double>(g[a + x]));
        return out;
    }
    Xcorr xc(cols, glen);
    const auto sg = xc.spectrum_g([&](std::size_t x) { return static_cast<double>(g[x]); });
    std::vector<double> row;
    for (std::size_t t = 0; t < m; ++t) {
        const auto sf = xc.spectrum_f([&](std::size_t x) { return s.column(x)[t]; });
        xc.correlate(sf, sg, shifts, row);
        for (std::size_t a = 0; a < shifts; ++a) out[a].hi[t] = row[a];
    }
    return out;
}

std::vector<StableSketch> placed_sketches(const PStableSketcher& s, TextView f, std::size_t n) {
    const std::size_t flen = f.size();
    std::vector<StableSketch> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = s.zero(i, n - i);
    if (n == 0 || flen == 0) return out;
    const std::size_t m = s.rows();
    if (s.extended() || s.width() < n) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t u = 0; u < flen && i + u < n; ++u)
                if (f[u] != 0) s.accumulate(out[i], i + u, static_cast<double>(f[u]));
        return out;
    }
    Xcorr xc(flen, n);
    const auto sf = xc.spectrum_f([&](std::size_t u) { return static_cast<double>(f[u]); });
    std::vector<double> row;
    for (std::size_t t = 0; t < m; ++t) {
        const auto sg = xc.spectrum_g([&](std::size_t c) { return s.column(c)[t]; });
        xc.correlate(sf, sg, n, row);
        for (std::size_t i = 0; i < n; ++i) out[i].hi[t] = row[i];
    }
    return out;
}

namespace {

// Entries that agree up to accumulated rounding (the FFT and direct paths sum in
// different orders) count as equal, so identical windows estimate to exactly 0.
constexpr double kRoundoff = 1e-9;

double protocol_estimate(const PStableSketcher& s, const StableSketch& a, const StableSketch& b) {
    if (a.offset != b.offset || a.len != b.len)
        throw std::invalid_argument("protocol estimate: sketches cover different columns");
    std::vector<double> d = sketch_difference(a, b);
    for (std::size_t i = 0; i < d.size(); ++i) {
        double mag = std::fabs(a.hi[i]) + std::fabs(b.hi[i]);
        if (!a.lo.empty()) mag += std::fabs(a.lo[i]) + std::fabs(b.lo[i]);
        if (std::fabs(d[i]) <= kRoundoff * mag) d[i] = 0.0;
    }
    return pstable_estimate_diff(s.p(), s.scale(), std::move(d));
}

double median_of(std::vector<double> v) {
    auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

std::size_t hd(TextView a, TextView b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

void put_sketch(BitWriter& w, const StableSketch& sk, bool extended) {
    for (std::size_t i = 0; i < sk.hi.size(); ++i) {
        w.put_double(sk.hi[i]);
        if (extended) w.put_double(sk.lo[i]);
    }
}

StableSketch get_sketch(BitReader& r, std::size_t rows, bool extended, std::size_t offset, std::size_t len) {
    StableSketch sk;
    sk.offset = offset;
    sk.len = len;
    sk.hi.resize(rows);
    if (extended) sk.lo.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        sk.hi[i] = r.get_double();
        if (extended) sk.lo[i] = r.get_double();
    }
    return sk;
}

BitReader reader(const BitWriter& w) { return BitReader(w.bytes(), w.bit_count()); }

void expect_consumed(const BitReader& r, const char* what) {
    if (!r.exhausted()) throw std::invalid_argument(std::string("malformed payload: trailing bits in ") + what);
}

}  // namespace

Problem1Result run_problem1(TextView pattern, TextView text, const ProtocolConfig& cfg, const Seed& seed) {
    const std::size_t n = pattern.size();
    if (text.size() != 2 * n) throw std::invalid_argument("run_problem1: text must have length 2n");
    if (n == 0) throw std::invalid_argument("run_problem1: empty pattern");
    const std::uint32_t sigma = cfg.sigma ? cfg.sigma : infer_sigma(pattern, text);
    const TextView t1 = text.subspan(0, n), t2 = text.subspan(n);
    const std::size_t k = cfg.test_k ? cfg.test_k : problem1_k(cfg.eps);
    const auto sketchers = make_sketchers(cfg.eps, sigma, seed, cfg.instances, n, 1, cfg.c_m);

    Problem1Result res;

    // Alice.
    Problem1Index alice_idx = build_prefix_index(t1, pattern, cfg.eps, sketchers, k);
    IndexHeader hdr;
    hdr.n = n;
    hdr.k = k;
    hdr.instances = cfg.instances;
    hdr.rows = sketchers.front().rows();
    hdr.extended = sketchers.front().extended();
    hdr.p = sketchers.front().p();
    hdr.scale = sketchers.front().scale();
    BitWriter wire;
    serialize_index(alice_idx, hdr, wire);
    res.transcript.add(Party::alice, Party::bob, "prefix_index", wire.bit_count());

    // Bob sees only the serialized index, the pattern and T2.
    BitReader rd(wire.bytes(), wire.bit_count());
    IndexHeader got;
    res.index = deserialize_index(rd, got);
    expect_consumed(rd, "prefix_index");
    const Problem1Index& idx = res.index;

    std::vector<PrefixSkeleton::Location> loc(n);
    for (std::size_t i = 0; i < n; ++i) loc[i] = idx.skeleton.locate(i);

    std::vector<std::vector<double>> h2(n, std::vector<double>(cfg.instances, 0.0));
    for (std::size_t a = 0; a < cfg.instances; ++a) {
        const PStableSketcher& s = sketchers[a];
        auto full = placed_sketches(s, pattern, n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t b = loc[i].border;
            if (b >= n) continue;
            StableSketch q = std::move(full[i]);
            for (std::size_t c = i; c < b; ++c)
                if (pattern[c - i] != 0) s.accumulate(q, c, -static_cast<double>(pattern[c - i]));
            q.offset = b;
            q.len = n - b;
            const auto& text_side = idx.sketches[loc[i].level_index][loc[i].border_index][a];
            h2[i][a] = protocol_estimate(s, text_side, q);
        }
    }

    res.estimates.assign(n + 1, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
        const double second = static_cast<double>(hd(pattern.subspan(n - i), t2.subspan(0, i)));
        double prefix = 0.0;
        if (i < n) {
            const std::size_t anchor = loc[i].anchor, b = loc[i].border;
            std::size_t h1 = 0;
            for (std::size_t c = i; c < b; ++c) h1 += pattern[c - i] != pattern[c - anchor];
            const double est2 = b < n ? median_of(h2[i]) : 0.0;
            prefix = (static_cast<double>(h1) + est2) / (1.0 - cfg.eps / 3.0);
        }
        res.estimates[i] = second + prefix;
    }
    return res;
}

Problem2Params Problem2Params::make(std::size_t n, double eps) {
    if (n < 4) throw std::invalid_argument("problem 2 needs n >= 4");
    Problem2Params p;
    p.n = n;
    p.eps = eps;
    p.B = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    while (p.B * p.B < n) ++p.B;
    while ((p.B - 1) * (p.B - 1) >= n) --p.B;
    p.blocks = (n + p.B - 1) / p.B;
    p.tau = 2.0 * static_cast<double>(p.B) / eps;
    p.period_bound = (2.0 + eps) * p.tau;
    return p;
}

std::size_t Problem2Params::prefix_len(std::size_t j) const { return j * B >= n ? 0 : n - j * B; }

std::size_t Wire::total_bits() const {
    std::size_t t = 0;
    for (const auto& [name, w] : sections) t += w.bit_count();
    return t;
}

const BitWriter& Wire::section(const std::string& name) const {
    for (const auto& [nm, w] : sections)
        if (nm == name) return w;
    throw std::invalid_argument("malformed payload: missing section " + name);
}

Wire p2_alice_message(TextView pattern, const ProtocolConfig& cfg, const Seed& seed) {
    const std::size_t n = pattern.size();
    const auto prm = Problem2Params::make(n, cfg.eps);
    const std::uint32_t sigma = cfg.sigma ? cfg.sigma : infer_sigma(pattern, {});
    const auto sketchers = make_sketchers(cfg.eps, sigma, seed, cfg.instances, n, 2, cfg.c_m);
    const bool ext = sketchers.front().extended();
    const unsigned pw = bits_for(2 * n);

    // j*: first j whose prefix has a (2 + eps) tau-period below B.
    std::size_t j_star = prm.blocks;
    std::size_t ell = 1;
    for (std::size_t j = 1; j <= prm.blocks; ++j) {
        const std::size_t len = prm.prefix_len(j);
        if (len <= 1) {
            j_star = j;
            ell = 1;
            break;
        }
        const std::size_t per = x_period(pattern.subspan(0, len), static_cast<std::size_t>(prm.period_bound));
        if (per < prm.B) {
            j_star = j;
            ell = per;
            break;
        }
    }
    const std::size_t star_len = prm.prefix_len(j_star);

    Wire w;
    BitWriter hdr;
    hdr.put(n, 32);
    hdr.put(sigma, 32);
    hdr.put(cfg.instances, 8);
    hdr.put(sketchers.front().rows(), 32);
    hdr.put_bool(ext);
    hdr.put_double(sketchers.front().p());
    hdr.put_double(sketchers.front().scale());
    hdr.put(j_star, pw);
    w.sections.emplace_back("alice.header", std::move(hdr));

    BitWriter suf, pre;
    std::vector<std::vector<StableSketch>> suffix(prm.B), prefix(prm.blocks);
    for (const PStableSketcher& s : sketchers) {
        auto sh = shifted_sketches(s, pattern, n, prm.B);
        for (std::size_t t = 0; t < prm.B; ++t) suffix[t].push_back(std::move(sh[t]));
        // Prefix sketches by one left-to-right sweep.
        StableSketch run = s.zero(0, 0);
        std::vector<StableSketch> snaps(prm.blocks);
        std::size_t x = 0;
        for (std::size_t j = prm.blocks; j-- > 0;) {
            const std::size_t len = prm.prefix_len(j);
            for (; x < len; ++x)
                if (pattern[x] != 0) s.accumulate(run, x, static_cast<double>(pattern[x]));
            snaps[j] = run;
            snaps[j].len = len;
        }
        for (std::size_t j = 0; j < prm.blocks; ++j) prefix[j].push_back(std::move(snaps[j]));
    }
    for (const auto& v : suffix)
        for (const auto& sk : v) put_sketch(suf, sk, ext);
    for (const auto& v : prefix)
        for (const auto& sk : v) put_sketch(pre, sk, ext);
    w.sections.emplace_back("alice.suffix", std::move(suf));
    w.sections.emplace_back("alice.prefix", std::move(pre));

    BitWriter rle;
    const unsigned sw = bits_for(sigma);
    const unsigned cw = bits_for(n + 1);
    rle.put_bool(star_len > 0);
    if (star_len > 0) {
        const RleEncoding enc = rle_encode(pattern.subspan(0, star_len), ell);
        rle.put(enc.ell, pw);
        rle.put(enc.total_len, pw);
        for (const auto& runs : enc.runs) {
            rle.put(runs.size(), cw);
            for (const Run& r : runs) {
                rle.put(r.symbol, sw);
                rle.put(r.count, cw);
            }
        }
    }
    w.sections.emplace_back("alice.rle", std::move(rle));
    return w;
}

AlicePayload decode_alice(const Wire& w) {
    AlicePayload a;
    {
        BitReader r = reader(w.section("alice.header"));
        a.n = r.get(32);
        a.sigma = static_cast<std::uint32_t>(r.get(32));
        a.instances = r.get(8);
        a.rows = r.get(32);
        a.extended = r.get_bool();
        a.p = r.get_double();
        a.scale = r.get_double();
        a.j_star = r.get(bits_for(2 * a.n));
        expect_consumed(r, "alice.header");
    }
    const auto prm = Problem2Params::make(a.n, 1.0);
    if (a.j_star < 1 || a.j_star > prm.blocks) throw std::invalid_argument("malformed payload: j* out of range");
    {
        BitReader r = reader(w.section("alice.suffix"));
        a.suffix.resize(prm.B);
        for (std::size_t s = 0; s < prm.B; ++s)
            for (std::size_t t = 0; t < a.instances; ++t)
                a.suffix[s].push_back(get_sketch(r, a.rows, a.extended, 0, a.n - s));
        expect_consumed(r, "alice.suffix");
    }
    {
        BitReader r = reader(w.section("alice.prefix"));
        a.prefix.resize(prm.blocks);
        for (std::size_t j = 0; j < prm.blocks; ++j)
            for (std::size_t t = 0; t < a.instances; ++t)
                a.prefix[j].push_back(get_sketch(r, a.rows, a.extended, 0, prm.prefix_len(j)));
        expect_consumed(r, "alice.prefix");
    }
    {
        BitReader r = reader(w.section("alice.rle"));
        const unsigned pw = bits_for(2 * a.n), sw = bits_for(a.sigma), cw = bits_for(a.n + 1);
        if (r.get_bool()) {
            RleEncoding enc;
            enc.ell = r.get(pw);
            enc.total_len = r.get(pw);
            if (enc.ell == 0 || enc.ell > enc.total_len) throw std::invalid_argument("malformed payload: bad RLE header");
            enc.runs.resize(enc.ell);
            for (auto& runs : enc.runs) {
                const std::size_t count = r.get(cw);
                for (std::size_t t = 0; t < count; ++t) {
                    Run run;
                    run.symbol = static_cast<Symbol>(r.get(sw));
                    run.count = r.get(cw);
                    runs.push_back(run);
                }
            }
            a.rle = std::move(enc);
        }
        expect_consumed(r, "alice.rle");
    }
    return a;
}

Wire p2_bob_message(const Wire& alice_wire, TextView t1, const ProtocolConfig& cfg, const Seed& seed) {
    const AlicePayload alice = decode_alice(alice_wire);
    const std::size_t n = alice.n;
    if (t1.size() != n) throw std::invalid_argument("p2_bob_message: T1 must have length n");
    const auto prm = Problem2Params::make(n, cfg.eps);
    const auto sketchers = make_sketchers(cfg.eps, alice.sigma, seed, alice.instances, n, 2, cfg.c_m);
    const bool ext = alice.extended;
    const unsigned pw = bits_for(2 * n), sw = bits_for(alice.sigma);
    for (Symbol s : t1)
        if (s >= alice.sigma) throw std::invalid_argument("p2_bob_message: text symbol outside the alphabet");

    // Left-aligned sketches of T1[a, n) for every a that is a border or lies in a small block.
    const std::size_t small_end = std::min(n, (alice.j_star - 1) * prm.B);
    const std::size_t shifts = std::max(small_end, (prm.blocks - 1) * prm.B + 1);
    std::vector<std::vector<StableSketch>> borders(prm.blocks);
    std::vector<std::vector<double>> small_est(small_end, std::vector<double>(alice.instances));
    for (std::size_t a = 0; a < alice.instances; ++a) {
        const PStableSketcher& s = sketchers[a];
        auto sh = shifted_sketches(s, t1, n, shifts);
        for (std::size_t g = 0; g < prm.blocks; ++g) borders[g].push_back(sh[g * prm.B]);
        for (std::size_t al = 0; al < small_end; ++al) {
            const std::size_t j = al / prm.B + 1;
            const std::size_t len = prm.prefix_len(j);
            StableSketch sk = std::move(sh[al]);
            // Drop the columns past the prefix length.
            for (std::size_t x = len; x < n - al; ++x)
                if (t1[al + x] != 0) s.accumulate(sk, x, -static_cast<double>(t1[al + x]));
            sk.len = len;
            small_est[al][a] = protocol_estimate(s, sk, alice.prefix[j][a]);
        }
    }
    std::vector<SmallAlignment> small;
    for (std::size_t al = 0; al < small_end; ++al) {
        const double e = median_of(small_est[al]);
        if (e < (1.0 + cfg.eps / 2.0) * prm.tau) small.push_back({al, e});
    }

    // Exact search for the first close alignment among blocks j >= j*.
    Text decoded = alice.rle ? rle_decode(*alice.rle) : Text{};
    bool has_p = false;
    std::size_t p = 0, jss = 0;
    for (std::size_t j = alice.j_star; j <= prm.blocks && !has_p; ++j) {
        const std::size_t len = prm.prefix_len(j);
        if (len == 0) break;
        for (std::size_t al = (j - 1) * prm.B; al < j * prm.B && al + len <= n; ++al) {
            if (static_cast<double>(hd(TextView(decoded).subspan(0, len), t1.subspan(al, len))) <= prm.tau) {
                has_p = true;
                p = al;
                jss = j;
                break;
            }
        }
    }
    std::vector<Mismatch> mism;
    if (has_p) {
        const std::size_t len = prm.prefix_len(jss);
        for (std::size_t x = 0; x < len; ++x)
            if (decoded[x] != t1[p + x]) mism.push_back({x, t1[p + x]});
    }

    Wire w;
    for (const auto& sec : alice_wire.sections) w.sections.push_back(sec);
    BitWriter bw;
    for (const auto& v : borders)
        for (const auto& sk : v) put_sketch(bw, sk, ext);
    w.sections.emplace_back("bob.borders", std::move(bw));
    BitWriter sm;
    sm.put(small.size(), pw);
    for (const auto& s : small) {
        sm.put(s.alignment, pw);
        sm.put_double(s.estimate);
    }
    w.sections.emplace_back("bob.small", std::move(sm));
    BitWriter an;
    an.put_bool(has_p);
    if (has_p) {
        an.put(p, pw);
        an.put(jss, pw);
        an.put(mism.size(), pw);
        for (const auto& m : mism) {
            an.put(m.offset, pw);
            an.put(m.symbol, sw);
        }
    }
    w.sections.emplace_back("bob.anchor", std::move(an));
    BitWriter lb;
    for (std::size_t x = n - prm.B; x < n; ++x) lb.put(t1[x], sw);
    w.sections.emplace_back("bob.last_block", std::move(lb));
    return w;
}

BobPayload decode_bob(const Wire& w) {
    BobPayload b;
    b.alice = decode_alice(w);
    const std::size_t n = b.alice.n;
    const auto prm = Problem2Params::make(n, 1.0);
    const unsigned pw = bits_for(2 * n), sw = bits_for(b.alice.sigma);
    {
        BitReader r = reader(w.section("bob.borders"));
        b.borders.resize(prm.blocks);
        for (std::size_t g = 0; g < prm.blocks; ++g)
            for (std::size_t t = 0; t < b.alice.instances; ++t)
                b.borders[g].push_back(get_sketch(r, b.alice.rows, b.alice.extended, 0, n - g * prm.B));
        expect_consumed(r, "bob.borders");
    }
    {
        BitReader r = reader(w.section("bob.small"));
        const std::size_t count = r.get(pw);
        for (std::size_t t = 0; t < count; ++t) {
            SmallAlignment s;
            s.alignment = r.get(pw);
            s.estimate = r.get_double();
            if (s.alignment >= n) throw std::invalid_argument("malformed payload: small alignment out of range");
            b.small.push_back(s);
        }
        expect_consumed(r, "bob.small");
    }
    {
        BitReader r = reader(w.section("bob.anchor"));
        b.has_p = r.get_bool();
        if (b.has_p) {
            b.p = r.get(pw);
            b.j_star_star = r.get(pw);
            const std::size_t count = r.get(pw);
            for (std::size_t t = 0; t < count; ++t) {
                Mismatch m;
                m.offset = r.get(pw);
                m.symbol = static_cast<Symbol>(r.get(sw));
                b.mismatches.push_back(m);
            }
        }
        expect_consumed(r, "bob.anchor");
    }
    {
        BitReader r = reader(w.section("bob.last_block"));
        for (std::size_t x = 0; x < prm.B; ++x) b.last_block.push_back(static_cast<Symbol>(r.get(sw)));
        expect_consumed(r, "bob.last_block");
    }
    return b;
}

CharlieResult p2_charlie_eval(const Wire& bob_wire, TextView t2, const ProtocolConfig& cfg, const Seed& seed) {
    const BobPayload bob = decode_bob(bob_wire);
    const AlicePayload& alice = bob.alice;
    const std::size_t n = alice.n;
    if (t2.size() != n) throw std::invalid_argument("p2_charlie_eval: T2 must have length n");
    const auto prm = Problem2Params::make(n, cfg.eps);
    const auto sketchers = make_sketchers(cfg.eps, alice.sigma, seed, alice.instances, n, 2, cfg.c_m);
    const std::size_t inst = alice.instances;

    CharlieResult res;
    const Text decoded = alice.rle ? rle_decode(*alice.rle) : Text{};
    const std::size_t star_len = prm.prefix_len(alice.j_star);
    if (decoded.size() != star_len) throw std::invalid_argument("malformed payload: RLE prefix has the wrong length");

    // Known suffix of T1: from the anchor p (prefix plus fixes) and the verbatim last block.
    const std::size_t tail_start = n - prm.B;
    std::size_t known = tail_start;
    Text t1_known(bob.last_block);
    if (bob.has_p) {
        const std::size_t len = prm.prefix_len(bob.j_star_star);
        if (bob.j_star_star < alice.j_star || len > decoded.size() || bob.p + len > n)
            throw std::invalid_argument("reconstruction inconsistency: anchor out of range");
        if (bob.p + len < tail_start) throw std::invalid_argument("reconstruction inconsistency: gap before last block");
        Text rec(decoded.begin(), decoded.begin() + static_cast<std::ptrdiff_t>(len));
        for (const Mismatch& m : bob.mismatches) {
            if (m.offset >= len) throw std::invalid_argument("reconstruction inconsistency: mismatch out of bounds");
            rec[m.offset] = m.symbol;
        }
        for (std::size_t x = bob.p + len; x < n; ++x) rec.push_back(bob.last_block[x - tail_start]);
        for (std::size_t x = std::max(bob.p, tail_start); x < n; ++x)
            if (rec[x - bob.p] != bob.last_block[x - tail_start])
                throw std::invalid_argument("reconstruction inconsistency: last block disagrees");
        if (bob.p < tail_start) {
            known = bob.p;
            t1_known = std::move(rec);
        }
    }
    res.known_start = known;
    res.reconstructed = t1_known;
    // Symbol of T at position x, for x >= known.
    auto text_at = [&](std::size_t x) -> Symbol { return x < n ? t1_known[x - known] : t2[x - n]; };

    std::vector<const SmallAlignment*> small_at(n + 1, nullptr);
    for (const auto& s : bob.small) small_at[s.alignment] = &s;

    // Sketch of T[a + x] over x in [from, n) in pattern coordinates, for each instance.
    auto remainder = [&](std::size_t a, std::size_t from, std::size_t j) {
        std::vector<double> ests(inst);
        for (std::size_t t = 0; t < inst; ++t) {
            const PStableSketcher& s = sketchers[t];
            StableSketch txt = s.zero(from, n - from);
            for (std::size_t x = from; x < n; ++x) {
                const Symbol c = text_at(a + x);
                if (c != 0) s.accumulate(txt, x, static_cast<double>(c));
            }
            StableSketch pat = sketch_add(alice.prefix[0][t], alice.prefix[j][t], -1.0);
            pat.offset = from;
            pat.len = n - from;
            ests[t] = protocol_estimate(s, txt, pat);
        }
        return median_of(ests);
    };

    res.estimates.assign(n + 1, 0.0);
    // Large path state: text side for the current border e, extended by T2 symbols as a grows.
    std::size_t cur_e = n + 1;
    std::vector<StableSketch> large_txt;
    for (std::size_t a = 0; a <= n; ++a) {
        if (a >= known) {
            std::size_t exact = 0;
            for (std::size_t x = 0; x < star_len; ++x) exact += decoded[x] != text_at(a + x);
            res.estimates[a] = static_cast<double>(exact) + remainder(a, star_len, alice.j_star);
            continue;
        }
        if (small_at[a]) {
            const std::size_t j = a / prm.B + 1;
            res.estimates[a] = small_at[a]->estimate + remainder(a, prm.prefix_len(j), j);
            continue;
        }
        const std::size_t e = (a + prm.B - 1) / prm.B * prm.B;
        const std::size_t s_off = e - a;
        if (e != cur_e) {
            cur_e = e;
            large_txt.clear();
            for (std::size_t t = 0; t < inst; ++t) {
                StableSketch sk = bob.borders[e / prm.B][t];
                for (std::size_t x = 0; x < a; ++x)
                    if (t2[x] != 0) sketchers[t].accumulate(sk, n - e + x, static_cast<double>(t2[x]));
                sk.len = n - e + a;
                large_txt.push_back(std::move(sk));
            }
        } else {
            for (std::size_t t = 0; t < inst; ++t) {
                if (t2[a - 1] != 0) sketchers[t].accumulate(large_txt[t], n - e + a - 1, static_cast<double>(t2[a - 1]));
                large_txt[t].len = n - e + a;
            }
        }
        std::vector<double> ests(inst);
        for (std::size_t t = 0; t < inst; ++t)
            ests[t] = protocol_estimate(sketchers[t], large_txt[t], alice.suffix[s_off][t]);
        res.estimates[a] = median_of(ests) + static_cast<double>(prm.B);
    }
    return res;
}

Problem2Result run_problem2(TextView pattern, TextView text, const ProtocolConfig& cfg_in, const Seed& seed) {
    const std::size_t n = pattern.size();
    if (text.size() != 2 * n) throw std::invalid_argument("run_problem2: text must have length 2n");
    ProtocolConfig cfg = cfg_in;
    if (!cfg.sigma) cfg.sigma = infer_sigma(pattern, text);
    Problem2Result res;
    res.params = Problem2Params::make(n, cfg.eps);
    const Wire aw = p2_alice_message(pattern, cfg, seed);
    for (const auto& [name, w] : aw.sections) res.transcript.add(Party::alice, Party::bob, name, w.bit_count());
    const Wire bw = p2_bob_message(aw, text.subspan(0, n), cfg, seed);
    for (const auto& [name, w] : bw.sections)
        res.transcript.add(Party::bob, Party::charlie, name.rfind("alice.", 0) == 0 ? "forward." + name : name,
                           w.bit_count());
    res.charlie = p2_charlie_eval(bw, text.subspan(n), cfg, seed);
    res.charlie.transcript = res.transcript;
    res.bob = decode_bob(bw);
    res.estimates = res.charlie.estimates;
    return res;
}

}  // namespace hamstream

#include "hamstream/pstable.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <stdexcept>

namespace hamstream {

double stability_for(double eps, std::uint32_t sigma) {
    if (!(eps > 0.0)) throw std::invalid_argument("stability_for: eps must be positive");
    if (sigma <= 2) return std::min(eps, 2.0);
    const double p = eps / std::log2(static_cast<double>(sigma));
    return std::clamp(p, 0.05, 2.0);
}

std::size_t pstable_rows(double eps, double c_m) {
    const double m = std::ceil(c_m / (eps * eps) - 1e-9);
    return std::max<std::size_t>(16, static_cast<std::size_t>(m));
}

PStableSketcher::PStableSketcher(std::size_t m, double p, const Seed& seed, std::uint32_t stream,
                                 double scale, std::size_t width)
    : m_(m), p_(p), scale_(scale), extended_(p < kExtendedBelow), width_(width),
      source_(seed, stream, p) {
    if (m < 16) throw std::invalid_argument("PStableSketcher: need at least 16 rows");
    if (!(scale > 0.0)) throw std::invalid_argument("PStableSketcher: scale must be positive");
    cache_.resize(m_ * width_);
    for (std::size_t c = 0; c < width_; ++c) source_.column(c, m_, cache_.data() + c * m_);
}

const double* PStableSketcher::column(std::size_t col) const {
    if (col < width_) return cache_.data() + col * m_;
    thread_local std::vector<double> scratch;
    scratch.resize(m_);
    source_.column(col, m_, scratch.data());
    return scratch.data();
}

StableSketch PStableSketcher::zero(std::size_t offset, std::size_t len) const {
    StableSketch sk;
    sk.hi.assign(m_, 0.0);
    if (extended_) sk.lo.assign(m_, 0.0);
    sk.offset = offset;
    sk.len = len;
    return sk;
}

void two_sum_into(double& hi, double& lo, double v) {
    const double s = hi + v;
    const double bb = s - hi;
    const double err = (hi - (s - bb)) + (v - bb);
    hi = s;
    lo += err;
}

void PStableSketcher::accumulate(StableSketch& sk, std::size_t col, double coef) const {
    const double* y = column(col);
    if (!extended_) {
        for (std::size_t i = 0; i < m_; ++i) sk.hi[i] += coef * y[i];
        return;
    }
    for (std::size_t i = 0; i < m_; ++i) {
        const double prod = coef * y[i];
        const double perr = std::fma(coef, y[i], -prod);
        two_sum_into(sk.hi[i], sk.lo[i], prod);
        sk.lo[i] += perr;
    }
}

StableSketch PStableSketcher::sketch(TextView x, std::size_t offset) const {
    StableSketch sk = zero(offset, x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        if (x[j] != 0) accumulate(sk, offset + j, static_cast<double>(x[j]));
    return sk;
}

std::vector<double> sketch_difference(const StableSketch& a, const StableSketch& b) {
    if (a.hi.size() != b.hi.size()) throw std::invalid_argument("sketch_difference: row count mismatch");
    std::vector<double> d(a.hi.size());
    const bool ext = !a.lo.empty() && !b.lo.empty();
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (ext) {
            double hi = a.hi[i], lo = 0.0;
            two_sum_into(hi, lo, -b.hi[i]);
            d[i] = hi + (lo + (a.lo[i] - b.lo[i]));
        } else {
            d[i] = a.hi[i] - b.hi[i];
        }
    }
    return d;
}

StableSketch sketch_add(const StableSketch& a, const StableSketch& b, double coef_b) {
    if (a.hi.size() != b.hi.size()) throw std::invalid_argument("sketch_add: row count mismatch");
    StableSketch out = a;
    const bool ext = !a.lo.empty() && !b.lo.empty();
    for (std::size_t i = 0; i < out.hi.size(); ++i) {
        if (ext) {
            two_sum_into(out.hi[i], out.lo[i], coef_b * b.hi[i]);
            out.lo[i] += coef_b * b.lo[i];
        } else {
            out.hi[i] += coef_b * b.hi[i];
        }
    }
    return out;
}

double pstable_estimate_diff(double p, double scale, std::vector<double> diff) {
    if (diff.empty()) throw std::invalid_argument("pstable_estimate: empty sketch");
    for (double& v : diff) v = std::fabs(v);
    auto mid = diff.begin() + static_cast<std::ptrdiff_t>((diff.size() - 1) / 2);
    std::nth_element(diff.begin(), mid, diff.end());
    if (*mid == 0.0) return 0.0;
    return std::pow(*mid / scale, p);
}

DistanceEstimate pstable_estimate(const PStableSketcher& s, const StableSketch& a, const StableSketch& b) {
    if (a.offset != b.offset || a.len != b.len)
        throw std::invalid_argument("pstable_estimate: sketches cover different columns");
    if (a.hi.size() != s.rows() || b.hi.size() != s.rows())
        throw std::invalid_argument("pstable_estimate: row count mismatch");
    DistanceEstimate e;
    e.value = pstable_estimate_diff(s.p(), s.scale(), sketch_difference(a, b));
    e.eps = 0.0;
    e.kind = DistanceEstimate::Kind::sketched;
    return e;
}

double calibrate_scale(double p, std::size_t m, std::size_t trials, const Seed& seed) {
    if (trials < 1000) throw std::invalid_argument("calibrate_scale: need at least 1000 trials");
    if (m < 1) throw std::invalid_argument("calibrate_scale: m must be positive");
    StableSource src(seed, stream_id(Purpose::calibration), p);
    std::vector<double> col(m), medians(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        src.column(t, m, col.data());
        for (double& v : col) v = std::fabs(v);
        auto mid = col.begin() + static_cast<std::ptrdiff_t>((m - 1) / 2);
        std::nth_element(col.begin(), mid, col.end());
        medians[t] = *mid;
    }
    auto mid = medians.begin() + static_cast<std::ptrdiff_t>((trials - 1) / 2);
    std::nth_element(medians.begin(), mid, medians.end());
    return *mid;
}

namespace {

long long p_key(double p) { return std::llround(p * 1e9); }

}  // namespace

CalibrationTable& CalibrationTable::global() {
    static CalibrationTable t;
    return t;
}

Seed CalibrationTable::calibration_seed() { return Seed::from_u64(0x6ca11b7a7e5ca1eULL); }

double CalibrationTable::scale(double p, std::size_t m) {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = table_.find({p_key(p), m});
        if (it != table_.end()) return it->second;
    }
    const double s = calibrate_scale(p, m, kTrials, calibration_seed());
    std::lock_guard<std::mutex> lk(mu_);
    table_.emplace(std::make_pair(p_key(p), m), s);
    return s;
}

void CalibrationTable::set(double p, std::size_t m, double scale) {
    std::lock_guard<std::mutex> lk(mu_);
    table_[{p_key(p), m}] = scale;
}

std::string CalibrationTable::to_json() const {
    std::lock_guard<std::mutex> lk(mu_);
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [key, s] : table_)
        j.push_back({{"p", static_cast<double>(key.first) / 1e9}, {"m", key.second}, {"scale", s}});
    return j.dump(2) + "\n";
}

void CalibrationTable::load_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    if (!j.is_array()) throw std::invalid_argument("calibration table must be a JSON array");
    for (const auto& e : j) set(e.at("p").get<double>(), e.at("m").get<std::size_t>(), e.at("scale").get<double>());
}

}  // namespace hamstream

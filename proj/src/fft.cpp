#include "hamstream/fft.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace hamstream {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

namespace {

const std::vector<Complex>& twiddles(std::size_t n) {
    thread_local std::map<std::size_t, std::vector<Complex>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<Complex> w(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        w[k] = Complex(std::cos(a), std::sin(a));
    }
    return cache.emplace(n, std::move(w)).first->second;
}

std::size_t reverse_bits(std::size_t x, unsigned bits) {
    std::size_t r = 0;
    for (unsigned b = 0; b < bits; ++b) r |= ((x >> b) & 1) << (bits - 1 - b);
    return r;
}

}  // namespace

ResumableFft::ResumableFft(std::vector<Complex>* data, bool inverse)
    : data_(data), inverse_(inverse), n_(data->size()), phase_(0) {
    if (n_ == 0 || (n_ & (n_ - 1)) != 0) throw std::invalid_argument("fft size must be a power of two");
    while ((std::size_t{1} << log_n_) < n_) ++log_n_;
}

std::size_t ResumableFft::cost(std::size_t size) {
    unsigned lg = 0;
    while ((std::size_t{1} << lg) < size) ++lg;
    return size + (size / 2) * lg;
}

bool ResumableFft::run(std::size_t& budget) {
    auto& a = *data_;
    if (phase_ == 0) {
        while (idx_ < n_ && budget > 0) {
            std::size_t r = reverse_bits(idx_, log_n_);
            if (idx_ < r) std::swap(a[idx_], a[r]);
            ++idx_;
            --budget;
        }
        if (idx_ < n_) return false;
        phase_ = 1;
        half_ = 1;
        start_ = 0;
        j_ = 0;
    }
    if (phase_ == 1) {
        const auto& w = twiddles(n_);
        while (half_ < n_) {
            const std::size_t stride = n_ / (2 * half_);
            while (start_ < n_) {
                while (j_ < half_) {
                    if (budget == 0) return false;
                    Complex t = w[j_ * stride];
                    if (inverse_) t = std::conj(t);
                    Complex u = a[start_ + j_];
                    Complex v = a[start_ + j_ + half_] * t;
                    a[start_ + j_] = u + v;
                    a[start_ + j_ + half_] = u - v;
                    ++j_;
                    --budget;
                }
                j_ = 0;
                start_ += 2 * half_;
            }
            start_ = 0;
            half_ <<= 1;
        }
        phase_ = 2;
    }
    return true;
}

void fft_inplace(std::vector<Complex>& data, bool inverse) {
    ResumableFft f(&data, inverse);
    std::size_t budget = ResumableFft::cost(data.size());
    if (!f.run(budget)) throw std::logic_error("fft did not finish within its cost bound");
}

std::vector<Complex> reversed_prefix_spectrum(TextView pattern, std::size_t block_len, std::size_t size) {
    if (pattern.size() < block_len) throw std::invalid_argument("pattern shorter than block");
    std::vector<Complex> s(size, Complex(0, 0));
    for (std::size_t u = 0; u < block_len; ++u) s[u] = Complex(static_cast<double>(pattern[block_len - 1 - u]), 0);
    fft_inplace(s, false);
    return s;
}

PrefixDistanceTask::PrefixDistanceTask(TextView block, TextView pattern_prefix,
                                       const std::vector<Complex>* spectrum, Method method)
    : block_(block.begin(), block.end()), pattern_(pattern_prefix.begin(), pattern_prefix.end()),
      spectrum_(spectrum) {
    const std::size_t b = block_.size();
    if (pattern_.size() != b) throw std::invalid_argument("PrefixDistanceTask: length mismatch");
    dist_.assign(b, 0);
    if (method == Method::fft) {
        if (!spectrum_ || spectrum_->size() < 2 * b) throw std::invalid_argument("PrefixDistanceTask: bad spectrum");
        buf_.assign(spectrum_->size(), Complex(0, 0));
        ones_x_.assign(b + 1, 0);
        stage_ = Stage::load;
        idx_ = buf_.size();
    } else {
        stage_ = Stage::naive;
        idx_ = 0;
    }
}

std::size_t PrefixDistanceTask::cost(std::size_t block_len, Method method) {
    if (method == Method::naive) return block_len * (block_len + 1) / 2 + block_len;
    const std::size_t n = next_pow2(2 * block_len);
    return n + 2 * ResumableFft::cost(n) + n + block_len;
}

bool PrefixDistanceTask::run(std::size_t& budget) {
    const std::size_t b = block_.size();
    while (budget > 0 && stage_ != Stage::done) {
        switch (stage_) {
        case Stage::load:
            // Walks indices downward so the suffix counts of X come out in order.
            while (idx_ > 0 && budget > 0) {
                --idx_;
                if (idx_ < b) {
                    buf_[idx_] = Complex(static_cast<double>(block_[idx_]), 0);
                    ones_x_[idx_] = ones_x_[idx_ + 1] + block_[idx_];
                }
                --budget;
            }
            if (idx_ == 0) {
                stage_ = Stage::forward;
                fft_ = ResumableFft(&buf_, false);
            }
            break;
        case Stage::forward:
            if (fft_.run(budget)) {
                stage_ = Stage::multiply;
                idx_ = 0;
            }
            break;
        case Stage::multiply:
            while (idx_ < buf_.size() && budget > 0) {
                buf_[idx_] *= (*spectrum_)[idx_];
                ++idx_;
                --budget;
            }
            if (idx_ == buf_.size()) {
                stage_ = Stage::inverse;
                fft_ = ResumableFft(&buf_, true);
            }
            break;
        case Stage::inverse:
            if (fft_.run(budget)) {
                stage_ = Stage::extract;
                idx_ = b;
                ones_p_.assign(1, 0);
            }
            break;
        case Stage::extract: {
            // i runs from B - 1 down to 0 so the prefix length B - i grows by one.
            const double norm = static_cast<double>(buf_.size());
            while (idx_ > 0 && budget > 0) {
                const std::size_t i = idx_ - 1;
                const std::size_t len = b - i;
                ones_p_.push_back(ones_p_.back() + pattern_[len - 1]);
                const double corr = std::round(buf_[i + b - 1].real() / norm);
                const auto c = static_cast<std::size_t>(corr);
                dist_[i] = ones_p_[len] + ones_x_[i] - 2 * c;
                --idx_;
                --budget;
            }
            if (idx_ == 0) {
                stage_ = Stage::done;
                buf_.clear();
                buf_.shrink_to_fit();
            }
            break;
        }
        case Stage::naive:
            // One unit per compared symbol; a row may be split across calls.
            while (idx_ < b && budget > 0) {
                const std::size_t len = b - idx_;
                while (naive_u_ < len && budget > 0) {
                    naive_d_ += pattern_[naive_u_] != block_[idx_ + naive_u_];
                    ++naive_u_;
                    --budget;
                }
                if (naive_u_ < len) break;
                dist_[idx_] = naive_d_;
                naive_d_ = 0;
                naive_u_ = 0;
                ++idx_;
            }
            if (idx_ == b) stage_ = Stage::done;
            break;
        case Stage::done:
            break;
        }
    }
    return stage_ == Stage::done;
}

std::vector<std::size_t> prefix_distances(TextView block, TextView pattern_prefix,
                                          PrefixDistanceTask::Method method) {
    std::vector<Complex> spec;
    if (method == PrefixDistanceTask::Method::fft)
        spec = reversed_prefix_spectrum(pattern_prefix, block.size(), next_pow2(2 * block.size()));
    PrefixDistanceTask task(block, pattern_prefix, &spec, method);
    std::size_t budget = PrefixDistanceTask::cost(block.size(), method);
    if (!task.run(budget)) throw std::logic_error("prefix distance task exceeded its cost bound");
    return std::move(task.result());
}

}  // namespace hamstream

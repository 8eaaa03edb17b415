#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "hamstream/types.hpp"

namespace hamstream {

using Complex = std::complex<double>;

std::size_t next_pow2(std::size_t n);

// In-place iterative radix-2 transform that can be run in slices of unit work:
// one unit per bit-reversal index and one per butterfly. The inverse transform
// is unnormalized.
class ResumableFft {
public:
    ResumableFft() = default;
    ResumableFft(std::vector<Complex>* data, bool inverse);

    // Runs at most `budget` units, subtracting what it used. True when finished.
    bool run(std::size_t& budget);
    bool done() const { return phase_ == 2; }

    static std::size_t cost(std::size_t size);

private:
    std::vector<Complex>* data_ = nullptr;
    bool inverse_ = false;
    std::size_t n_ = 0;
    unsigned log_n_ = 0;
    int phase_ = 2;
    std::size_t idx_ = 0;
    std::size_t half_ = 1;
    std::size_t start_ = 0;
    std::size_t j_ = 0;
};

void fft_inplace(std::vector<Complex>& data, bool inverse);

// Spectrum of the reversed pattern prefix P[0, B), zero-padded to `size`.
std::vector<Complex> reversed_prefix_spectrum(TextView pattern, std::size_t block_len, std::size_t size);

// D[i] = HD(P[0, B - i), X[i, B)) for a binary block X of length B, sliced into
// unit work so callers can spread it over many symbols.
class PrefixDistanceTask {
public:
    enum class Method { fft, naive };

    PrefixDistanceTask() = default;
    PrefixDistanceTask(TextView block, TextView pattern_prefix, const std::vector<Complex>* spectrum,
                       Method method);

    bool run(std::size_t& budget);
    bool done() const { return stage_ == Stage::done; }
    std::vector<std::size_t>& result() { return dist_; }

    // Upper bound on the units run() needs in total.
    static std::size_t cost(std::size_t block_len, Method method);

private:
    enum class Stage { load, forward, multiply, inverse, extract, naive, done };

    Text block_;
    Text pattern_;
    const std::vector<Complex>* spectrum_ = nullptr;
    std::vector<Complex> buf_;
    ResumableFft fft_;
    std::vector<std::size_t> dist_;
    std::vector<std::size_t> ones_x_;
    std::vector<std::size_t> ones_p_;
    Stage stage_ = Stage::done;
    std::size_t idx_ = 0;
    std::size_t naive_u_ = 0;
    std::size_t naive_d_ = 0;
};

std::vector<std::size_t> prefix_distances(TextView block, TextView pattern_prefix,
                                          PrefixDistanceTask::Method method);

}  // namespace hamstream

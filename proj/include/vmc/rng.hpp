#pragma once

#include <cstdint>
#include <vector>

#include "vmc/rational.hpp"

namespace vmc {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

}  // namespace detail

// Counter-based splitmix64 stream. Streams derived from (seed, index) are
// independent of each other and of iteration order, so replicate loops can be
// chunked across threads without changing any output. The mixing constants
// are frozen: identical (seed, index) must produce identical draws on every
// platform, forever.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t state) : state_(state) {}

    static RandomStream derive(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t s = detail::mix64(seed + 0x9e3779b97f4a7c15ULL);
        s = detail::mix64(s ^ detail::mix64(index + 0x632be59bd9b4e019ULL));
        return RandomStream(s);
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return detail::mix64(state_);
    }

private:
    std::uint64_t state_;
};

// floor(p * 2^64), saturating. Comparing a raw 64-bit draw against this
// threshold samples Bernoulli(p) with bias < 2^-64, deterministically.
inline std::uint64_t unit_threshold(const Rational& p) {
    if (p <= 0) return 0;
    if (p >= 1) return ~0ULL;
    mpz_class scaled = p.get_num();
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 64);
    mpz_class q;
    mpz_tdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), p.get_den().get_mpz_t());
    std::uint64_t lo = mpz_get_ui(q.get_mpz_t());
    if (mpz_sizeinbase(q.get_mpz_t(), 2) > 64) return ~0ULL;
    return lo;
}

inline bool draw_bernoulli(const Rational& p, RandomStream& rng) {
    return rng.next() < unit_threshold(p);
}

// Categorical draw over exact weights, one 64-bit draw per sample. Thresholds
// are the scaled cumulative sums; the final bucket absorbs the rounding slack.
class CategoricalSampler {
public:
    CategoricalSampler() = default;

    explicit CategoricalSampler(const std::vector<Rational>& weights) {
        thresholds_.reserve(weights.size());
        Rational cum = 0;
        for (const Rational& w : weights) {
            cum += w;
            thresholds_.push_back(unit_threshold(cum));
        }
    }

    int draw(RandomStream& rng) const {
        std::uint64_t u = rng.next();
        std::size_t lo = 0, hi = thresholds_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (u < thresholds_[mid])
                hi = mid;
            else
                lo = mid + 1;
        }
        return static_cast<int>(lo);
    }

    std::size_t size() const { return thresholds_.size(); }

private:
    std::vector<std::uint64_t> thresholds_;
};

}  // namespace vmc

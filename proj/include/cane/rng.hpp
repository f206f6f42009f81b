#pragma once

#include <cstdint>
#include <vector>

namespace cane {

// splitmix64 finalizer; used for seeding and for the counter-based sub-seed
// scheme below.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Named random streams. Every randomized procedure derives its own seed as
// seed_for(root_seed, stream), so adding a consumer never perturbs the draws
// of an existing one.
enum class SeedStream : std::uint64_t {
    EdgeSplit = 1,
    BaseInit = 2,
    ScorerInit = 3,
    ScorerInitAttr = 4,
    EpochShuffle = 5,
    Negatives = 6,
    RankTieBreak = 7,
    ClassifyFolds = 8,
    Perturb = 9,
    GradCheck = 10,
    Synthetic = 11,
};

inline std::uint64_t seed_for(std::uint64_t root_seed, SeedStream stream,
                              std::uint64_t counter = 0) {
    std::uint64_t s = root_seed ^ (0x6a09e667f3bcc909ULL * (static_cast<std::uint64_t>(stream) + 1));
    s += 0x9e3779b97f4a7c15ULL * counter;
    return splitmix64(s);
}

// xoshiro256** — small, fast, and identical on every platform, unlike the
// standard distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Unbiased integer in [0, bound) via rejection.
    std::uint64_t uniform_u64(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_u64(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace cane

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace reportqa {

// SplitMix64. Chosen over <random> engines + distributions because the
// standard distributions are implementation-defined and the whole pipeline
// promises byte-identical output across toolchains for a fixed seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, bound). bound must be > 0; modulo bias is irrelevant
    // for the bounds used here and keeps the generator portable.
    std::uint64_t next_below(std::uint64_t bound) {
        return next_u64() % bound;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    bool bernoulli(double p) { return next_double() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Independent deterministic substream for a named unit of work, so
    // per-document generation stays reproducible under any worker order.
    Rng fork(std::string_view tag) const {
        std::uint64_t h = 0xCBF29CE484222325ULL;
        for (char c : tag) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001B3ULL;
        }
        Rng child(state_ ^ h);
        child.next_u64();
        return child;
    }

private:
    std::uint64_t state_;
};

}  // namespace reportqa

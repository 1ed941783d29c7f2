#pragma once

#include <cstdint>
#include <random>

namespace roughcat {

// std::mt19937_64 output is fixed by the standard; the std distributions are
// not, so the mappings to doubles and indices are done here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased index in [0, n).
    std::uint64_t index(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    Rng split(std::uint64_t stream) { return Rng(mix(next() ^ mix(stream + 0x9e3779b97f4a7c15ULL))); }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 eng_;
};

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) {
    return Rng::mix(seed * 0x9e3779b97f4a7c15ULL + Rng::mix(stream + 1));
}

}  // namespace roughcat

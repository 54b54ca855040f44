#ifndef RICMATCH_RNG_HPP
#define RICMATCH_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace ricmatch {

/// Counter-based generator built on the SplitMix64 finalizer.
/// A (seed, stream) pair selects an independent stream; draws are a pure
/// function of (seed, stream, counter), so adding streams never perturbs
/// existing ones.
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed + 0x9E3779B97F4A7C15ULL) ^ mix(stream + 0xBF58476D1CE4E5B9ULL)) {}

    std::uint64_t next_u64() {
        return mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_);
    }

    /// Uniform in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Inclusive integer range.
    long long uniform_int(long long lo, long long hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<long long>(next_u64() % span);
    }

    /// Box-Muller; consumes two uniforms per call.
    double normal(double mean, double sd) {
        const double u1 = 1.0 - next_unit();  // (0, 1]
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Geometric on {0, 1, ...} with the given mean.
    long long geometric(double mean) {
        const double p = 1.0 / (mean + 1.0);
        const double u = next_unit();
        return static_cast<long long>(std::floor(std::log1p(-u) / std::log1p(-p)));
    }

    /// Poisson via exponential inter-arrival sums; stable for any lambda.
    long long poisson(double lambda) {
        double sum = 0.0;
        long long k = -1;
        while (sum <= lambda) {
            sum += -std::log(1.0 - next_unit());
            ++k;
        }
        return k;
    }

    /// Seeded Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<long long>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace ricmatch

#endif

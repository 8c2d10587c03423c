#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace wealthmap {

// Deterministic splitmix64 stream. All randomness in the project flows
// through this type so results are reproducible across platforms and
// standard-library versions (std::shuffle / std::*_distribution are not
// portable between implementations).
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    // Independent substream for (seed, index) pairs, e.g. per-tree streams.
    static RngStream derive(std::uint64_t seed, std::uint64_t index) {
        RngStream mixer(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
        mixer.next_u64();
        return RngStream(mixer.next_u64());
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    // Uniform integer in [0, n). Rejection-free modulo bias is irrelevant at
    // the n we use, but keep it unbiased anyway.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Box-Muller; one value per call, cache the pair partner.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Knuth multiplication method; adequate for the small lambdas used here.
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        double limit = std::exp(-lambda);
        double prod = 1.0;
        int k = -1;
        do {
            ++k;
            prod *= uniform01();
        } while (prod > limit);
        return k;
    }

    int bernoulli(double p) { return uniform01() < p ? 1 : 0; }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct draws from {0..n-1}, partial Fisher-Yates.
    std::vector<int> sample_without_replacement(int n, int k) {
        std::vector<int> pool(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
        if (k > n) k = n;
        for (int i = 0; i < k; ++i) {
            std::size_t j = static_cast<std::size_t>(i) +
                            static_cast<std::size_t>(below(static_cast<std::uint64_t>(n - i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        }
        pool.resize(static_cast<std::size_t>(k));
        return pool;
    }

  private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace wealthmap

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace qmetro {

// SplitMix64 finalizer. Used both as a stream-key derivation hash and as the
// per-draw output function of CounterRng.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Counter-based generator: every draw is a hash of (key, counter). Streams
// keyed by (master_seed, stream_id) are independent and order-free, so
// ensembles are reproducible bit-exactly regardless of worker count.
//
// Normal variates come from Box-Muller on the uniform bits rather than
// std::normal_distribution, whose output is implementation-defined.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}
    CounterRng(std::uint64_t master_seed, std::uint64_t stream_id)
        : key_(derive_stream_key(master_seed, stream_id)) {}

    static std::uint64_t derive_stream_key(std::uint64_t master_seed, std::uint64_t stream_id) {
        return splitmix64(splitmix64(master_seed) ^ (stream_id * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL));
    }

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64() { return splitmix64(key_ ^ (0x5851F42D4C957F2DULL * ++counter_)); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased integer in [0, n) by rejection
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // standard normal via Box-Muller; the spare value is cached
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // uniform in the closed unit ball, by rejection
    Eigen::Vector3d unit_ball() {
        while (true) {
            Eigen::Vector3d v(uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0));
            if (v.squaredNorm() <= 1.0) return v;
        }
    }

    // flat Dirichlet via normalized exponentials
    std::vector<double> dirichlet(std::size_t n) {
        std::vector<double> w(n);
        double sum = 0.0;
        for (auto& x : w) {
            x = -std::log(1.0 - uniform());
            sum += x;
        }
        for (auto& x : w) x /= sum;
        return w;
    }

    // Fisher-Yates
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace qmetro

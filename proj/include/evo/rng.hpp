#pragma once
// Counter-based generator: output i is a pure function of (key, i), so any
// candidate's stream can be rebuilt from split(master_seed, candidate_id).

#include <cmath>
#include <cstdint>
#include <limits>

namespace evo {

constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t id) {
    return mix64(master ^ mix64(id ^ 0xD1B54A32D192ED03ULL));
}

class Rng {
public:
    using result_type = std::uint64_t;
    explicit Rng(std::uint64_t key = 0) : key_(mix64(key)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(key_ ^ mix64(++counter_)); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        std::uint64_t limit = max() - max() % n;
        std::uint64_t x;
        do x = (*this)(); while (x >= limit);
        return x % n;
    }

    long range(long a, long b) { return a + static_cast<long>(below(static_cast<std::uint64_t>(b - a + 1))); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0;
        while (u1 <= 0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2 * M_PI * u2);
    }

    bool coin(double p = 0.5) { return uniform() < p; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0;
    bool have_spare_ = false;
};

}  // namespace evo

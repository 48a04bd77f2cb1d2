#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <utility>

namespace dcsvm {

/// Seeded generator with platform-independent derived draws. `std::mt19937_64` output is fixed by
/// the standard; the standard distributions and `std::shuffle` are not, so they are avoided.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_{ seed } {}

    /// Uniform integer in [0, bound) by rejection sampling. `bound` must be positive.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t draw = engine_();
        while (draw >= limit) {
            draw = engine_();
        }
        return draw % bound;
    }

    /// Uniform real in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace dcsvm

#pragma once

#include <cstdint>
#include <random>

namespace mgc {

/// Deterministic helper around mt19937_64; doubles are derived from raw bits
/// so runs with the same seed reproduce byte-identical reports.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

private:
    std::mt19937_64 gen_;
};

} // namespace mgc

#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace spde {

/// Philox4x32-10 counter-based generator.
///
/// Stateless: the output is a pure function of (counter, key). Used so that
/// every Brownian increment is addressed by (seed, mode, step) and trajectories
/// do not depend on evaluation order or thread layout.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) noexcept;
};

/// Two independent standard normal variates.
struct NormalPair {
    double first;
    double second;
};

/// Noise source keyed by a 64-bit seed; draws are addressed by (mode, step).
///
/// Modes 2b-1 and 2b share the Box-Muller pair of block b. The auxiliary
/// stream (recovery variable of coupled systems) uses blocks with the top bit
/// set, so it never overlaps the primary one.
class CounterNormal {
public:
    explicit CounterNormal(std::uint64_t seed) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    /// Raw Box-Muller pair at counter (block, step).
    NormalPair pair(std::uint64_t block, std::uint64_t step) const noexcept;

    /// Primary draw for mode k >= 1.
    double normal(std::uint64_t mode, std::uint64_t step) const noexcept {
        const NormalPair p = pair((mode + 1) / 2, step);
        return (mode & 1) ? p.first : p.second;
    }
    double auxiliary(std::uint64_t mode, std::uint64_t step) const noexcept {
        const NormalPair p = pair(kAuxiliary | ((mode + 1) / 2), step);
        return (mode & 1) ? p.first : p.second;
    }

    /// out[k-1] = normal(k, step) for k = 1..out.size().
    void fill(std::uint64_t step, std::span<double> out) const noexcept { fill_from(0, step, out); }
    /// out[k-1] = auxiliary(k, step).
    void fill_auxiliary(std::uint64_t step, std::span<double> out) const noexcept {
        fill_from(kAuxiliary, step, out);
    }

    static constexpr std::uint64_t kAuxiliary = std::uint64_t{1} << 63;

private:
    void fill_from(std::uint64_t base, std::uint64_t step, std::span<double> out) const noexcept;

    Philox4x32::Key key_;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of trial `index` derived from a master seed.
std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

}  // namespace spde

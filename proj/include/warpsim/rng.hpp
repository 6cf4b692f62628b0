#pragma once

#include <cstdint>
#include <vector>

namespace warpsim {

// Combined three-component Tausworthe generator (L'Ecuyer's taus88).
// Component seeds must satisfy s1 >= 2, s2 >= 8, s3 >= 16; make_rng_state
// re-maps invalid components instead of rejecting them.
struct RngState {
    std::uint32_t s1 = 2;
    std::uint32_t s2 = 8;
    std::uint32_t s3 = 16;

    bool operator==(const RngState&) const = default;
};

RngState make_rng_state(std::uint32_t s1, std::uint32_t s2, std::uint32_t s3);

// Expands a single 64-bit seed into a valid master state (splitmix64 mixing).
RngState rng_state_from_seed(std::uint64_t seed);

// Advances the state and returns the next 32-bit output.
std::uint32_t taus_next(RngState& state);

// Next real in [0, 1): taus_next(state) / 2^32.
double uniform01(RngState& state);

// Inverse-CDF exponential transform of a single uniform draw.
double exponential_from_u(double u, double rate);

// Draws one uniform and applies exponential_from_u. rate must be > 0.
double exponential(RngState& state, double rate);

// Random Spacing: each stream is seeded with three fresh 32-bit draws from
// the master (re-mapped to valid component ranges). Streams are pairwise
// distinct; colliding candidates are redrawn, at most 1000 times each.
std::vector<RngState> random_spacing(RngState& master, std::size_t count);

// Callable uniform source over an owned state; models template over this.
struct TausStream {
    RngState state;
    double operator()() { return uniform01(state); }
};

}  // namespace warpsim

#include "warpsim/rng.hpp"

#include <cmath>
#include <set>
#include <tuple>

#include "warpsim/error.hpp"

namespace warpsim {

namespace {

// Minimum valid value per component; seeds below it are re-mapped by OR-ing
// the minimum in, which keeps at least one high bit of the survivable part.
constexpr std::uint32_t kMin1 = 2;
constexpr std::uint32_t kMin2 = 8;
constexpr std::uint32_t kMin3 = 16;

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

RngState make_rng_state(std::uint32_t s1, std::uint32_t s2, std::uint32_t s3) {
    if (s1 < kMin1) s1 |= kMin1;
    if (s2 < kMin2) s2 |= kMin2;
    if (s3 < kMin3) s3 |= kMin3;
    return RngState{s1, s2, s3};
}

RngState rng_state_from_seed(std::uint64_t seed) {
    std::uint64_t x = seed;
    auto word = [&] { return static_cast<std::uint32_t>(splitmix64(x) >> 32); };
    return make_rng_state(word(), word(), word());
}

std::uint32_t taus_next(RngState& s) {
    std::uint32_t b;
    b = ((s.s1 << 13) ^ s.s1) >> 19;
    s.s1 = ((s.s1 & 0xFFFFFFFEu) << 12) ^ b;
    b = ((s.s2 << 2) ^ s.s2) >> 25;
    s.s2 = ((s.s2 & 0xFFFFFFF8u) << 4) ^ b;
    b = ((s.s3 << 3) ^ s.s3) >> 11;
    s.s3 = ((s.s3 & 0xFFFFFFF0u) << 17) ^ b;
    return s.s1 ^ s.s2 ^ s.s3;
}

double uniform01(RngState& s) {
    return taus_next(s) * 0x1p-32;
}

double exponential_from_u(double u, double rate) {
    if (!(rate > 0.0)) throw DomainError("exponential: rate must be > 0");
    if (!(u >= 0.0 && u < 1.0)) throw DomainError("exponential: u outside [0,1)");
    return -std::log(1.0 - u) / rate;
}

double exponential(RngState& s, double rate) {
    return exponential_from_u(uniform01(s), rate);
}

std::vector<RngState> random_spacing(RngState& master, std::size_t count) {
    std::vector<RngState> streams;
    streams.reserve(count);
    std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> seen;
    for (std::size_t i = 0; i < count; ++i) {
        RngState candidate;
        int attempts = 0;
        for (;;) {
            const std::uint32_t a = taus_next(master);
            const std::uint32_t b = taus_next(master);
            const std::uint32_t c = taus_next(master);
            candidate = make_rng_state(a, b, c);
            auto key = std::make_tuple(candidate.s1, candidate.s2, candidate.s3);
            if (seen.insert(key).second) break;
            if (++attempts >= 1000)
                throw Error("random_spacing: could not find a distinct stream seed");
        }
        streams.push_back(candidate);
    }
    return streams;
}

}  // namespace warpsim

#pragma once

#include <cstdint>
#include <random>

namespace beliefsim {

// SplitMix64 output finalizer (Steele, Lea & Flood). Bijective on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Random source used everywhere in the simulator ("bsim-rng/1").
//
// Engine: std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard <random> distributions are not portable, so the
// few distributions we need are implemented here with fixed algorithms:
//   uniform01  top 53 bits scaled by 2^-53, range [0, 1)
//   index      Lemire's multiply-shift with rejection, range [0, n)
//   normal     Box-Muller, cosine branch only (one engine pair per draw)
// Changing any of these is a change to every recorded trajectory; bump
// kRngVersion when doing so.
class Rng {
public:
    static constexpr int kRngVersion = 1;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform01();
    std::uint64_t index(std::uint64_t n);
    double normal();

private:
    std::mt19937_64 engine_;
};

// Independent substreams of one simulation seed. Each random decision in a
// step draws from a stream named by (purpose, time, agent), so results do not
// depend on the order in which agents are processed.
enum class StreamPurpose : std::uint64_t {
    Initialization = 1,
    Production = 2,
    Consumption = 3,
};

// seed' = mix64(mix64(mix64(seed ^ purpose * gamma) ^ time) ^ agent)
std::uint64_t substream_seed(std::uint64_t seed, StreamPurpose purpose, std::uint64_t time,
                             std::uint64_t agent) noexcept;

inline Rng substream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t time = 0,
                     std::uint64_t agent = 0) {
    return Rng(substream_seed(seed, purpose, time, agent));
}

}  // namespace beliefsim

#include "beliefsim/rng.hpp"

#include <cmath>
#include <numbers>

namespace beliefsim {

namespace {
__extension__ using u128 = unsigned __int128;
}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::index(std::uint64_t n) {
    if (n <= 1) return 0;
    // Lemire, "Fast Random Integer Generation in an Interval" (2019).
    u128 m = static_cast<u128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<u128>(engine_()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t substream_seed(std::uint64_t seed, StreamPurpose purpose, std::uint64_t time,
                             std::uint64_t agent) noexcept {
    std::uint64_t z = mix64(seed ^ (static_cast<std::uint64_t>(purpose) * kGoldenGamma));
    z = mix64(z ^ time);
    return mix64(z ^ agent);
}

}  // namespace beliefsim

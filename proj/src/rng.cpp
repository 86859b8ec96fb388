#include "scenopt/rng.hpp"

#include "scenopt/errors.hpp"

#include <cmath>
#include <numbers>

namespace scenopt::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline Counter round(const Counter& c, const Key& k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

constexpr double k2Pow53Inv = 1.0 / 9007199254740992.0;

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(bits >> 11) * k2Pow53Inv;
}

}  // namespace

Counter philox4x32_10(Counter ctr, Key key) {
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        ctr = round(ctr, key);
    }
    return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(StreamId id) : id_(id) {
    const std::uint64_t k = splitmix64(id.seed ^ splitmix64(id.replication + 0x632BE59BD9B4E019ull));
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

Counter CounterRng::block(std::uint32_t stage, std::uint64_t sample, std::uint32_t component) const {
    SCENOPT_REQUIRE(sample < (std::uint64_t{1} << 56), DomainError, "sample index exceeds counter width");
    const Counter ctr = {
        component,
        static_cast<std::uint32_t>(sample),
        stage,
        (static_cast<std::uint32_t>(id_.ns) << 24) | static_cast<std::uint32_t>(sample >> 32),
    };
    return philox4x32_10(ctr, key_);
}

double CounterRng::uniform(std::uint32_t stage, std::uint64_t sample, std::uint32_t component) const {
    const Counter b = block(stage, sample, component);
    return to_unit(b[0], b[1]);
}

double CounterRng::normal(std::uint32_t stage, std::uint64_t sample, std::uint32_t component) const {
    const Counter b = block(stage, sample, component);
    const double u1 = 1.0 - to_unit(b[0], b[1]);  // (0, 1]
    const double u2 = to_unit(b[2], b[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace scenopt::rng

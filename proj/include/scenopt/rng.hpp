#pragma once

#include <array>
#include <cstdint>

// Counter-based random streams. Every draw is a pure function of
// (seed, replication, namespace, stage, sample, component), so results do not
// depend on the order or the thread that evaluates them.
namespace scenopt::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds (Salmon et al., SC'11).
Counter philox4x32_10(Counter ctr, Key key);

std::uint64_t splitmix64(std::uint64_t x);

// Disjoint counter namespaces; validation draws can never coincide with
// training draws for the same seed.
enum class Namespace : std::uint8_t {
    training = 1,
    tie_break = 2,
    validation = 3,
    probe = 4,
    cuboid_multi = 5,
    cuboid_single = 6,
    auxiliary = 7,
};

struct StreamId {
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
    Namespace ns = Namespace::training;
};

class CounterRng {
public:
    explicit CounterRng(StreamId id);

    const StreamId& id() const { return id_; }

    // Raw 128-bit block for (stage, sample, component).
    Counter block(std::uint32_t stage, std::uint64_t sample, std::uint32_t component) const;

    // Uniform on [0, 1) with 53 random bits.
    double uniform(std::uint32_t stage, std::uint64_t sample, std::uint32_t component) const;

    // Standard normal via Box-Muller on one block.
    double normal(std::uint32_t stage, std::uint64_t sample, std::uint32_t component) const;

private:
    StreamId id_;
    Key key_;
};

}  // namespace scenopt::rng

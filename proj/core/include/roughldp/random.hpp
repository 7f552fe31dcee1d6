#pragma once

#include <cstdint>
#include <random>

namespace roughldp {

/// Independent random streams within one run.
///
/// Every path (or draw) owns its engine, seeded from (seed, stream, index)
/// through two rounds of the splitmix64 finalizer. Streams separate the
/// consumers of randomness inside a run (driving noise, starting law, ...),
/// so changing one consumer never shifts the numbers seen by another, and
/// any path can be regenerated on any thread in any order.
enum class Stream : std::uint64_t {
  DrivingNoise = 1,
  InitialLaw = 2,
  Bootstrap = 3,
};

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x);

[[nodiscard]] std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint64_t index);

}  // namespace roughldp

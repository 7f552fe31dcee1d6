#include "roughldp/random.hpp"

namespace roughldp {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint64_t index) {
  const std::uint64_t a = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)));
  return std::mt19937_64(splitmix64(a ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

}  // namespace roughldp

#include "skt/rng.hpp"

namespace skt {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng RngFactory::stream(Stream purpose, std::uint64_t level, std::uint64_t sweep,
                       std::uint64_t particle) const {
  std::uint64_t h = splitmix64(seed_);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  h = splitmix64(h ^ (level * 0xd1b54a32d192ed03ULL));
  h = splitmix64(h ^ (sweep * 0xaef17502108ef2d9ULL));
  h = splitmix64(h ^ (particle * 0xf58d9f6b3f7d3c1dULL));
  return Rng(h);
}

}  // namespace skt

#include "rpavg/rng.hpp"

namespace rpavg {

std::uint64_t index_hash(StreamTag tag, std::span<const long long> k) noexcept {
  std::uint64_t state = static_cast<std::uint64_t>(tag);
  std::uint64_t h = splitmix64(state);
  for (long long ki : k) {
    state ^= static_cast<std::uint64_t>(ki) + 0x632BE59BD9B4E019ull;
    h ^= splitmix64(state);
    h = h * 0x9E3779B97F4A7C15ull + (h >> 29);
  }
  return h;
}

}  // namespace rpavg

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace levyou {

using Engine = std::mt19937_64;

/// Where a bundle of random paths came from: the master seed plus the stream
/// prefix (empty for top-level runs; (outer path id) for nested estimates).
struct SeedRecord {
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> stream_prefix;
};

/// Engine for stream `index` under `record`. Streams are keyed by
/// (seed, prefix..., index) only, so results do not depend on how paths are
/// scheduled across workers.
Engine make_stream(const SeedRecord& record, std::uint64_t index);

}  // namespace levyou

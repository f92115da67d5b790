#include "levyou/rng.hpp"

namespace levyou {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

Engine make_stream(const SeedRecord& record, std::uint64_t index) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (record.stream_prefix.size() + 2));
  auto push = [&](std::uint64_t v) {
    v = splitmix64(v);
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(record.seed);
  for (auto id : record.stream_prefix) push(id);
  push(index);
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

}  // namespace levyou

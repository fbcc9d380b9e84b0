#include "ksos/random.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ksos {

namespace {

std::seed_seq make_seed_seq(std::uint64_t master_seed, RandomStream stream) {
  return std::seed_seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                       static_cast<std::uint32_t>(master_seed >> 32),
                       static_cast<std::uint32_t>(stream)};
}

}  // namespace

SeededRng::SeededRng(std::uint64_t master_seed, RandomStream stream) {
  auto seq = make_seed_seq(master_seed, stream);
  engine_.seed(seq);
}

double SeededRng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) {
    throw std::invalid_argument("SeededRng::below requires a positive bound");
  }
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = engine_();
  while (v >= limit) {
    v = engine_();
  }
  return v % bound;
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, SeededRng& rng) {
  if (k > n) {
    throw std::invalid_argument("cannot sample more indices than available");
  }
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace ksos

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ksos {

/// Fixed stream offsets; every random draw in an experiment is keyed by
/// (master seed, stream) so results never depend on execution order.
enum class RandomStream : std::uint32_t {
  kHalfSplit = 1,
  kSosSamples = 2,
  kTest = 99,
};

/// mt19937_64 seeded through std::seed_seq, with portable uniform draws
/// (the standard distributions are implementation-defined).
class SeededRng {
 public:
  SeededRng(std::uint64_t master_seed, RandomStream stream);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform integer on [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// k distinct indices out of [0, n), ascending.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, SeededRng& rng);

}  // namespace ksos

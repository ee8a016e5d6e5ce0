#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace synimp {

// Platform-stable randomness. std::mt19937_64 has a fully specified output
// sequence; the standard distributions do not, so bounded draws, shuffles and
// unit reals are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Uniform real in [0, 1) with 53 bits of precision.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Seed for stream `index` under `master`. Extending a run with more indices
// never changes the seeds of earlier ones.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Seed keyed by a string tag, e.g. a category name or strategy.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

}  // namespace synimp

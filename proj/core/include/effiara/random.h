#ifndef EFFIARA_RANDOM_H_
#define EFFIARA_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace effiara {

// Portable seeded generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the std:: distributions are not, so all
// draws go through the helpers below, which are exact and platform-independent.
//
// Stream discipline: independent streams are derived from a root seed and a
// list of integer tags (e.g. {kStreamAnnotation, annotator, sample}) with
// SplitMix64 mixing, so adding a consumer never shifts another's draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t root_seed, std::initializer_list<std::uint64_t> tags);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform01();
  // Uniform in [0, bound). bound must be > 0. Rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t bound);
  bool bernoulli(double p) { return uniform01() < p; }
  // Draws an index from an unnormalised non-negative weight vector.
  std::size_t categorical(std::span<const double> weights);

  // Fisher-Yates shuffle of the first `count` positions: afterwards
  // items[0..count) is a uniform sample without replacement.
  template <typename T>
  void partial_shuffle(std::vector<T>& items, std::size_t count) {
    for (std::size_t i = 0; i < count && i + 1 < items.size(); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(uniform_index(items.size() - i));
      std::swap(items[i], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace effiara

#endif  // EFFIARA_RANDOM_H_

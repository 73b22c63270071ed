#ifndef EFFIARA_FEATURES_H_
#define EFFIARA_FEATURES_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "effiara/types.h"

namespace effiara {

// Sparse feature vector of fixed dimension. Indices are sorted and unique;
// values are finite.
struct FeatureVector {
  std::size_t dimension = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  bool operator==(const FeatureVector&) const = default;
};

// Lower-cased whitespace tokens.
std::vector<std::string> tokenize(std::string_view text);

// 64-bit FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a64(std::string_view bytes);

// Hashed bag of unigrams and bigrams, L2-normalised.
class FeatureHasher {
 public:
  static constexpr std::size_t kDefaultDimension = std::size_t{1} << 14;

  explicit FeatureHasher(std::size_t dimension = kDefaultDimension);

  std::size_t dimension() const { return dimension_; }

  FeatureVector transform(std::string_view text) const;
  // claim_text and post_text joined by a space.
  FeatureVector transform(const Sample& sample) const;

 private:
  std::size_t dimension_;
};

}  // namespace effiara

#endif  // EFFIARA_FEATURES_H_

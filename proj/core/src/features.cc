#include "effiara/features.h"

#include <cctype>
#include <cmath>
#include <map>

#include "effiara/errors.h"

namespace effiara {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

FeatureHasher::FeatureHasher(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0 || dimension_ > (std::size_t{1} << 31)) {
    throw ValidationError("feature dimension must be in [1, 2^31]");
  }
}

FeatureVector FeatureHasher::transform(std::string_view text) const {
  const std::vector<std::string> tokens = tokenize(text);
  std::map<std::uint32_t, double> counts;
  const auto add = [&](std::string_view gram) {
    counts[static_cast<std::uint32_t>(fnv1a64(gram) % dimension_)] += 1.0;
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    add(tokens[i]);
    // "\x1f" cannot occur inside a whitespace token.
    if (i + 1 < tokens.size()) add(tokens[i] + "\x1f" + tokens[i + 1]);
  }
  FeatureVector out;
  out.dimension = dimension_;
  double norm = 0.0;
  for (const auto& [index, count] : counts) norm += count * count;
  norm = std::sqrt(norm);
  for (const auto& [index, count] : counts) {
    out.indices.push_back(index);
    out.values.push_back(count / norm);
  }
  return out;
}

FeatureVector FeatureHasher::transform(const Sample& sample) const {
  return transform(sample.claim_text + " " + sample.post_text);
}

}  // namespace effiara

#include "effiara/agreement.h"

#include <algorithm>
#include <string>

#include "effiara/errors.h"

namespace effiara {

double krippendorff_alpha_nominal(std::span<const LabelPair> pairs) {
  if (pairs.empty()) {
    throw ValidationError("krippendorff_alpha_nominal: no paired labels");
  }
  LabelIndex num_values = 0;
  for (const auto& [a, b] : pairs) num_values = std::max({num_values, a + 1, b + 1});

  // Only the marginals and the off-diagonal total are needed.
  std::vector<double> marginal(num_values, 0.0);
  double disagreeing = 0.0;  // sum_{c != k} o_ck
  for (const auto& [a, b] : pairs) {
    marginal[a] += 1.0;
    marginal[b] += 1.0;
    if (a != b) disagreeing += 2.0;
  }
  const double n = 2.0 * static_cast<double>(pairs.size());
  double sum_sq = 0.0;
  for (const double m : marginal) sum_sq += m * m;
  const double expected_pairs = n * n - sum_sq;  // sum_{c != k} n_c n_k

  if (expected_pairs == 0.0) return 1.0;
  const double observed = disagreeing / n;
  const double expected = expected_pairs / (n * (n - 1.0));
  return 1.0 - observed / expected;
}

std::vector<LabelPair> paired_labels(const AnnotationStore& store,
                                     std::string_view annotator_x,
                                     std::string_view annotator_y) {
  for (const auto id : {annotator_x, annotator_y}) {
    if (!store.has_annotator(id)) {
      throw ValidationError("unknown annotator '" + std::string(id) + "'");
    }
  }
  const bool intra = annotator_x == annotator_y;
  const Phase second_phase = intra ? Phase::kReannotation : Phase::kFirst;

  std::vector<LabelPair> pairs;
  for (const std::string& sample : store.sample_ids()) {
    const Annotation* x = store.find(sample, annotator_x, Phase::kFirst);
    if (x == nullptr) continue;
    const Annotation* y = store.find(sample, annotator_y, second_phase);
    if (y == nullptr) continue;
    pairs.emplace_back(x->primary, y->primary);
  }
  return pairs;
}

double pairwise_agreement(const AnnotationStore& store, std::string_view annotator_x,
                          std::string_view annotator_y) {
  const std::vector<LabelPair> pairs = paired_labels(store, annotator_x, annotator_y);
  if (pairs.empty()) {
    throw ValidationError(
        annotator_x == annotator_y
            ? "annotator '" + std::string(annotator_x) + "' has no re-annotations"
            : "annotators '" + std::string(annotator_x) + "' and '" +
                  std::string(annotator_y) + "' share no samples");
  }
  return krippendorff_alpha_nominal(pairs);
}

}  // namespace effiara

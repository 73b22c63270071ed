#ifndef EFFIARA_AGREEMENT_H_
#define EFFIARA_AGREEMENT_H_

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "effiara/types.h"

namespace effiara {

// Labels given by two raters to the same unit (sample).
using LabelPair = std::pair<LabelIndex, LabelIndex>;

// Krippendorff's alpha for nominal data with two raters and no missing
// values, via the coincidence matrix: each unit adds its two values to the
// matrix in both orders, D_o is the off-diagonal mass over n = 2 * units and
// D_e = sum_{c != k} n_c n_k / (n (n - 1)). alpha = 1 - D_o / D_e.
//
// When every value in the input is the same label, D_e = 0; this returns 1.0
// (there is no disagreement at all) instead of NaN.
//
// Throws ValidationError on empty input.
double krippendorff_alpha_nominal(std::span<const LabelPair> pairs);

// Primary labels on the samples both annotators labelled. For x != y these
// are the first-phase annotations; for x == y, the first-phase label is paired
// with the same annotator's re-annotation. Ordered by sample first appearance.
std::vector<LabelPair> paired_labels(const AnnotationStore& store,
                                     std::string_view annotator_x,
                                     std::string_view annotator_y);

// alpha over paired_labels(). Throws ValidationError for unknown annotators or
// when the pair shares no samples.
double pairwise_agreement(const AnnotationStore& store, std::string_view annotator_x,
                          std::string_view annotator_y);

}  // namespace effiara

#endif  // EFFIARA_AGREEMENT_H_

#ifndef EFFIARA_LABELING_H_
#define EFFIARA_LABELING_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effiara/types.h"

namespace effiara {

// Probability vector over a LabelSet. Construction checks every entry is in
// [0, 1] and the sum is 1 within 1e-9.
class SoftLabel {
 public:
  explicit SoftLabel(std::vector<double> probs);

  static SoftLabel one_hot(std::size_t num_classes, LabelIndex index);

  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](LabelIndex i) const { return probs_[i]; }

  bool operator==(const SoftLabel&) const = default;

 private:
  std::vector<double> probs_;
};

struct LabeledSample {
  std::string sample_id;
  SoftLabel soft_label;
  LabelIndex hard_label;
  std::vector<std::string> annotators;  // one or two, first-phase
  double weight = 1.0;                  // set by the trainer
  bool gold = false;
};

// Maps a confidence score C in [1, MaxC] onto the probability of the primary
// label: P = 1/n + (n-1)/n * (C-1)/(MaxC-1), so P(1) = 1/n and P(MaxC) = 1.
double confidence_to_probability(int confidence, std::size_t num_classes,
                                 int max_confidence);

// Primary label gets P. Binary: the other label gets 1 - P. Otherwise a
// secondary label gets min(P, 1 - P) and the rest is spread evenly over the
// remaining labels; without a secondary label all of 1 - P is spread evenly
// over the non-primary labels.
SoftLabel annotation_to_soft_label(const Annotation& annotation,
                                   const LabelSet& label_set, int max_confidence);

struct WeightedSoftLabel {
  SoftLabel label;
  double reliability;
};

// sum R_i p_i / sum R_i. Throws ValidationError on an empty input, a
// non-positive reliability or mismatched lengths.
SoftLabel aggregate_soft_labels(std::span<const WeightedSoftLabel> labels);

// argmax; ties go to the lowest index.
LabelIndex soft_to_hard(const SoftLabel& label);

// A total many-to-one mapping from one label set onto a smaller one. The new
// set lists the targets in the order they are first reached walking the old
// labels, so {debunk -> other} over misinfo,debunk,other yields misinfo,other.
class LabelMerge {
 public:
  // `mapping` must name every old label. Targets may be new names.
  LabelMerge(const LabelSet& from, const std::map<std::string, std::string>& mapping);

  // Fills unspecified labels with the identity mapping, then builds the merge.
  static LabelMerge with_identity(const LabelSet& from,
                                  const std::map<std::string, std::string>& partial);

  const LabelSet& from() const { return from_; }
  const LabelSet& to() const { return to_; }
  LabelIndex map(LabelIndex old_index) const { return target_.at(old_index); }

  SoftLabel apply(const SoftLabel& label) const;
  // Secondary label is dropped when it lands on the primary's class.
  Annotation apply(const Annotation& annotation) const;
  LabeledSample apply(const LabeledSample& sample) const;
  AnnotationStore apply(const AnnotationStore& store) const;

 private:
  LabelSet from_;
  LabelSet to_;
  std::vector<LabelIndex> target_;
};

// "debunk=other,foo=bar" -> {debunk: other, foo: bar}.
std::map<std::string, std::string> parse_merge_spec(std::string_view spec);

// True when both first-phase annotations of a double-annotated sample share
// the primary label and have confidence >= 3.
bool is_gold(std::span<const Annotation* const> first_phase);
inline constexpr int kGoldMinConfidence = 3;

// Double-annotated samples that pass is_gold(). The hard label is the shared
// primary, the soft label the equal-weight mean of the two annotations.
std::vector<LabeledSample> extract_gold_set(const AnnotationStore& store);

// One LabeledSample per sample with first-phase annotations, in store order.
// Double annotations are aggregated with the annotators' reliabilities; an
// empty map means every reliability is 1.0. Re-annotations are not used.
std::vector<LabeledSample> build_labeled_samples(
    const AnnotationStore& store, const std::map<std::string, double>& reliabilities);

// One JSON object per line: sample_id, soft_label, hard_label, annotators, gold.
std::string labeled_to_jsonl(std::span<const LabeledSample> samples,
                             const LabelSet& label_set);
std::vector<LabeledSample> labeled_from_jsonl(std::string_view text,
                                              const LabelSet& label_set);

}  // namespace effiara

#endif  // EFFIARA_LABELING_H_

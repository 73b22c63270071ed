#ifndef EFFIARA_TYPES_H_
#define EFFIARA_TYPES_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace effiara {

// Position of a label inside a LabelSet. Soft labels, confusion matrices and
// model outputs are all indexed by it.
using LabelIndex = std::size_t;

// Ordered set of class names. Index i of every probability vector refers to
// labels()[i] for the lifetime of a run. Names are case-sensitive.
class LabelSet {
 public:
  explicit LabelSet(std::vector<std::string> labels);

  // "misinfo,debunk,other" -> LabelSet. Surrounding whitespace is trimmed.
  static LabelSet parse(std::string_view comma_separated);

  std::size_t size() const { return labels_.size(); }
  const std::string& name(LabelIndex index) const { return labels_.at(index); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<LabelIndex> find(std::string_view name) const;
  // Throws ValidationError for unknown names.
  LabelIndex index_of(std::string_view name) const;

  std::string to_string() const;

  bool operator==(const LabelSet&) const = default;

 private:
  std::vector<std::string> labels_;
};

enum class Phase { kFirst, kReannotation };

// CSV spelling: "first" / "re".
std::string_view phase_name(Phase phase);
std::optional<Phase> parse_phase(std::string_view text);

// One annotator's judgment of one sample.
struct Annotation {
  std::string sample_id;
  std::string annotator_id;
  Phase phase = Phase::kFirst;
  LabelIndex primary = 0;
  int confidence = 1;
  std::optional<LabelIndex> secondary;

  bool operator==(const Annotation&) const = default;
};

// A claim/post pair. Texts are only needed by the trainer.
struct Sample {
  std::string sample_id;
  std::string claim_text;
  std::string post_text;

  bool operator==(const Sample&) const = default;
};

// Inputs of the campaign budget: n annotators with t hours each at rho
// annotations per hour; d of the unique samples are double-annotated and r of
// each single-annotation project is re-annotated.
struct CampaignParams {
  int num_annotators = 6;
  double time_per_annotator = 10.0;
  double annotation_rate = 60.0;
  double double_prop = 1.0 / 3.0;
  double reanno_prop = 0.5;
  int max_confidence = 5;

  // Throws ValidationError. The ring construction needs at least five
  // annotators so that every node has four distinct partners.
  void validate() const;

  bool operator==(const CampaignParams&) const = default;
};

// Validated, immutable collection of annotations with an index on
// (sample_id, annotator_id, phase).
//
// Construction enforces:
//  - labels and confidences are within the label set / [1, max_confidence];
//  - secondary != primary;
//  - at most one annotation per (sample, annotator, phase);
//  - a re-annotation has a first-phase annotation by the same annotator;
//  - a re-annotated sample is not also annotated by a second annotator.
class AnnotationStore {
 public:
  AnnotationStore(LabelSet label_set, int max_confidence,
                  std::vector<Annotation> annotations);

  const LabelSet& label_set() const { return label_set_; }
  int max_confidence() const { return max_confidence_; }
  std::span<const Annotation> annotations() const { return annotations_; }
  std::size_t size() const { return annotations_.size(); }

  const Annotation* find(std::string_view sample_id,
                         std::string_view annotator_id, Phase phase) const;

  // Sorted, distinct.
  const std::vector<std::string>& annotator_ids() const { return annotators_; }
  bool has_annotator(std::string_view annotator_id) const;

  // Distinct sample ids in order of first appearance.
  const std::vector<std::string>& sample_ids() const { return samples_; }

  // First-phase annotations of one sample, in file order.
  std::vector<const Annotation*> first_phase(std::string_view sample_id) const;

  bool operator==(const AnnotationStore& other) const;

 private:
  using Key = std::tuple<std::string, std::string, Phase>;

  LabelSet label_set_;
  int max_confidence_;
  std::vector<Annotation> annotations_;
  std::map<Key, std::size_t, std::less<>> index_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> first_by_sample_;
  std::vector<std::string> annotators_;
  std::vector<std::string> samples_;
};

}  // namespace effiara

#endif  // EFFIARA_TYPES_H_

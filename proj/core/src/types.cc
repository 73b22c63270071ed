#include "effiara/types.h"

#include <algorithm>
#include <set>

#include "effiara/errors.h"

namespace effiara {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

LabelSet::LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2) {
    throw ValidationError("label set needs at least 2 labels, got " +
                          std::to_string(labels_.size()));
  }
  std::set<std::string_view> seen;
  for (const auto& label : labels_) {
    if (label.empty()) throw ValidationError("label set contains an empty label");
    if (!seen.insert(label).second) {
      throw ValidationError("duplicate label '" + label + "' in label set");
    }
  }
}

LabelSet LabelSet::parse(std::string_view comma_separated) {
  std::vector<std::string> labels;
  while (true) {
    const auto comma = comma_separated.find(',');
    labels.emplace_back(trim(comma_separated.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    comma_separated.remove_prefix(comma + 1);
  }
  return LabelSet(std::move(labels));
}

std::optional<LabelIndex> LabelSet::find(std::string_view name) const {
  const auto it = std::find(labels_.begin(), labels_.end(), name);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<LabelIndex>(it - labels_.begin());
}

LabelIndex LabelSet::index_of(std::string_view name) const {
  if (const auto index = find(name)) return *index;
  throw ValidationError("unknown label '" + std::string(name) + "'");
}

std::string LabelSet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (i > 0) out += ',';
    out += labels_[i];
  }
  return out;
}

std::string_view phase_name(Phase phase) {
  return phase == Phase::kFirst ? "first" : "re";
}

std::optional<Phase> parse_phase(std::string_view text) {
  if (text == "first") return Phase::kFirst;
  if (text == "re") return Phase::kReannotation;
  return std::nullopt;
}

void CampaignParams::validate() const {
  if (num_annotators < 5) {
    throw ValidationError("num_annotators must be >= 5 (got " +
                          std::to_string(num_annotators) + ")");
  }
  if (!(time_per_annotator > 0.0)) {
    throw ValidationError("time_per_annotator must be > 0");
  }
  if (!(annotation_rate > 0.0)) {
    throw ValidationError("annotation_rate must be > 0");
  }
  if (!(double_prop >= 0.0 && double_prop <= 1.0)) {
    throw ValidationError("double_prop must lie in [0, 1]");
  }
  if (!(reanno_prop >= 0.0 && reanno_prop <= 1.0)) {
    throw ValidationError("reanno_prop must lie in [0, 1]");
  }
  if (max_confidence < 2) {
    throw ValidationError("max_confidence must be >= 2");
  }
}

AnnotationStore::AnnotationStore(LabelSet label_set, int max_confidence,
                                 std::vector<Annotation> annotations)
    : label_set_(std::move(label_set)),
      max_confidence_(max_confidence),
      annotations_(std::move(annotations)) {
  if (max_confidence_ < 2) {
    throw ValidationError("max_confidence must be >= 2");
  }
  std::set<std::string, std::less<>> annotators;
  std::set<std::string, std::less<>> samples;
  for (std::size_t i = 0; i < annotations_.size(); ++i) {
    const Annotation& a = annotations_[i];
    const std::string where = "annotation " + std::to_string(i) + " (sample '" +
                              a.sample_id + "', annotator '" + a.annotator_id + "')";
    if (a.sample_id.empty() || a.annotator_id.empty()) {
      throw ValidationError(where + ": empty sample_id or annotator_id");
    }
    if (a.primary >= label_set_.size()) {
      throw ValidationError(where + ": primary label index out of range");
    }
    if (a.confidence < 1 || a.confidence > max_confidence_) {
      throw ValidationError(where + ": confidence " + std::to_string(a.confidence) +
                            " outside [1, " + std::to_string(max_confidence_) + "]");
    }
    if (a.secondary) {
      if (*a.secondary >= label_set_.size()) {
        throw ValidationError(where + ": secondary label index out of range");
      }
      if (*a.secondary == a.primary) {
        throw ValidationError(where + ": secondary label equals primary label");
      }
    }
    if (!index_.emplace(Key{a.sample_id, a.annotator_id, a.phase}, i).second) {
      throw ValidationError(where + ": duplicate (sample, annotator, phase '" +
                            std::string(phase_name(a.phase)) + "')");
    }
    if (a.phase == Phase::kFirst) {
      first_by_sample_[a.sample_id].push_back(i);
    }
    annotators.insert(a.annotator_id);
    if (samples.insert(a.sample_id).second) samples_.push_back(a.sample_id);
  }
  annotators_.assign(annotators.begin(), annotators.end());

  for (const Annotation& a : annotations_) {
    if (a.phase != Phase::kReannotation) continue;
    if (find(a.sample_id, a.annotator_id, Phase::kFirst) == nullptr) {
      throw ValidationError("re-annotation of sample '" + a.sample_id +
                            "' by '" + a.annotator_id +
                            "' has no first-phase annotation by the same annotator");
    }
    const auto it = first_by_sample_.find(a.sample_id);
    if (it->second.size() > 1) {
      throw ValidationError("sample '" + a.sample_id +
                            "' is both re-annotated and double-annotated");
    }
  }
}

const Annotation* AnnotationStore::find(std::string_view sample_id,
                                        std::string_view annotator_id,
                                        Phase phase) const {
  const auto it =
      index_.find(Key{std::string(sample_id), std::string(annotator_id), phase});
  return it == index_.end() ? nullptr : &annotations_[it->second];
}

bool AnnotationStore::has_annotator(std::string_view annotator_id) const {
  return std::binary_search(annotators_.begin(), annotators_.end(), annotator_id);
}

std::vector<const Annotation*> AnnotationStore::first_phase(
    std::string_view sample_id) const {
  std::vector<const Annotation*> out;
  const auto it = first_by_sample_.find(sample_id);
  if (it == first_by_sample_.end()) return out;
  out.reserve(it->second.size());
  for (const std::size_t i : it->second) out.push_back(&annotations_[i]);
  return out;
}

bool AnnotationStore::operator==(const AnnotationStore& other) const {
  return label_set_ == other.label_set_ &&
         max_confidence_ == other.max_confidence_ &&
         annotations_ == other.annotations_;
}

}  // namespace effiara

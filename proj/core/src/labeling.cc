#include "effiara/labeling.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "effiara/errors.h"
#include "json.hpp"

namespace effiara {

namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kEntrySlack = 1e-12;

}  // namespace

SoftLabel::SoftLabel(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ValidationError("soft label is empty");
  double sum = 0.0;
  for (double& p : probs_) {
    if (!std::isfinite(p) || p < -kEntrySlack || p > 1.0 + kEntrySlack) {
      throw ValidationError("soft label entry " + std::to_string(p) +
                            " outside [0, 1]");
    }
    p = std::clamp(p, 0.0, 1.0);
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw ValidationError("soft label sums to " + std::to_string(sum) + ", not 1");
  }
}

SoftLabel SoftLabel::one_hot(std::size_t num_classes, LabelIndex index) {
  if (index >= num_classes) throw ValidationError("one_hot index out of range");
  std::vector<double> probs(num_classes, 0.0);
  probs[index] = 1.0;
  return SoftLabel(std::move(probs));
}

double confidence_to_probability(int confidence, std::size_t num_classes,
                                 int max_confidence) {
  if (num_classes < 2) throw ValidationError("need at least 2 classes");
  if (max_confidence < 2) throw ValidationError("max_confidence must be >= 2");
  if (confidence < 1 || confidence > max_confidence) {
    throw ValidationError("confidence " + std::to_string(confidence) + " outside [1, " +
                          std::to_string(max_confidence) + "]");
  }
  const double n = static_cast<double>(num_classes);
  return 1.0 / n + (n - 1.0) / n * static_cast<double>(confidence - 1) /
                       static_cast<double>(max_confidence - 1);
}

SoftLabel annotation_to_soft_label(const Annotation& annotation,
                                   const LabelSet& label_set, int max_confidence) {
  const std::size_t n = label_set.size();
  if (annotation.primary >= n) throw ValidationError("primary label out of range");
  const double p = confidence_to_probability(annotation.confidence, n, max_confidence);

  std::vector<double> probs(n, 0.0);
  probs[annotation.primary] = p;
  if (n == 2) {
    probs[1 - annotation.primary] = 1.0 - p;
    return SoftLabel(std::move(probs));
  }

  double rest = 1.0 - p;
  std::size_t sharing = n - 1;
  if (annotation.secondary) {
    if (*annotation.secondary >= n || *annotation.secondary == annotation.primary) {
      throw ValidationError("invalid secondary label");
    }
    const double secondary = std::min(p, 1.0 - p);
    probs[*annotation.secondary] = secondary;
    rest -= secondary;
    sharing = n - 2;
  }
  const double share = std::max(rest, 0.0) / static_cast<double>(sharing);
  for (LabelIndex i = 0; i < n; ++i) {
    if (i == annotation.primary || (annotation.secondary && i == *annotation.secondary)) {
      continue;
    }
    probs[i] = share;
  }
  return SoftLabel(std::move(probs));
}

SoftLabel aggregate_soft_labels(std::span<const WeightedSoftLabel> labels) {
  if (labels.empty()) throw ValidationError("nothing to aggregate");
  if (labels.size() == 1) {
    if (!(labels[0].reliability > 0.0)) {
      throw ValidationError("reliability must be positive");
    }
    return labels[0].label;
  }
  const std::size_t n = labels[0].label.size();
  std::vector<double> sum(n, 0.0);
  double total_weight = 0.0;
  for (const auto& [label, reliability] : labels) {
    if (label.size() != n) throw ValidationError("soft labels differ in length");
    if (!(reliability > 0.0)) throw ValidationError("reliability must be positive");
    for (std::size_t i = 0; i < n; ++i) sum[i] += reliability * label[i];
    total_weight += reliability;
  }
  if (!(total_weight > 0.0)) throw ValidationError("zero total reliability");
  const double mass = std::accumulate(sum.begin(), sum.end(), 0.0);
  for (double& v : sum) v /= mass;
  return SoftLabel(std::move(sum));
}

LabelIndex soft_to_hard(const SoftLabel& label) {
  const auto probs = label.probs();
  return static_cast<LabelIndex>(std::max_element(probs.begin(), probs.end()) -
                                 probs.begin());
}

LabelMerge::LabelMerge(const LabelSet& from,
                       const std::map<std::string, std::string>& mapping)
    : from_(from), to_(from) {
  for (const auto& [source, target] : mapping) {
    if (!from.find(source)) {
      throw ValidationError("merge maps unknown label '" + source + "'");
    }
  }
  std::vector<std::string> targets;
  for (const std::string& label : from.labels()) {
    const auto it = mapping.find(label);
    if (it == mapping.end()) {
      throw ValidationError("merge mapping does not cover label '" + label + "'");
    }
    if (std::find(targets.begin(), targets.end(), it->second) == targets.end()) {
      targets.push_back(it->second);
    }
  }
  to_ = LabelSet(targets);
  for (const std::string& label : from.labels()) {
    target_.push_back(to_.index_of(mapping.at(label)));
  }
}

LabelMerge LabelMerge::with_identity(const LabelSet& from,
                                     const std::map<std::string, std::string>& partial) {
  std::map<std::string, std::string> mapping = partial;
  for (const std::string& label : from.labels()) mapping.emplace(label, label);
  return LabelMerge(from, mapping);
}

SoftLabel LabelMerge::apply(const SoftLabel& label) const {
  if (label.size() != from_.size()) {
    throw ValidationError("soft label length does not match merge source");
  }
  std::vector<double> probs(to_.size(), 0.0);
  for (LabelIndex i = 0; i < label.size(); ++i) probs[target_[i]] += label[i];
  return SoftLabel(std::move(probs));
}

Annotation LabelMerge::apply(const Annotation& annotation) const {
  Annotation out = annotation;
  out.primary = map(annotation.primary);
  if (annotation.secondary) {
    const LabelIndex secondary = map(*annotation.secondary);
    if (secondary == out.primary) {
      out.secondary.reset();
    } else {
      out.secondary = secondary;
    }
  }
  return out;
}

LabeledSample LabelMerge::apply(const LabeledSample& sample) const {
  LabeledSample out = sample;
  out.soft_label = apply(sample.soft_label);
  out.hard_label = map(sample.hard_label);
  return out;
}

AnnotationStore LabelMerge::apply(const AnnotationStore& store) const {
  if (!(store.label_set() == from_)) {
    throw ValidationError("store label set does not match merge source");
  }
  std::vector<Annotation> remapped;
  remapped.reserve(store.size());
  for (const Annotation& a : store.annotations()) remapped.push_back(apply(a));
  return AnnotationStore(to_, store.max_confidence(), std::move(remapped));
}

std::map<std::string, std::string> parse_merge_spec(std::string_view spec) {
  std::map<std::string, std::string> out;
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    const std::string_view item = spec.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size()) {
      throw ValidationError("merge entry '" + std::string(item) +
                            "' is not of the form from=to");
    }
    const std::string source(item.substr(0, eq));
    if (!out.emplace(source, std::string(item.substr(eq + 1))).second) {
      throw ValidationError("label '" + source + "' merged twice");
    }
    if (comma == std::string_view::npos) break;
    spec.remove_prefix(comma + 1);
  }
  return out;
}

bool is_gold(std::span<const Annotation* const> first_phase) {
  if (first_phase.size() != 2) return false;
  const Annotation& a = *first_phase[0];
  const Annotation& b = *first_phase[1];
  return a.primary == b.primary && a.confidence >= kGoldMinConfidence &&
         b.confidence >= kGoldMinConfidence;
}

std::vector<LabeledSample> extract_gold_set(const AnnotationStore& store) {
  std::vector<LabeledSample> gold;
  for (const std::string& sample : store.sample_ids()) {
    const auto firsts = store.first_phase(sample);
    if (!is_gold(firsts)) continue;
    const WeightedSoftLabel parts[] = {
        {annotation_to_soft_label(*firsts[0], store.label_set(), store.max_confidence()),
         1.0},
        {annotation_to_soft_label(*firsts[1], store.label_set(), store.max_confidence()),
         1.0}};
    gold.push_back(LabeledSample{sample, aggregate_soft_labels(parts), firsts[0]->primary,
                                 {firsts[0]->annotator_id, firsts[1]->annotator_id},
                                 1.0, true});
  }
  return gold;
}

std::vector<LabeledSample> build_labeled_samples(
    const AnnotationStore& store, const std::map<std::string, double>& reliabilities) {
  std::vector<LabeledSample> out;
  for (const std::string& sample : store.sample_ids()) {
    const auto firsts = store.first_phase(sample);
    if (firsts.empty()) continue;
    std::vector<WeightedSoftLabel> parts;
    std::vector<std::string> annotators;
    for (const Annotation* a : firsts) {
      double reliability = 1.0;
      if (!reliabilities.empty()) {
        const auto it = reliabilities.find(a->annotator_id);
        if (it == reliabilities.end()) {
          throw ValidationError("no reliability for annotator '" + a->annotator_id + "'");
        }
        reliability = it->second;
      }
      parts.push_back({annotation_to_soft_label(*a, store.label_set(),
                                                store.max_confidence()),
                       reliability});
      annotators.push_back(a->annotator_id);
    }
    SoftLabel soft = aggregate_soft_labels(parts);
    const LabelIndex hard = soft_to_hard(soft);
    out.push_back(LabeledSample{sample, std::move(soft), hard, std::move(annotators), 1.0,
                                is_gold(firsts)});
  }
  return out;
}

std::string labeled_to_jsonl(std::span<const LabeledSample> samples,
                             const LabelSet& label_set) {
  std::string out;
  for (const LabeledSample& s : samples) {
    nlohmann::ordered_json line;
    line["sample_id"] = s.sample_id;
    line["soft_label"] = std::vector<double>(s.soft_label.probs().begin(),
                                             s.soft_label.probs().end());
    line["hard_label"] = label_set.name(s.hard_label);
    line["annotators"] = s.annotators;
    line["gold"] = s.gold;
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::vector<LabeledSample> labeled_from_jsonl(std::string_view text,
                                              const LabelSet& label_set) {
  std::vector<LabeledSample> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text.remove_prefix(newline == std::string_view::npos ? text.size() : newline + 1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      auto probs = obj.at("soft_label").get<std::vector<double>>();
      if (probs.size() != label_set.size()) {
        throw ValidationError("soft_label has " + std::to_string(probs.size()) +
                              " entries, label set has " +
                              std::to_string(label_set.size()));
      }
      out.push_back(LabeledSample{obj.at("sample_id").get<std::string>(),
                                  SoftLabel(std::move(probs)),
                                  label_set.index_of(obj.at("hard_label").get<std::string>()),
                                  obj.at("annotators").get<std::vector<std::string>>(),
                                  1.0, obj.value("gold", false)});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

}  // namespace effiara

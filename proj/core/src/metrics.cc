#include "effiara/metrics.h"

#include <algorithm>
#include <cmath>

#include "effiara/errors.h"
#include "json.hpp"

namespace effiara {

namespace {

void check_lengths(std::size_t predicted, std::size_t gold) {
  if (predicted != gold) {
    throw ValidationError("predictions (" + std::to_string(predicted) +
                          ") and gold labels (" + std::to_string(gold) +
                          ") differ in length");
  }
  if (gold == 0) throw ValidationError("no predictions to evaluate");
}

LabelIndex argmax(const std::vector<double>& probs) {
  return static_cast<LabelIndex>(std::max_element(probs.begin(), probs.end()) -
                                 probs.begin());
}

}  // namespace

ConfusionMatrix confusion_matrix(std::span<const LabelIndex> predicted,
                                 std::span<const LabelIndex> gold,
                                 std::size_t num_classes) {
  check_lengths(predicted.size(), gold.size());
  ConfusionMatrix matrix(num_classes, std::vector<long>(num_classes, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] >= num_classes || predicted[i] >= num_classes) {
      throw ValidationError("label index out of range");
    }
    ++matrix[gold[i]][predicted[i]];
  }
  return matrix;
}

std::vector<std::optional<double>> per_class_f1(std::span<const LabelIndex> predicted,
                                                std::span<const LabelIndex> gold,
                                                std::size_t num_classes) {
  const ConfusionMatrix m = confusion_matrix(predicted, gold, num_classes);
  std::vector<std::optional<double>> f1(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    long gold_count = 0;
    long predicted_count = 0;
    for (std::size_t k = 0; k < num_classes; ++k) {
      gold_count += m[c][k];
      predicted_count += m[k][c];
    }
    if (gold_count == 0 && predicted_count == 0) continue;
    const long tp = m[c][c];
    // 2 tp / (2 tp + fp + fn); the denominator is positive here.
    f1[c] = 2.0 * tp / static_cast<double>(gold_count + predicted_count);
  }
  return f1;
}

double macro_f1(std::span<const LabelIndex> predicted, std::span<const LabelIndex> gold,
                std::size_t num_classes) {
  const auto f1 = per_class_f1(predicted, gold, num_classes);
  double sum = 0.0;
  int present = 0;
  for (const auto& value : f1) {
    if (!value) continue;
    sum += *value;
    ++present;
  }
  return sum / present;
}

double expected_calibration_error(std::span<const std::vector<double>> probabilities,
                                  std::span<const LabelIndex> gold, int num_bins) {
  check_lengths(probabilities.size(), gold.size());
  if (num_bins < 1) throw ValidationError("num_bins must be >= 1");
  std::vector<double> confidence_sum(num_bins, 0.0);
  std::vector<double> correct(num_bins, 0.0);
  std::vector<long> count(num_bins, 0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& probs = probabilities[i];
    if (probs.empty()) throw ValidationError("empty probability vector");
    const LabelIndex predicted = argmax(probs);
    const double confidence = probs[predicted];
    const int bin =
        std::clamp(static_cast<int>(std::floor(confidence * num_bins)), 0, num_bins - 1);
    confidence_sum[bin] += confidence;
    correct[bin] += predicted == gold[i] ? 1.0 : 0.0;
    ++count[bin];
  }
  const double total = static_cast<double>(gold.size());
  double ece = 0.0;
  for (int b = 0; b < num_bins; ++b) {
    if (count[b] == 0) continue;
    const double n = static_cast<double>(count[b]);
    ece += n / total * std::abs(correct[b] / n - confidence_sum[b] / n);
  }
  return ece;
}

EvalReport evaluate(std::span<const std::vector<double>> probabilities,
                    std::span<const LabelIndex> gold, std::size_t num_classes,
                    int num_bins) {
  check_lengths(probabilities.size(), gold.size());
  std::vector<LabelIndex> predicted;
  predicted.reserve(probabilities.size());
  for (const auto& probs : probabilities) predicted.push_back(argmax(probs));

  EvalReport report;
  report.macro_f1 = macro_f1(predicted, gold, num_classes);
  report.ece = expected_calibration_error(probabilities, gold, num_bins);
  report.per_class_f1 = per_class_f1(predicted, gold, num_classes);
  report.confusion = confusion_matrix(predicted, gold, num_classes);
  report.n_test = gold.size();
  return report;
}

std::string eval_report_json(const EvalReport& report, const LabelSet& label_set) {
  nlohmann::ordered_json out;
  out["macro_f1"] = report.macro_f1;
  out["ece"] = report.ece;
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < report.per_class_f1.size(); ++c) {
    if (report.per_class_f1[c]) per_class[label_set.name(c)] = *report.per_class_f1[c];
  }
  out["per_class_f1"] = std::move(per_class);
  out["labels"] = label_set.labels();
  out["confusion"] = report.confusion;
  out["n_test"] = report.n_test;
  return out.dump(2) + "\n";
}

}  // namespace effiara

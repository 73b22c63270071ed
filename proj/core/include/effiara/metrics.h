#ifndef EFFIARA_METRICS_H_
#define EFFIARA_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "effiara/types.h"

namespace effiara {

// confusion[gold][predicted]
using ConfusionMatrix = std::vector<std::vector<long>>;

ConfusionMatrix confusion_matrix(std::span<const LabelIndex> predicted,
                                 std::span<const LabelIndex> gold,
                                 std::size_t num_classes);

// F1 per class; nullopt for classes that occur in neither gold nor
// predictions. A class with tp = 0 scores 0.
std::vector<std::optional<double>> per_class_f1(std::span<const LabelIndex> predicted,
                                                std::span<const LabelIndex> gold,
                                                std::size_t num_classes);

// Unweighted mean of per_class_f1 over the classes that occur. Throws
// ValidationError on length mismatch or empty input.
double macro_f1(std::span<const LabelIndex> predicted, std::span<const LabelIndex> gold,
                std::size_t num_classes);

// Top-label ECE: the max probability of each prediction goes into one of
// `num_bins` equal-width bins over [0, 1] (1.0 lands in the last bin), and
// ECE = sum_b |B_b| / N * |accuracy(B_b) - mean confidence(B_b)|. The
// predicted label is the argmax with ties to the lowest index.
double expected_calibration_error(std::span<const std::vector<double>> probabilities,
                                  std::span<const LabelIndex> gold, int num_bins = 10);

struct EvalReport {
  double macro_f1 = 0.0;
  double ece = 0.0;
  std::vector<std::optional<double>> per_class_f1;
  ConfusionMatrix confusion;
  std::size_t n_test = 0;
};

EvalReport evaluate(std::span<const std::vector<double>> probabilities,
                    std::span<const LabelIndex> gold, std::size_t num_classes,
                    int num_bins = 10);

// {"macro_f1", "ece", "per_class_f1": {label: f1}, "confusion", "labels", "n_test"}
std::string eval_report_json(const EvalReport& report, const LabelSet& label_set);

}  // namespace effiara

#endif  // EFFIARA_METRICS_H_

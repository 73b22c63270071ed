#ifndef EFFIARA_TRAINER_H_
#define EFFIARA_TRAINER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effiara/features.h"
#include "effiara/labeling.h"
#include "effiara/metrics.h"

namespace effiara {

enum class LabelMode { kHard, kSoft };
enum class Weighting { kNone, kReliability };
// Which agreement the reliabilities were computed from; maps onto lambda.
enum class ReliabilitySource { kInter, kIntra, kInterIntra };

double source_lambda(ReliabilitySource source);  // 0, 1, 0.5

std::string_view label_mode_name(LabelMode mode);
std::string_view weighting_name(Weighting weighting);
std::string_view reliability_source_name(ReliabilitySource source);
std::optional<LabelMode> parse_label_mode(std::string_view text);
std::optional<Weighting> parse_weighting(std::string_view text);
std::optional<ReliabilitySource> parse_reliability_source(std::string_view text);

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 0.5;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  LabelMode label_mode = LabelMode::kSoft;
  Weighting weighting = Weighting::kReliability;
  ReliabilitySource reliability_source = ReliabilitySource::kInterIntra;

  void validate() const;
};

// A training point: features, a target distribution (one-hot in hard mode)
// and the per-sample loss weight.
struct TrainingExample {
  FeatureVector features;
  std::vector<double> target;
  double weight = 1.0;
};

// Linear layer + softmax. Weights are row-major [class][feature].
class LinearSoftmaxModel {
 public:
  LinearSoftmaxModel(std::size_t num_classes, std::size_t dimension);

  std::size_t num_classes() const { return num_classes_; }
  std::size_t dimension() const { return dimension_; }

  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& bias() { return bias_; }
  const std::vector<double>& bias() const { return bias_; }

  std::vector<double> logits(const FeatureVector& x) const;
  std::vector<double> predict_proba(const FeatureVector& x) const;
  LabelIndex predict(const FeatureVector& x) const;

 private:
  std::size_t num_classes_;
  std::size_t dimension_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

std::vector<double> softmax(std::span<const double> logits);

// Probabilities are clamped below at this value before the log.
inline constexpr double kProbabilityFloor = 1e-12;

// -weight * sum_c target_c * ln(max(pred_c, 1e-12)).
double weighted_cross_entropy(std::span<const double> predicted,
                              std::span<const double> target, double weight);

// Loss weight of one sample: 1.0 without weighting, otherwise the annotator's
// reliability, or the mean of both for a double-annotated sample. Throws
// ValidationError when a reliability is missing or the weight is not positive.
double sample_weight(const LabeledSample& sample,
                     const std::map<std::string, double>& reliabilities,
                     Weighting weighting);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> weights;  // same layout as the model
  std::vector<double> bias;
};

// Objective (1/N) sum_i w_i CE_i + (l2 / 2) ||W||^2 (bias not regularised)
// and its analytic gradient. The per-example logit gradient is
// w_i (softmax(z_i) - target_i).
LossAndGradient loss_gradient(const LinearSoftmaxModel& model,
                              std::span<const TrainingExample> batch, double l2);

struct TrainedModel {
  LinearSoftmaxModel model;
  std::vector<double> loss_trace;  // objective before each epoch's update
};

// Full-batch gradient descent from zero weights with a fixed step. Throws
// ValidationError when the targets' argmax covers fewer than two classes.
TrainedModel train_classifier(std::span<const TrainingExample> examples,
                              std::size_t num_classes, std::size_t dimension,
                              const TrainConfig& config);

// Builds examples from labelled samples: target from the label mode, weight
// from sample_weight(). `features` is keyed by sample id.
std::vector<TrainingExample> make_training_examples(
    std::span<const LabeledSample> samples,
    const std::map<std::string, FeatureVector>& features,
    const std::map<std::string, double>& reliabilities, const TrainConfig& config);

// Splits the gold samples (by position in `samples`) into `folds` groups after
// a seeded shuffle.
std::vector<std::vector<std::size_t>> gold_folds(std::span<const LabeledSample> samples,
                                                 int folds, std::uint64_t seed);

// Seeded random subset of ceil(fraction * |gold|) gold samples (positions in
// `samples`, sorted), for a single train/test split. fraction is in (0, 1).
std::vector<std::size_t> gold_holdout(std::span<const LabeledSample> samples,
                                      double fraction, std::uint64_t seed);

// Trains on every sample outside `test` and evaluates on `test` against the
// hard labels. Returns the test probabilities alongside the trained model.
struct HoldoutRun {
  TrainedModel trained;
  std::vector<std::vector<double>> test_probabilities;
  std::vector<LabelIndex> test_gold;
};
HoldoutRun train_and_predict(std::span<const LabeledSample> samples,
                             std::span<const std::size_t> test,
                             const std::map<std::string, FeatureVector>& features,
                             const std::map<std::string, double>& reliabilities,
                             std::size_t num_classes, std::size_t dimension,
                             const TrainConfig& config);

// K-fold cross-validation over the gold samples with pooled predictions.
EvalReport cross_validate(std::span<const LabeledSample> samples,
                          const std::map<std::string, FeatureVector>& features,
                          const std::map<std::string, double>& reliabilities,
                          std::size_t num_classes, std::size_t dimension,
                          const TrainConfig& config, int folds);

}  // namespace effiara

#endif  // EFFIARA_TRAINER_H_

#include "effiara/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "effiara/errors.h"
#include "effiara/random.h"

namespace effiara {

double source_lambda(ReliabilitySource source) {
  switch (source) {
    case ReliabilitySource::kInter:
      return 0.0;
    case ReliabilitySource::kIntra:
      return 1.0;
    case ReliabilitySource::kInterIntra:
      return 0.5;
  }
  return 0.5;
}

std::string_view label_mode_name(LabelMode mode) {
  return mode == LabelMode::kHard ? "hard" : "soft";
}

std::string_view weighting_name(Weighting weighting) {
  return weighting == Weighting::kNone ? "none" : "reliability";
}

std::string_view reliability_source_name(ReliabilitySource source) {
  switch (source) {
    case ReliabilitySource::kInter:
      return "inter";
    case ReliabilitySource::kIntra:
      return "intra";
    case ReliabilitySource::kInterIntra:
      return "inter_intra";
  }
  return "inter_intra";
}

std::optional<LabelMode> parse_label_mode(std::string_view text) {
  if (text == "hard") return LabelMode::kHard;
  if (text == "soft") return LabelMode::kSoft;
  return std::nullopt;
}

std::optional<Weighting> parse_weighting(std::string_view text) {
  if (text == "none") return Weighting::kNone;
  if (text == "reliability") return Weighting::kReliability;
  return std::nullopt;
}

std::optional<ReliabilitySource> parse_reliability_source(std::string_view text) {
  if (text == "inter") return ReliabilitySource::kInter;
  if (text == "intra") return ReliabilitySource::kIntra;
  if (text == "inter_intra") return ReliabilitySource::kInterIntra;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
  if (!(l2 >= 0.0)) throw ValidationError("l2 must be >= 0");
}

LinearSoftmaxModel::LinearSoftmaxModel(std::size_t num_classes, std::size_t dimension)
    : num_classes_(num_classes),
      dimension_(dimension),
      weights_(num_classes * dimension, 0.0),
      bias_(num_classes, 0.0) {
  if (num_classes < 2) throw ValidationError("model needs at least 2 classes");
}

std::vector<double> LinearSoftmaxModel::logits(const FeatureVector& x) const {
  if (x.dimension != dimension_) {
    throw ValidationError("feature dimension " + std::to_string(x.dimension) +
                          " does not match model dimension " +
                          std::to_string(dimension_));
  }
  std::vector<double> z = bias_;
  for (std::size_t c = 0; c < num_classes_; ++c) {
    const double* row = weights_.data() + c * dimension_;
    for (std::size_t k = 0; k < x.nnz(); ++k) z[c] += row[x.indices[k]] * x.values[k];
  }
  return z;
}

std::vector<double> LinearSoftmaxModel::predict_proba(const FeatureVector& x) const {
  return softmax(logits(x));
}

LabelIndex LinearSoftmaxModel::predict(const FeatureVector& x) const {
  const auto probs = predict_proba(x);
  return static_cast<LabelIndex>(std::max_element(probs.begin(), probs.end()) -
                                 probs.begin());
}

std::vector<double> softmax(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

double weighted_cross_entropy(std::span<const double> predicted,
                              std::span<const double> target, double weight) {
  if (predicted.size() != target.size()) {
    throw ValidationError("prediction and target differ in length");
  }
  double loss = 0.0;
  for (std::size_t c = 0; c < target.size(); ++c) {
    if (target[c] == 0.0) continue;
    loss -= target[c] * std::log(std::max(predicted[c], kProbabilityFloor));
  }
  return weight * loss;
}

double sample_weight(const LabeledSample& sample,
                     const std::map<std::string, double>& reliabilities,
                     Weighting weighting) {
  if (weighting == Weighting::kNone) return 1.0;
  if (sample.annotators.empty()) {
    throw ValidationError("sample '" + sample.sample_id + "' has no annotators");
  }
  double sum = 0.0;
  for (const std::string& id : sample.annotators) {
    const auto it = reliabilities.find(id);
    if (it == reliabilities.end()) {
      throw ValidationError("no reliability for annotator '" + id + "'");
    }
    sum += it->second;
  }
  const double weight = sum / static_cast<double>(sample.annotators.size());
  if (!(weight > 0.0)) {
    throw ValidationError("sample '" + sample.sample_id + "' has non-positive weight");
  }
  return weight;
}

LossAndGradient loss_gradient(const LinearSoftmaxModel& model,
                              std::span<const TrainingExample> batch, double l2) {
  const std::size_t classes = model.num_classes();
  const std::size_t dim = model.dimension();
  LossAndGradient out;
  out.weights.assign(classes * dim, 0.0);
  out.bias.assign(classes, 0.0);
  if (batch.empty()) return out;

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const TrainingExample& ex : batch) {
    if (ex.target.size() != classes) {
      throw ValidationError("target length does not match the number of classes");
    }
    const std::vector<double> probs = model.predict_proba(ex.features);
    out.loss += inv_n * weighted_cross_entropy(probs, ex.target, ex.weight);
    for (std::size_t c = 0; c < classes; ++c) {
      const double g = inv_n * ex.weight * (probs[c] - ex.target[c]);
      out.bias[c] += g;
      double* row = out.weights.data() + c * dim;
      for (std::size_t k = 0; k < ex.features.nnz(); ++k) {
        row[ex.features.indices[k]] += g * ex.features.values[k];
      }
    }
  }
  if (l2 > 0.0) {
    const auto& w = model.weights();
    double sq = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      sq += w[i] * w[i];
      out.weights[i] += l2 * w[i];
    }
    out.loss += 0.5 * l2 * sq;
  }
  return out;
}

TrainedModel train_classifier(std::span<const TrainingExample> examples,
                              std::size_t num_classes, std::size_t dimension,
                              const TrainConfig& config) {
  config.validate();
  std::set<LabelIndex> classes_seen;
  for (const TrainingExample& ex : examples) {
    classes_seen.insert(static_cast<LabelIndex>(
        std::max_element(ex.target.begin(), ex.target.end()) - ex.target.begin()));
  }
  if (classes_seen.size() < 2) {
    throw ValidationError("training set covers fewer than 2 classes");
  }

  TrainedModel trained{LinearSoftmaxModel(num_classes, dimension), {}};
  trained.loss_trace.reserve(static_cast<std::size_t>(config.epochs));
  LinearSoftmaxModel& model = trained.model;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const LossAndGradient step = loss_gradient(model, examples, config.l2);
    trained.loss_trace.push_back(step.loss);
    for (std::size_t i = 0; i < step.weights.size(); ++i) {
      model.weights()[i] -= config.learning_rate * step.weights[i];
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
      model.bias()[c] -= config.learning_rate * step.bias[c];
    }
  }
  return trained;
}

std::vector<TrainingExample> make_training_examples(
    std::span<const LabeledSample> samples,
    const std::map<std::string, FeatureVector>& features,
    const std::map<std::string, double>& reliabilities, const TrainConfig& config) {
  std::vector<TrainingExample> out;
  out.reserve(samples.size());
  for (const LabeledSample& s : samples) {
    const auto it = features.find(s.sample_id);
    if (it == features.end()) {
      throw ValidationError("no features (sample text) for '" + s.sample_id + "'");
    }
    TrainingExample ex;
    ex.features = it->second;
    if (config.label_mode == LabelMode::kSoft) {
      ex.target.assign(s.soft_label.probs().begin(), s.soft_label.probs().end());
    } else {
      ex.target.assign(s.soft_label.size(), 0.0);
      ex.target[s.hard_label] = 1.0;
    }
    ex.weight = sample_weight(s, reliabilities, config.weighting);
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<std::vector<std::size_t>> gold_folds(std::span<const LabeledSample> samples,
                                                 int folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("need at least 2 folds");
  std::vector<std::size_t> gold;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].gold) gold.push_back(i);
  }
  if (gold.size() < static_cast<std::size_t>(folds)) {
    throw ValidationError("only " + std::to_string(gold.size()) +
                          " gold samples for " + std::to_string(folds) + " folds");
  }
  Rng rng = Rng::stream(seed, {1});
  rng.partial_shuffle(gold, gold.size());
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < gold.size(); ++i) out[i % out.size()].push_back(gold[i]);
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

std::vector<std::size_t> gold_holdout(std::span<const LabeledSample> samples,
                                      double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ValidationError("test fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> gold;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].gold) gold.push_back(i);
  }
  if (gold.empty()) throw ValidationError("no gold samples to hold out");
  const auto count = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(gold.size()) - 1e-9));
  Rng rng = Rng::stream(seed, {2});
  rng.partial_shuffle(gold, count);
  gold.resize(count);
  std::sort(gold.begin(), gold.end());
  return gold;
}

HoldoutRun train_and_predict(std::span<const LabeledSample> samples,
                             std::span<const std::size_t> test,
                             const std::map<std::string, FeatureVector>& features,
                             const std::map<std::string, double>& reliabilities,
                             std::size_t num_classes, std::size_t dimension,
                             const TrainConfig& config) {
  std::vector<bool> is_test(samples.size(), false);
  for (const std::size_t i : test) is_test.at(i) = true;
  std::vector<LabeledSample> train;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!is_test[i]) train.push_back(samples[i]);
  }
  const auto examples = make_training_examples(train, features, reliabilities, config);
  HoldoutRun run{train_classifier(examples, num_classes, dimension, config), {}, {}};
  for (const std::size_t i : test) {
    const auto it = features.find(samples[i].sample_id);
    if (it == features.end()) {
      throw ValidationError("no features for test sample '" + samples[i].sample_id + "'");
    }
    run.test_probabilities.push_back(run.trained.model.predict_proba(it->second));
    run.test_gold.push_back(samples[i].hard_label);
  }
  return run;
}

EvalReport cross_validate(std::span<const LabeledSample> samples,
                          const std::map<std::string, FeatureVector>& features,
                          const std::map<std::string, double>& reliabilities,
                          std::size_t num_classes, std::size_t dimension,
                          const TrainConfig& config, int folds) {
  std::vector<std::vector<double>> probabilities;
  std::vector<LabelIndex> gold;
  for (const auto& fold : gold_folds(samples, folds, config.seed)) {
    HoldoutRun run = train_and_predict(samples, fold, features, reliabilities,
                                       num_classes, dimension, config);
    for (auto& p : run.test_probabilities) probabilities.push_back(std::move(p));
    gold.insert(gold.end(), run.test_gold.begin(), run.test_gold.end());
  }
  return evaluate(probabilities, gold, num_classes);
}

}  // namespace effiara

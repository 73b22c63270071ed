#ifndef EFFIARA_SIMULATOR_H_
#define EFFIARA_SIMULATOR_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effiara/distribution.h"
#include "effiara/reliability.h"
#include "effiara/types.h"

namespace effiara {

// Unnormalised weights over confidence 1..MaxC (index 0 is confidence 1),
// conditioned on whether the emitted label is correct.
struct ConfidenceModel {
  std::vector<double> when_correct;
  std::vector<double> when_incorrect;

  // Correct labels: uniform over {4, 5}; incorrect: uniform over {2, 3}.
  // Scaled to the top two / the two below for other MaxC values.
  static ConfidenceModel standard(int max_confidence);

  bool operator==(const ConfidenceModel&) const = default;
};

struct SyntheticAnnotator {
  std::string id;
  double accuracy = 1.0;     // P(first-phase label is the true label)
  double consistency = 1.0;  // P(re-annotation repeats the first label)
  ConfidenceModel confidence;

  bool operator==(const SyntheticAnnotator&) const = default;
};

// Synthetic claim/post texts. Each post token is, with probability
// `signal_prob`, drawn from a vocabulary specific to the true class and
// otherwise from a shared vocabulary, so a text classifier has something to
// learn without the labels being trivially separable.
struct TextModel {
  int tokens_per_post = 12;
  double signal_prob = 0.3;
  int class_vocabulary = 30;
  int shared_vocabulary = 400;

  bool operator==(const TextModel&) const = default;
};

struct SimScenario {
  CampaignParams campaign;
  LabelSet label_set;
  std::vector<double> class_prior;  // sums to 1, one entry per label
  std::vector<SyntheticAnnotator> annotators;  // ring order
  std::uint64_t seed = 0;
  TextModel text;

  void validate() const;
  std::vector<std::string> annotator_ids() const;

  bool operator==(const SimScenario&) const = default;
};

// Six annotators a1..a6 with accuracies 0.95, 0.90, 0.85, 0.80, 0.75, 0.60
// and consistency equal to accuracy; n = 6, rho = 60, d = 1/3, r = 1/2 and t
// chosen so that k = 600; labels misinfo/debunk/other with prior
// 0.4/0.2/0.4.
SimScenario standard_scenario(std::uint64_t seed);

struct SimulationResult {
  AnnotationStore store;
  std::map<std::string, LabelIndex> ground_truth;
  std::vector<Sample> samples;  // assigned samples, pool order
  DistributionPlan plan;
};

// Draws true labels from the prior, allocates samples with allocate_samples()
// and lets every annotator label its projects. A wrong label is uniform over
// the other classes; the confidence comes from the annotator's model and a
// secondary label (uniform over non-primary classes) is attached whenever the
// confidence is <= 3 and there are more than two classes. A re-annotation
// repeats the first label with probability `consistency` and is otherwise
// drawn afresh. Random streams are keyed by (annotator, sample), so results
// depend only on the seed.
SimulationResult simulate_campaign(const SimScenario& scenario);

// Spearman rank correlation with average ranks for ties. Returns 0 when one
// side is constant.
double spearman_rho(std::span<const double> a, std::span<const double> b);

// Spearman rho between estimated reliabilities and the scenario's true
// accuracies. Throws ValidationError for fewer than three annotators or a
// missing annotator.
double evaluate_recovery(const std::map<std::string, double>& reliabilities,
                         const SimScenario& scenario);

struct RecoveryRun {
  double rho = 0.0;
  ReliabilityResult reliability;
};

// simulate_campaign -> build_graph -> compute_reliability -> evaluate_recovery.
RecoveryRun run_recovery(const SimScenario& scenario, const ReliabilityConfig& config);

std::string scenario_to_json(const SimScenario& scenario);
// Missing optional fields (confidence models, text model, seed) take defaults.
SimScenario scenario_from_json(std::string_view json_text);

}  // namespace effiara

#endif  // EFFIARA_SIMULATOR_H_

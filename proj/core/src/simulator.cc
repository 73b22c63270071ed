#include "effiara/simulator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "effiara/errors.h"
#include "effiara/random.h"
#include "json.hpp"

namespace effiara {

namespace {

// Stream tags for Rng::stream.
enum StreamTag : std::uint64_t {
  kTruthStream = 11,
  kTextStream = 12,
  kFirstPhaseStream = 13,
  kReannotationStream = 14,
};

std::string pool_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%05zu", index + 1);
  return buf;
}

struct Emitted {
  LabelIndex label;
  int confidence;
  std::optional<LabelIndex> secondary;
};

LabelIndex draw_other(Rng& rng, std::size_t num_classes, LabelIndex excluded) {
  const auto pick = static_cast<LabelIndex>(rng.uniform_index(num_classes - 1));
  return pick < excluded ? pick : pick + 1;
}

Emitted finish(Rng& rng, const SyntheticAnnotator& annotator, LabelIndex label,
               LabelIndex truth, std::size_t num_classes) {
  const auto& weights = label == truth ? annotator.confidence.when_correct
                                       : annotator.confidence.when_incorrect;
  Emitted out{label, static_cast<int>(rng.categorical(weights)) + 1, std::nullopt};
  if (out.confidence <= 3 && num_classes > 2) {
    out.secondary = draw_other(rng, num_classes, label);
  }
  return out;
}

Emitted emit(Rng& rng, const SyntheticAnnotator& annotator, LabelIndex truth,
             std::size_t num_classes) {
  const LabelIndex label = rng.bernoulli(annotator.accuracy)
                               ? truth
                               : draw_other(rng, num_classes, truth);
  return finish(rng, annotator, label, truth, num_classes);
}

nlohmann::ordered_json confidence_json(const ConfidenceModel& model) {
  return {{"when_correct", model.when_correct}, {"when_incorrect", model.when_incorrect}};
}

void check_weights(const std::vector<double>& weights, int max_confidence,
                   const std::string& who) {
  if (static_cast<int>(weights.size()) != max_confidence) {
    throw ValidationError(who + ": confidence weights need " +
                          std::to_string(max_confidence) + " entries");
  }
  double sum = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError(who + ": confidence weights must be non-negative");
    }
    sum += w;
  }
  if (!(sum > 0.0)) throw ValidationError(who + ": confidence weights sum to zero");
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

ConfidenceModel ConfidenceModel::standard(int max_confidence) {
  if (max_confidence < 2) throw ValidationError("max_confidence must be >= 2");
  ConfidenceModel model;
  model.when_correct.assign(max_confidence, 0.0);
  model.when_incorrect.assign(max_confidence, 0.0);
  model.when_correct[max_confidence - 1] = 1.0;
  model.when_correct[max_confidence - 2] = 1.0;
  model.when_incorrect[std::max(0, max_confidence - 3)] = 1.0;
  model.when_incorrect[std::max(0, max_confidence - 4)] = 1.0;
  return model;
}

void SimScenario::validate() const {
  campaign.validate();
  if (static_cast<int>(annotators.size()) != campaign.num_annotators) {
    throw ValidationError("scenario has " + std::to_string(annotators.size()) +
                          " annotators but the campaign expects " +
                          std::to_string(campaign.num_annotators));
  }
  if (class_prior.size() != label_set.size()) {
    throw ValidationError("class_prior length differs from the label set");
  }
  double total = 0.0;
  for (const double p : class_prior) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("class_prior entry outside [0, 1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("class_prior must sum to 1");

  std::set<std::string> ids;
  for (const SyntheticAnnotator& a : annotators) {
    if (a.id.empty() || !ids.insert(a.id).second) {
      throw ValidationError("annotator ids must be non-empty and distinct");
    }
    if (!(a.accuracy > 0.0 && a.accuracy <= 1.0)) {
      throw ValidationError("annotator '" + a.id + "': accuracy must lie in (0, 1]");
    }
    if (!(a.consistency > 0.0 && a.consistency <= 1.0)) {
      throw ValidationError("annotator '" + a.id + "': consistency must lie in (0, 1]");
    }
    check_weights(a.confidence.when_correct, campaign.max_confidence, a.id);
    check_weights(a.confidence.when_incorrect, campaign.max_confidence, a.id);
  }
  if (text.tokens_per_post < 1 || text.class_vocabulary < 1 ||
      text.shared_vocabulary < 1 || !(text.signal_prob >= 0.0 && text.signal_prob <= 1.0)) {
    throw ValidationError("invalid text model");
  }
}

std::vector<std::string> SimScenario::annotator_ids() const {
  std::vector<std::string> ids;
  for (const auto& a : annotators) ids.push_back(a.id);
  return ids;
}

SimScenario standard_scenario(std::uint64_t seed) {
  CampaignParams campaign;
  campaign.num_annotators = 6;
  campaign.annotation_rate = 60.0;
  campaign.double_prop = 1.0 / 3.0;
  campaign.reanno_prop = 0.5;
  // 600 unique samples: k = rho t n / (2d + (1 + r)(1 - d)) = 216 t.
  campaign.time_per_annotator = 600.0 / 216.0;
  campaign.max_confidence = 5;

  std::vector<SyntheticAnnotator> annotators;
  const double accuracies[] = {0.95, 0.90, 0.85, 0.80, 0.75, 0.60};
  for (int i = 0; i < 6; ++i) {
    annotators.push_back(SyntheticAnnotator{"a" + std::to_string(i + 1), accuracies[i],
                                            accuracies[i],
                                            ConfidenceModel::standard(5)});
  }
  return SimScenario{campaign, LabelSet({"misinfo", "debunk", "other"}),
                     {0.4, 0.2, 0.4}, std::move(annotators), seed, TextModel{}};
}

SimulationResult simulate_campaign(const SimScenario& scenario) {
  scenario.validate();
  const CampaignParams& params = scenario.campaign;
  const long k = compute_sample_count(params);
  const ProjectSizes sizes = project_sizes(params, k);
  const long needed =
      params.num_annotators * (2 * sizes.double_project + sizes.single_project);
  const std::size_t pool_size = static_cast<std::size_t>(std::max(k, needed));

  std::vector<std::string> pool;
  pool.reserve(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) pool.push_back(pool_id(i));
  DistributionPlan plan =
      allocate_samples(pool, params, scenario.seed, scenario.annotator_ids());

  const std::size_t num_classes = scenario.label_set.size();
  std::map<std::string, std::size_t> pool_index;
  for (std::size_t i = 0; i < pool.size(); ++i) pool_index.emplace(pool[i], i);

  // Which pool entries were assigned, and to whom.
  std::vector<std::vector<std::size_t>> labellers(pool.size());
  std::vector<std::vector<std::size_t>> reannotators(pool.size());
  for (std::size_t a = 0; a < scenario.annotators.size(); ++a) {
    const AnnotatorProjects& projects = plan.annotators.at(scenario.annotators[a].id);
    for (const auto& id : projects.single) labellers[pool_index.at(id)].push_back(a);
    for (const auto& [partner, shared] : projects.doubles) {
      for (const auto& id : shared) labellers[pool_index.at(id)].push_back(a);
    }
    for (const auto& id : projects.reannotate) {
      reannotators[pool_index.at(id)].push_back(a);
    }
  }

  SimulationResult result{AnnotationStore(scenario.label_set, params.max_confidence, {}),
                          {}, {}, std::move(plan)};
  std::vector<Annotation> annotations;
  for (std::size_t s = 0; s < pool.size(); ++s) {
    if (labellers[s].empty()) continue;
    Rng truth_rng = Rng::stream(scenario.seed, {kTruthStream, s});
    const LabelIndex truth = truth_rng.categorical(scenario.class_prior);
    result.ground_truth.emplace(pool[s], truth);

    Rng text_rng = Rng::stream(scenario.seed, {kTextStream, s});
    const TextModel& text = scenario.text;
    Sample sample{pool[s], "claim" + std::to_string(text_rng.uniform_index(50)), ""};
    for (int t = 0; t < text.tokens_per_post; ++t) {
      if (t > 0) sample.post_text += ' ';
      if (text_rng.bernoulli(text.signal_prob)) {
        sample.post_text += "c" + std::to_string(truth) + "w" +
                            std::to_string(text_rng.uniform_index(text.class_vocabulary));
      } else {
        sample.post_text +=
            "w" + std::to_string(text_rng.uniform_index(text.shared_vocabulary));
      }
    }
    result.samples.push_back(std::move(sample));

    std::sort(labellers[s].begin(), labellers[s].end());
    std::map<std::size_t, Emitted> first_labels;
    for (const std::size_t a : labellers[s]) {
      const SyntheticAnnotator& annotator = scenario.annotators[a];
      Rng rng = Rng::stream(scenario.seed, {kFirstPhaseStream, a, s});
      const Emitted e = emit(rng, annotator, truth, num_classes);
      first_labels.emplace(a, e);
      annotations.push_back(Annotation{pool[s], annotator.id, Phase::kFirst, e.label,
                                       e.confidence, e.secondary});
    }
    for (const std::size_t a : reannotators[s]) {
      const SyntheticAnnotator& annotator = scenario.annotators[a];
      Rng rng = Rng::stream(scenario.seed, {kReannotationStream, a, s});
      const Emitted e =
          rng.bernoulli(annotator.consistency)
              ? finish(rng, annotator, first_labels.at(a).label, truth, num_classes)
              : emit(rng, annotator, truth, num_classes);
      annotations.push_back(Annotation{pool[s], annotator.id, Phase::kReannotation,
                                       e.label, e.confidence, e.secondary});
    }
  }
  result.store =
      AnnotationStore(scenario.label_set, params.max_confidence, std::move(annotations));
  return result;
}

double spearman_rho(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw ValidationError("spearman_rho needs two equal-length series of length >= 2");
  }
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

double evaluate_recovery(const std::map<std::string, double>& reliabilities,
                         const SimScenario& scenario) {
  if (scenario.annotators.size() < 3) {
    throw ValidationError("recovery needs at least 3 annotators");
  }
  std::vector<double> estimated;
  std::vector<double> truth;
  for (const SyntheticAnnotator& a : scenario.annotators) {
    const auto it = reliabilities.find(a.id);
    if (it == reliabilities.end()) {
      throw ValidationError("no reliability for annotator '" + a.id + "'");
    }
    estimated.push_back(it->second);
    truth.push_back(a.accuracy);
  }
  return spearman_rho(estimated, truth);
}

RecoveryRun run_recovery(const SimScenario& scenario, const ReliabilityConfig& config) {
  const SimulationResult sim = simulate_campaign(scenario);
  AnnotatorGraph graph = build_graph(sim.store);
  RecoveryRun run;
  run.reliability = compute_reliability(graph, config);
  run.rho = evaluate_recovery(run.reliability.reliabilities, scenario);
  return run;
}

std::string scenario_to_json(const SimScenario& scenario) {
  nlohmann::ordered_json out;
  const CampaignParams& p = scenario.campaign;
  out["campaign"] = {{"num_annotators", p.num_annotators},
                     {"time_per_annotator", p.time_per_annotator},
                     {"annotation_rate", p.annotation_rate},
                     {"double_prop", p.double_prop},
                     {"reanno_prop", p.reanno_prop},
                     {"max_confidence", p.max_confidence}};
  out["labels"] = scenario.label_set.labels();
  out["class_prior"] = scenario.class_prior;
  nlohmann::ordered_json annotators = nlohmann::ordered_json::array();
  for (const SyntheticAnnotator& a : scenario.annotators) {
    annotators.push_back({{"id", a.id},
                          {"accuracy", a.accuracy},
                          {"consistency", a.consistency},
                          {"confidence", confidence_json(a.confidence)}});
  }
  out["annotators"] = std::move(annotators);
  out["seed"] = scenario.seed;
  out["text"] = {{"tokens_per_post", scenario.text.tokens_per_post},
                 {"signal_prob", scenario.text.signal_prob},
                 {"class_vocabulary", scenario.text.class_vocabulary},
                 {"shared_vocabulary", scenario.text.shared_vocabulary}};
  return out.dump(2) + "\n";
}

SimScenario scenario_from_json(std::string_view json_text) {
  try {
    const auto in = nlohmann::json::parse(json_text);
    const auto& c = in.at("campaign");
    CampaignParams campaign;
    campaign.num_annotators = c.at("num_annotators").get<int>();
    campaign.time_per_annotator = c.at("time_per_annotator").get<double>();
    campaign.annotation_rate = c.at("annotation_rate").get<double>();
    campaign.double_prop = c.at("double_prop").get<double>();
    campaign.reanno_prop = c.at("reanno_prop").get<double>();
    campaign.max_confidence = c.value("max_confidence", 5);

    std::vector<SyntheticAnnotator> annotators;
    for (const auto& a : in.at("annotators")) {
      SyntheticAnnotator annotator;
      annotator.id = a.at("id").get<std::string>();
      annotator.accuracy = a.at("accuracy").get<double>();
      annotator.consistency = a.value("consistency", annotator.accuracy);
      annotator.confidence = ConfidenceModel::standard(campaign.max_confidence);
      if (a.contains("confidence")) {
        annotator.confidence.when_correct =
            a["confidence"].at("when_correct").get<std::vector<double>>();
        annotator.confidence.when_incorrect =
            a["confidence"].at("when_incorrect").get<std::vector<double>>();
      }
      annotators.push_back(std::move(annotator));
    }
    TextModel text;
    if (in.contains("text")) {
      const auto& t = in["text"];
      text.tokens_per_post = t.value("tokens_per_post", text.tokens_per_post);
      text.signal_prob = t.value("signal_prob", text.signal_prob);
      text.class_vocabulary = t.value("class_vocabulary", text.class_vocabulary);
      text.shared_vocabulary = t.value("shared_vocabulary", text.shared_vocabulary);
    }
    SimScenario scenario{campaign,
                         LabelSet(in.at("labels").get<std::vector<std::string>>()),
                         in.at("class_prior").get<std::vector<double>>(),
                         std::move(annotators),
                         in.value("seed", std::uint64_t{0}),
                         text};
    scenario.validate();
    return scenario;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scenario JSON: ") + e.what());
  }
}

}  // namespace effiara

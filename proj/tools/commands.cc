#include "commands.h"

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "effiara/annotation_io.h"
#include "effiara/distribution.h"
#include "effiara/errors.h"
#include "effiara/features.h"
#include "effiara/labeling.h"
#include "effiara/metrics.h"
#include "effiara/reliability.h"
#include "effiara/simulator.h"
#include "effiara/trainer.h"
#include "file_io.h"
#include "json.hpp"

namespace effiara::cli {

namespace {

constexpr const char* kDefaultLabels = "misinfo,debunk,other";
constexpr std::size_t kMaxWarningsShown = 5;

struct AnnotationInput {
  std::string path;
  std::string labels = kDefaultLabels;
  int max_confidence = 5;
};

void add_annotation_input(CLI::App* sub, AnnotationInput& in) {
  sub->add_option("--annotations", in.path, "Annotation CSV")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--labels", in.labels, "Comma-separated label set, in order")
      ->capture_default_str();
  sub->add_option("--max-confidence", in.max_confidence, "Top of the confidence scale")
      ->capture_default_str()
      ->check(CLI::Range(2, 100));
}

AnnotationStore load_store(const AnnotationInput& in) {
  const LabelSet labels = LabelSet::parse(in.labels);
  std::vector<std::string> warnings;
  AnnotationStore store =
      parse_annotations(read_file(in.path), labels, in.max_confidence, &warnings);
  for (std::size_t i = 0; i < warnings.size() && i < kMaxWarningsShown; ++i) {
    std::cerr << "warning: " << in.path << ": " << warnings[i] << '\n';
  }
  if (warnings.size() > kMaxWarningsShown) {
    std::cerr << "warning: " << in.path << ": " << warnings.size() - kMaxWarningsShown
              << " more rows with low confidence and no secondary label\n";
  }
  return store;
}

struct ReliabilityFlags {
  double lambda = 0.5;
  std::string mode = "iterative";
  bool weighted_inter = true;
  double tolerance = 1e-6;
  int max_iterations = 100;

  ReliabilityConfig config() const {
    ReliabilityConfig c;
    c.lambda = lambda;
    c.mode = *parse_mode(mode);
    c.use_weighted_inter = weighted_inter;
    c.tolerance = tolerance;
    c.max_iterations = max_iterations;
    return c;
  }
};

void add_reliability_flags(CLI::App* sub, ReliabilityFlags& f) {
  sub->add_option("--lambda", f.lambda, "Weight of intra agreement in [0, 1]")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--mode", f.mode, "single or iterative")
      ->capture_default_str()
      ->check(CLI::IsMember({"single", "iterative"}));
  sub->add_flag("--weighted-inter,!--no-weighted-inter", f.weighted_inter,
                "Scale inter agreement by neighbour reliability (default on)");
  sub->add_option("--tolerance", f.tolerance, "Iterative convergence threshold")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--max-iterations", f.max_iterations, "Iteration cap")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void warn_if_unconverged(const ReliabilityConfig& config, const ReliabilityResult& result) {
  if (config.mode == ReliabilityMode::kIterative && !result.converged) {
    std::cerr << "warning: reliability did not converge in " << result.iterations
              << " iterations; reporting the last iterate\n";
  }
}

LabelMerge merge_from_flags(const LabelSet& labels, const std::vector<std::string>& merges) {
  std::map<std::string, std::string> mapping;
  for (const std::string& spec : merges) {
    for (const auto& [from, to] : parse_merge_spec(spec)) {
      if (!mapping.emplace(from, to).second) {
        throw ValidationError("label '" + from + "' merged twice");
      }
    }
  }
  return LabelMerge::with_identity(labels, mapping);
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

SimScenario load_scenario(const std::string& path) {
  return path.empty() ? standard_scenario(0) : scenario_from_json(read_file(path));
}

// --- distribute -------------------------------------------------------------

Command distribute_command(CLI::App& app) {
  struct Options {
    std::string samples;
    CampaignParams params;
    std::uint64_t seed = 0;
    std::vector<std::string> annotator_ids;
    std::string output;
  };
  auto o = std::make_shared<Options>();
  CLI::App* sub = app.add_subcommand(
      "distribute", "Assign samples to single, double and re-annotation projects");
  sub->add_option("--samples", o->samples, "Sample CSV (sample_id,claim_text,post_text)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--annotators", o->params.num_annotators, "Number of annotators (>= 5)")
      ->capture_default_str();
  sub->add_option("--hours", o->params.time_per_annotator, "Hours per annotator")
      ->capture_default_str();
  sub->add_option("--rate", o->params.annotation_rate, "Annotations per hour")
      ->capture_default_str();
  sub->add_option("--double-prop", o->params.double_prop,
                  "Proportion of samples annotated twice")
      ->capture_default_str();
  sub->add_option("--reanno-prop", o->params.reanno_prop,
                  "Proportion of each single project re-annotated")
      ->capture_default_str();
  sub->add_option("--seed", o->seed, "Random seed")->required();
  sub->add_option("--annotator-ids", o->annotator_ids, "Ring order of annotator ids")
      ->delimiter(',');
  sub->add_option("--output,-o", o->output, "Plan JSON (default stdout)");

  return {sub, [o] {
            std::vector<std::string> ids;
            for (const Sample& s : parse_samples(read_file(o->samples))) {
              ids.push_back(s.sample_id);
            }
            const DistributionPlan plan =
                allocate_samples(ids, o->params, o->seed, o->annotator_ids);
            const PlanReport report = verify_plan(plan);
            if (!report.ok) {
              throw Error("generated plan failed verification: " + report.violations.front());
            }
            write_output(o->output, plan_to_json(plan));
            std::cerr << "k=" << plan.k << " single=" << plan.sizes.single_project
                      << " reannotation=" << plan.sizes.reannotation
                      << " double=" << plan.sizes.double_project << '\n';
          }};
}

// --- reliability / graph ----------------------------------------------------

Command reliability_command(CLI::App& app) {
  struct Options {
    AnnotationInput input;
    ReliabilityFlags flags;
    std::string output;
  };
  auto o = std::make_shared<Options>();
  CLI::App* sub =
      app.add_subcommand("reliability", "Agreement graph and annotator reliability report");
  add_annotation_input(sub, o->input);
  add_reliability_flags(sub, o->flags);
  sub->add_option("--output,-o", o->output, "Report JSON (default stdout)");

  return {sub, [o] {
            const AnnotationStore store = load_store(o->input);
            AnnotatorGraph graph = build_graph(store);
            const ReliabilityConfig config = o->flags.config();
            const ReliabilityResult result = compute_reliability(graph, config);
            warn_if_unconverged(config, result);
            write_output(o->output, reliability_report_json(graph, config, result));
          }};
}

Command graph_command(CLI::App& app) {
  struct Options {
    AnnotationInput input;
    ReliabilityFlags flags;
    std::string output;
  };
  auto o = std::make_shared<Options>();
  CLI::App* sub =
      app.add_subcommand("graph", "Agreement graph with reliabilities as Graphviz DOT");
  add_annotation_input(sub, o->input);
  add_reliability_flags(sub, o->flags);
  sub->add_option("--output,-o", o->output, "DOT file (default stdout)");

  return {sub, [o] {
            const AnnotationStore store = load_store(o->input);
            AnnotatorGraph graph = build_graph(store);
            const ReliabilityConfig config = o->flags.config();
            warn_if_unconverged(config, compute_reliability(graph, config));
            write_output(o->output, export_dot(graph));
          }};
}

// --- labels / gold ----------------------------------------------------------

Command labels_command(CLI::App& app) {
  struct Options {
    AnnotationInput input;
    std::string reliability;
    std::vector<std::string> merges;
    std::string output;
  };
  auto o = std::make_shared<Options>();
  CLI::App* sub = app.add_subcommand(
      "labels", "Soft and hard labels per sample, weighted by annotator reliability");
  add_annotation_input(sub, o->input);
  sub->add_option("--reliability", o->reliability,
                  "Reliability report JSON; without it every annotator weighs 1.0")
      ->check(CLI::ExistingFile);
  sub->add_option("--merge", o->merges, "Merge labels, e.g. debunk=other (repeatable)");
  sub->add_option("--output,-o", o->output, "Labelled JSONL (default stdout)");

  return {sub, [o] {
            AnnotationStore store = load_store(o->input);
            if (!o->merges.empty()) {
              store = merge_from_flags(store.label_set(), o->merges).apply(store);
            }
            std::map<std::string, double> reliabilities;
            if (!o->reliability.empty()) {
              reliabilities = parse_reliability_report(read_file(o->reliability));
            }
            const std::vector<LabeledSample> samples =
                build_labeled_samples(store, reliabilities);
            write_output(o->output, labeled_to_jsonl(samples, store.label_set()));
            std::size_t gold = 0;
            for (const auto& s : samples) gold += s.gold ? 1 : 0;
            std::cerr << samples.size() << " samples (" << gold << " gold), labels "
                      << store.label_set().to_string() << '\n';
          }};
}

Command gold_command(CLI::App& app) {
  struct Options {
    AnnotationInput input;
    std::vector<std::string> merges;
    std::string output;
  };
  auto o = std::make_shared<Options>();
  CLI::App* sub = app.add_subcommand(
      "gold", "High-agreement test set: double annotations with matching confident labels");
  add_annotation_input(sub, o->input);
  sub->add_option("--merge", o->merges, "Merge labels, e.g. debunk=other (repeatable)");
  sub->add_option("--output,-o", o->output, "Gold JSONL (default stdout)");

  return {sub, [o] {
            AnnotationStore store = load_store(o->input);
            if (!o->merges.empty()) {
              store = merge_from_flags(store.label_set(), o->merges).apply(store);
            }
            write_output(o->output, labeled_to_jsonl(extract_gold_set(store),
                                                     store.label_set()));
          }};
}

// --- train ------------------------------------------------------------------

Command train_command(CLI::App& app) {
  struct Options {
    std::string labeled;
    std::string samples;
    std::string reliability;
    std::string labels = kDefaultLabels;
    std::string label_mode = "soft";
    std::string weighting = "reliability";
    std::string source = "inter_intra";
    TrainConfig config;
    double test_fraction = 0.2;
    std::size_t feature_dim = FeatureHasher::kDefaultDimension;
    std::string output;
    std::string trace;
  };
  auto o = std::make_shared<Options>();
  CLI::App* sub = app.add_subcommand(
      "train", "Train the linear text classifier and evaluate on held-out gold samples");
  sub->add_option("--labeled", o->labeled, "Labelled JSONL from `labels`")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--samples", o->samples, "Sample CSV with the texts")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--reliability", o->reliability, "Reliability report JSON")
      ->check(CLI::ExistingFile);
  sub->add_option("--labels", o->labels, "Label set of the JSONL, in order")
      ->capture_default_str();
  sub->add_option("--label-mode", o->label_mode, "soft or hard targets")
      ->capture_default_str()
      ->check(CLI::IsMember({"soft", "hard"}));
  sub->add_option("--weighting", o->weighting, "reliability or none")
      ->capture_default_str()
      ->check(CLI::IsMember({"reliability", "none"}));
  sub->add_option("--reliability-source", o->source,
                  "Agreement the report was built from: inter, intra or inter_intra")
      ->capture_default_str()
      ->check(CLI::IsMember({"inter", "intra", "inter_intra"}));
  sub->add_option("--epochs", o->config.epochs, "Gradient descent epochs")
      ->capture_default_str();
  sub->add_option("--lr", o->config.learning_rate, "Learning rate")->capture_default_str();
  sub->add_option("--l2", o->config.l2, "L2 penalty on the weights")->capture_default_str();
  sub->add_option("--seed", o->config.seed, "Seed for the train/test split")->required();
  sub->add_option("--test-fraction", o->test_fraction, "Share of gold samples held out")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--feature-dim", o->feature_dim, "Hashed feature dimension")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--output,-o", o->output, "Evaluation JSON (default stdout)");
  sub->add_option("--trace", o->trace, "Training loss CSV (epoch,loss)");

  return {sub, [o] {
            TrainConfig config = o->config;
            config.label_mode = *parse_label_mode(o->label_mode);
            config.weighting = *parse_weighting(o->weighting);
            config.reliability_source = *parse_reliability_source(o->source);
            config.validate();
            if (config.weighting == Weighting::kReliability && o->reliability.empty()) {
              throw UsageError("--weighting reliability needs --reliability");
            }

            const LabelSet labels = LabelSet::parse(o->labels);
            const std::vector<LabeledSample> samples =
                labeled_from_jsonl(read_file(o->labeled), labels);
            std::map<std::string, double> reliabilities;
            if (!o->reliability.empty()) {
              const std::string text = read_file(o->reliability);
              reliabilities = parse_reliability_report(text);
              const auto report = nlohmann::json::parse(text);
              const double expected = source_lambda(config.reliability_source);
              if (report.contains("config") && report["config"].contains("lambda") &&
                  report["config"]["lambda"].get<double>() != expected) {
                std::cerr << "warning: report was computed with lambda="
                          << report["config"]["lambda"].get<double>() << ", but source "
                          << o->source << " corresponds to lambda=" << expected << '\n';
              }
            }

            const FeatureHasher hasher(o->feature_dim);
            std::map<std::string, FeatureVector> features;
            for (const Sample& s : parse_samples(read_file(o->samples))) {
              features.emplace(s.sample_id, hasher.transform(s));
            }

            const std::vector<std::size_t> test =
                gold_holdout(samples, o->test_fraction, config.seed);
            const HoldoutRun run = train_and_predict(samples, test, features, reliabilities,
                                                     labels.size(), hasher.dimension(), config);
            const EvalReport report =
                evaluate(run.test_probabilities, run.test_gold, labels.size());

            nlohmann::ordered_json out =
                nlohmann::ordered_json::parse(eval_report_json(report, labels));
            out["config"] = {
                {"label_mode", std::string(label_mode_name(config.label_mode))},
                {"weighting", std::string(weighting_name(config.weighting))},
                {"reliability_source",
                 std::string(reliability_source_name(config.reliability_source))},
                {"epochs", config.epochs},
                {"learning_rate", config.learning_rate},
                {"l2", config.l2},
                {"seed", config.seed},
                {"test_fraction", o->test_fraction},
                {"feature_dim", hasher.dimension()}};
            out["n_train"] = samples.size() - test.size();
            write_output(o->output, out.dump(2) + "\n");

            if (!o->trace.empty()) {
              std::string csv = "epoch,loss\n";
              const auto& trace = run.trained.loss_trace;
              for (std::size_t e = 0; e < trace.size(); ++e) {
                csv += std::to_string(e + 1) + "," + format_double(trace[e]) + "\n";
              }
              write_output(o->trace, csv);
            }
          }};
}

// --- simulate / recover -----------------------------------------------------

Command simulate_command(CLI::App& app) {
  struct Options {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string annotations;
    std::string ground_truth;
    std::string samples;
    std::string plan;
    std::string scenario_out;
  };
  auto o = std::make_shared<Options>();
  CLI::App* sub = app.add_subcommand(
      "simulate", "Synthetic campaign with known ground truth and annotator accuracy");
  sub->add_option("--scenario", o->scenario,
                  "Scenario JSON (default: six annotators, accuracies 0.95 .. 0.60)")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", o->seed, "Random seed (overrides the scenario's)")->required();
  sub->add_option("--annotations", o->annotations, "Output annotation CSV")->required();
  sub->add_option("--ground-truth", o->ground_truth, "Output sample_id,label CSV")
      ->required();
  sub->add_option("--samples", o->samples, "Output sample CSV with synthetic texts");
  sub->add_option("--plan", o->plan, "Output distribution plan JSON");
  sub->add_option("--write-scenario", o->scenario_out, "Output the scenario used, as JSON");

  return {sub, [o] {
            SimScenario scenario = load_scenario(o->scenario);
            scenario.seed = o->seed;
            const SimulationResult sim = simulate_campaign(scenario);
            write_output(o->annotations, write_annotations_csv(sim.store));
            write_output(o->ground_truth,
                         write_ground_truth_csv(sim.ground_truth, scenario.label_set));
            if (!o->samples.empty()) write_output(o->samples, write_samples_csv(sim.samples));
            if (!o->plan.empty()) write_output(o->plan, plan_to_json(sim.plan));
            if (!o->scenario_out.empty()) {
              write_output(o->scenario_out, scenario_to_json(scenario));
            }
          }};
}

Command recover_command(CLI::App& app) {
  struct Options {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    int trials = 1;
    std::string reliability;
    ReliabilityFlags flags;
    std::string output;
  };
  auto o = std::make_shared<Options>();
  CLI::App* sub = app.add_subcommand(
      "recover", "Rank correlation between estimated reliability and true accuracy");
  sub->add_option("--scenario", o->scenario, "Scenario JSON (default: standard scenario)")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", o->seed, "Seed of the first simulated campaign");
  sub->add_option("--trials", o->trials, "Campaigns to simulate, seeds seed .. seed+trials-1")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--reliability", o->reliability,
                  "Score an existing reliability report instead of simulating")
      ->check(CLI::ExistingFile);
  add_reliability_flags(sub, o->flags);
  sub->add_option("--output,-o", o->output, "Result JSON (default stdout)");

  return {sub, [o] {
            const SimScenario base = load_scenario(o->scenario);
            nlohmann::ordered_json out;
            if (!o->reliability.empty()) {
              const double rho = evaluate_recovery(
                  parse_reliability_report(read_file(o->reliability)), base);
              out["rho"] = rho;
              write_output(o->output, out.dump(2) + "\n");
              std::cerr << "rho=" << rho << '\n';
              return;
            }
            if (!o->seed) throw UsageError("recover needs --seed or --reliability");

            const ReliabilityConfig config = o->flags.config();
            nlohmann::ordered_json runs = nlohmann::ordered_json::array();
            double sum = 0.0;
            int at_least = 0;
            for (int t = 0; t < o->trials; ++t) {
              SimScenario scenario = base;
              scenario.seed = *o->seed + static_cast<std::uint64_t>(t);
              const RecoveryRun run = run_recovery(scenario, config);
              sum += run.rho;
              at_least += run.rho >= 0.9 ? 1 : 0;
              runs.push_back({{"seed", scenario.seed},
                              {"rho", run.rho},
                              {"iterations", run.reliability.iterations},
                              {"converged", run.reliability.converged},
                              {"reliabilities", run.reliability.reliabilities}});
            }
            out["runs"] = std::move(runs);
            out["mean_rho"] = sum / o->trials;
            out["share_rho_at_least_0_9"] = static_cast<double>(at_least) / o->trials;
            write_output(o->output, out.dump(2) + "\n");
            std::cerr << "mean rho=" << sum / o->trials << ", " << at_least << "/" << o->trials
                      << " runs with rho >= 0.9\n";
          }};
}

}  // namespace

std::vector<Command> register_commands(CLI::App& app) {
  return {distribute_command(app), reliability_command(app), graph_command(app),
          labels_command(app),     gold_command(app),        train_command(app),
          simulate_command(app),   recover_command(app)};
}

}  // namespace effiara::cli

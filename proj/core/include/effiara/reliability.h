#ifndef EFFIARA_RELIABILITY_H_
#define EFFIARA_RELIABILITY_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "effiara/types.h"

namespace effiara {

struct AnnotatorNode {
  std::optional<double> intra_agreement;  // absent without re-annotations
  double inter_agreement = 0.0;           // last e(A_i) evaluated
  double reliability = 1.0;
};

struct AgreementEdge {
  double agreement = 0.0;
  std::size_t sample_count = 0;
};

// Undirected annotator graph: nodes are annotators, an edge joins two
// annotators that double-annotated at least one sample. Edge keys are ordered
// pairs with first < second.
class AnnotatorGraph {
 public:
  using EdgeKey = std::pair<std::string, std::string>;

  AnnotatorGraph() = default;

  static EdgeKey edge_key(std::string_view a, std::string_view b);

  void add_node(const std::string& id, std::optional<double> intra_agreement);
  // Both endpoints must exist already.
  void add_edge(std::string_view a, std::string_view b, double agreement,
                std::size_t sample_count);

  const std::map<std::string, AnnotatorNode>& nodes() const { return nodes_; }
  const std::map<EdgeKey, AgreementEdge>& edges() const { return edges_; }

  const AnnotatorNode& node(std::string_view id) const;
  AnnotatorNode& node(std::string_view id);
  bool has_node(std::string_view id) const { return nodes_.contains(std::string(id)); }

  // Neighbour id -> edge, for one annotator.
  std::map<std::string, const AgreementEdge*> links(std::string_view id) const;
  std::size_t degree(std::string_view id) const;

  std::map<std::string, double> reliabilities() const;

 private:
  std::map<std::string, AnnotatorNode> nodes_;
  std::map<EdgeKey, AgreementEdge> edges_;
};

// One node per annotator; one edge per pair sharing first-phase samples,
// weighted by pairwise_agreement(); intra agreement where re-annotations exist.
// Reliabilities start at 1.0. Throws ValidationError when fewer than two
// annotators are present or an annotator ends up without edges.
AnnotatorGraph build_graph(const AnnotationStore& store);

// e(A_i): mean agreement over incident edges. With `weighted`, each edge is
// scaled by the neighbour's current reliability.
double inter_agreement(const AnnotatorGraph& graph, std::string_view annotator,
                       bool weighted);

enum class ReliabilityMode { kSinglePass, kIterative };

struct ReliabilityConfig {
  double lambda = 0.5;  // weight on intra agreement, in [0, 1]
  ReliabilityMode mode = ReliabilityMode::kIterative;
  bool use_weighted_inter = true;
  double tolerance = 1e-6;
  int max_iterations = 100;

  void validate() const;
};

struct ReliabilityResult {
  std::map<std::string, double> reliabilities;
  int iterations = 0;
  // Max per-annotator change of the last step < tolerance. A non-converged
  // iterative run still returns its last iterate.
  bool converged = false;
};

// r(A_i) = lambda * intra_i + (1 - lambda) * e(A_i), divided by the mean over
// annotators so the scores average 1.0. Iterative mode repeats the step,
// evaluating the weighted e() with the previous step's reliabilities (Jacobi
// order), until the largest change is below tolerance or max_iterations is
// hit. The first step starts from the graph's current reliabilities (1.0 for
// a freshly built graph). Node reliabilities and inter agreements are written
// back into `graph`.
//
// Throws ValidationError if lambda > 0 and a node lacks intra agreement, or if
// any raw score is <= 0 (normalisation assumes positive reliabilities).
ReliabilityResult compute_reliability(AnnotatorGraph& graph,
                                      const ReliabilityConfig& config);

// Undirected DOT rendering. Node labels carry reliability and (when present)
// intra agreement, edge labels the agreement, all to three decimals.
std::string export_dot(const AnnotatorGraph& graph);

// {"annotators": {id: {"inter", "intra", "reliability"}}, "config": {...},
//  "iterations": m, "converged": b}. "intra" is null when absent.
std::string reliability_report_json(const AnnotatorGraph& graph,
                                    const ReliabilityConfig& config,
                                    const ReliabilityResult& result);

// Reads the "reliability" field of every annotator from a report.
std::map<std::string, double> parse_reliability_report(std::string_view json_text);

std::string_view mode_name(ReliabilityMode mode);
std::optional<ReliabilityMode> parse_mode(std::string_view text);

}  // namespace effiara

#endif  // EFFIARA_RELIABILITY_H_

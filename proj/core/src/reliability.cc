#include "effiara/reliability.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "effiara/agreement.h"
#include "effiara/errors.h"
#include "json.hpp"

namespace effiara {

namespace {

std::string fixed3(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  return buf;
}

bool is_dot_identifier(std::string_view id) {
  if (id.empty() || std::isdigit(static_cast<unsigned char>(id.front()))) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string dot_id(std::string_view id) {
  if (is_dot_identifier(id)) return std::string(id);
  std::string out = "\"";
  for (const char c : id) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

AnnotatorGraph::EdgeKey AnnotatorGraph::edge_key(std::string_view a, std::string_view b) {
  if (b < a) std::swap(a, b);
  return {std::string(a), std::string(b)};
}

void AnnotatorGraph::add_node(const std::string& id,
                              std::optional<double> intra_agreement) {
  AnnotatorNode node;
  node.intra_agreement = intra_agreement;
  if (!nodes_.emplace(id, node).second) {
    throw ValidationError("duplicate annotator node '" + id + "'");
  }
}

void AnnotatorGraph::add_edge(std::string_view a, std::string_view b, double agreement,
                              std::size_t sample_count) {
  if (a == b) throw ValidationError("self-loop on annotator '" + std::string(a) + "'");
  if (!has_node(a) || !has_node(b)) {
    throw ValidationError("edge endpoint missing: " + std::string(a) + " -- " +
                          std::string(b));
  }
  edges_[edge_key(a, b)] = AgreementEdge{agreement, sample_count};
}

const AnnotatorNode& AnnotatorGraph::node(std::string_view id) const {
  const auto it = nodes_.find(std::string(id));
  if (it == nodes_.end()) {
    throw ValidationError("unknown annotator '" + std::string(id) + "'");
  }
  return it->second;
}

AnnotatorNode& AnnotatorGraph::node(std::string_view id) {
  return const_cast<AnnotatorNode&>(std::as_const(*this).node(id));
}

std::map<std::string, const AgreementEdge*> AnnotatorGraph::links(
    std::string_view id) const {
  std::map<std::string, const AgreementEdge*> out;
  for (const auto& [key, edge] : edges_) {
    if (key.first == id) out.emplace(key.second, &edge);
    if (key.second == id) out.emplace(key.first, &edge);
  }
  return out;
}

std::size_t AnnotatorGraph::degree(std::string_view id) const {
  return links(id).size();
}

std::map<std::string, double> AnnotatorGraph::reliabilities() const {
  std::map<std::string, double> out;
  for (const auto& [id, node] : nodes_) out.emplace(id, node.reliability);
  return out;
}

AnnotatorGraph build_graph(const AnnotationStore& store) {
  const auto& annotators = store.annotator_ids();
  if (annotators.size() < 2) {
    throw ValidationError("reliability needs at least 2 annotators, found " +
                          std::to_string(annotators.size()));
  }

  AnnotatorGraph graph;
  for (const std::string& id : annotators) {
    std::optional<double> intra;
    const std::vector<LabelPair> own = paired_labels(store, id, id);
    if (!own.empty()) intra = krippendorff_alpha_nominal(own);
    graph.add_node(id, intra);
  }

  std::map<AnnotatorGraph::EdgeKey, std::vector<LabelPair>> shared;
  for (const std::string& sample : store.sample_ids()) {
    const auto firsts = store.first_phase(sample);
    for (std::size_t i = 0; i < firsts.size(); ++i) {
      for (std::size_t j = i + 1; j < firsts.size(); ++j) {
        const Annotation* x = firsts[i];
        const Annotation* y = firsts[j];
        if (y->annotator_id < x->annotator_id) std::swap(x, y);
        shared[AnnotatorGraph::edge_key(x->annotator_id, y->annotator_id)]
            .emplace_back(x->primary, y->primary);
      }
    }
  }
  for (const auto& [key, pairs] : shared) {
    graph.add_edge(key.first, key.second, krippendorff_alpha_nominal(pairs),
                   pairs.size());
  }
  for (const std::string& id : annotators) {
    if (graph.degree(id) == 0) {
      throw ValidationError("annotator '" + id +
                            "' shares no double-annotated samples; inter agreement "
                            "is undefined");
    }
  }
  return graph;
}

double inter_agreement(const AnnotatorGraph& graph, std::string_view annotator,
                       bool weighted) {
  graph.node(annotator);  // throws for unknown ids
  const auto links = graph.links(annotator);
  if (links.empty()) {
    throw ValidationError("annotator '" + std::string(annotator) + "' has no edges");
  }
  double sum = 0.0;
  for (const auto& [neighbour, edge] : links) {
    const double scale = weighted ? graph.node(neighbour).reliability : 1.0;
    sum += scale * edge->agreement;
  }
  return sum / static_cast<double>(links.size());
}

void ReliabilityConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("lambda must lie in [0, 1]");
  }
  if (!(tolerance > 0.0)) throw ValidationError("tolerance must be > 0");
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
}

ReliabilityResult compute_reliability(AnnotatorGraph& graph,
                                      const ReliabilityConfig& config) {
  config.validate();
  if (graph.nodes().empty()) throw ValidationError("empty annotator graph");
  if (config.lambda > 0.0) {
    for (const auto& [id, node] : graph.nodes()) {
      if (!node.intra_agreement) {
        throw ValidationError("annotator '" + id +
                              "' has no re-annotations but lambda > 0 needs intra "
                              "agreement");
      }
    }
  }

  const int max_steps =
      config.mode == ReliabilityMode::kSinglePass ? 1 : config.max_iterations;
  ReliabilityResult result;
  for (int step = 1; step <= max_steps; ++step) {
    // Jacobi step: every e() below sees the previous reliabilities.
    std::map<std::string, double> inter;
    std::map<std::string, double> raw;
    for (const auto& [id, node] : graph.nodes()) {
      inter[id] = inter_agreement(graph, id, config.use_weighted_inter);
      const double intra = node.intra_agreement.value_or(0.0);
      raw[id] = config.lambda * intra + (1.0 - config.lambda) * inter[id];
    }
    double mean = 0.0;
    for (const auto& [id, value] : raw) {
      if (!(value > 0.0)) {
        throw ValidationError("raw reliability of annotator '" + id + "' is " +
                              std::to_string(value) +
                              "; normalisation requires positive scores");
      }
      mean += value;
    }
    mean /= static_cast<double>(raw.size());

    double max_change = 0.0;
    for (const auto& [id, value] : raw) {
      AnnotatorNode& node = graph.node(id);
      const double next = value / mean;
      max_change = std::max(max_change, std::abs(next - node.reliability));
      node.reliability = next;
      node.inter_agreement = inter[id];
    }
    result.iterations = step;
    result.converged = max_change < config.tolerance;
    if (result.converged) break;
  }
  result.reliabilities = graph.reliabilities();
  return result;
}

std::string export_dot(const AnnotatorGraph& graph) {
  std::string out = "graph effiara {\n";
  for (const auto& [id, node] : graph.nodes()) {
    std::string label = id + "\\nR=" + fixed3(node.reliability);
    if (node.intra_agreement) label += "\\nintra=" + fixed3(*node.intra_agreement);
    std::string escaped;
    for (const char c : label) {
      if (c == '"') escaped += '\\';
      escaped += c;
    }
    out += "  " + dot_id(id) + " [label=\"" + escaped + "\"];\n";
  }
  for (const auto& [key, edge] : graph.edges()) {
    out += "  " + dot_id(key.first) + " -- " + dot_id(key.second) + " [label=\"" +
           fixed3(edge.agreement) + "\"];\n";
  }
  out += "}\n";
  return out;
}

std::string_view mode_name(ReliabilityMode mode) {
  return mode == ReliabilityMode::kSinglePass ? "single" : "iterative";
}

std::optional<ReliabilityMode> parse_mode(std::string_view text) {
  if (text == "single" || text == "single_pass") return ReliabilityMode::kSinglePass;
  if (text == "iterative") return ReliabilityMode::kIterative;
  return std::nullopt;
}

std::string reliability_report_json(const AnnotatorGraph& graph,
                                    const ReliabilityConfig& config,
                                    const ReliabilityResult& result) {
  nlohmann::ordered_json report;
  nlohmann::ordered_json annotators = nlohmann::ordered_json::object();
  for (const auto& [id, node] : graph.nodes()) {
    nlohmann::ordered_json entry;
    entry["inter"] = node.inter_agreement;
    entry["intra"] = node.intra_agreement ? nlohmann::ordered_json(*node.intra_agreement)
                                          : nlohmann::ordered_json(nullptr);
    entry["reliability"] = node.reliability;
    annotators[id] = std::move(entry);
  }
  report["annotators"] = std::move(annotators);
  report["config"] = {{"lambda", config.lambda},
                      {"mode", std::string(mode_name(config.mode))},
                      {"weighted_inter", config.use_weighted_inter},
                      {"tolerance", config.tolerance},
                      {"max_iterations", config.max_iterations}};
  report["iterations"] = result.iterations;
  report["converged"] = result.converged;
  return report.dump(2) + "\n";
}

std::map<std::string, double> parse_reliability_report(std::string_view json_text) {
  nlohmann::json report;
  try {
    report = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("reliability report: ") + e.what());
  }
  if (!report.contains("annotators") || !report["annotators"].is_object()) {
    throw ValidationError("reliability report: missing 'annotators' object");
  }
  std::map<std::string, double> out;
  for (const auto& [id, entry] : report["annotators"].items()) {
    if (!entry.contains("reliability") || !entry["reliability"].is_number()) {
      throw ValidationError("reliability report: annotator '" + id +
                            "' has no numeric 'reliability'");
    }
    out.emplace(id, entry["reliability"].get<double>());
  }
  return out;
}

}  // namespace effiara

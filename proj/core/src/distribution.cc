#include "effiara/distribution.h"

#include <cmath>
#include <set>

#include "effiara/errors.h"
#include "effiara/random.h"
#include "json.hpp"

namespace effiara {

namespace {

constexpr double kRoundingGuard = 1e-9;

long round_half_up(double x) { return static_cast<long>(std::floor(x + 0.5 + kRoundingGuard)); }

// Draws from a pool without replacement by growing a shuffled prefix.
class PoolSampler {
 public:
  PoolSampler(std::vector<std::string> pool, Rng& rng) : pool_(std::move(pool)), rng_(rng) {}

  std::vector<std::string> draw(long count) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
      const std::size_t j =
          next_ + static_cast<std::size_t>(rng_.uniform_index(pool_.size() - next_));
      std::swap(pool_[next_], pool_[j]);
      out.push_back(pool_[next_++]);
    }
    return out;
  }

 private:
  std::vector<std::string> pool_;
  std::size_t next_ = 0;
  Rng& rng_;
};

nlohmann::ordered_json params_json(const CampaignParams& p) {
  return {{"num_annotators", p.num_annotators},
          {"time_per_annotator", p.time_per_annotator},
          {"annotation_rate", p.annotation_rate},
          {"double_prop", p.double_prop},
          {"reanno_prop", p.reanno_prop},
          {"max_confidence", p.max_confidence}};
}

}  // namespace

long compute_sample_count(const CampaignParams& params) {
  params.validate();
  const double d = params.double_prop;
  const double r = params.reanno_prop;
  const double per_unique = 2.0 * d + (1.0 + r) * (1.0 - d);
  const double k = params.annotation_rate * params.time_per_annotator *
                   params.num_annotators / per_unique;
  const long floored = static_cast<long>(std::floor(k + kRoundingGuard));
  if (floored <= 0) throw ValidationError("campaign budget yields no samples");
  return floored;
}

ProjectSizes project_sizes(const CampaignParams& params, long k) {
  const double n = params.num_annotators;
  ProjectSizes sizes;
  sizes.double_project = round_half_up(params.double_prop * k / (2.0 * n));
  sizes.single_project = round_half_up((1.0 - params.double_prop) * k / n);
  sizes.reannotation = round_half_up(params.reanno_prop * sizes.single_project);
  return sizes;
}

std::vector<std::string> default_annotator_ids(int n) {
  std::vector<std::string> ids;
  for (int i = 1; i <= n; ++i) ids.push_back("a" + std::to_string(i));
  return ids;
}

DistributionPlan allocate_samples(std::span<const std::string> sample_ids,
                                  const CampaignParams& params, std::uint64_t seed,
                                  std::vector<std::string> annotator_ids) {
  params.validate();
  const int n = params.num_annotators;
  if (annotator_ids.empty()) annotator_ids = default_annotator_ids(n);
  if (static_cast<int>(annotator_ids.size()) != n) {
    throw ValidationError("expected " + std::to_string(n) + " annotator ids, got " +
                          std::to_string(annotator_ids.size()));
  }
  if (std::set<std::string>(annotator_ids.begin(), annotator_ids.end()).size() !=
      annotator_ids.size()) {
    throw ValidationError("annotator ids must be distinct");
  }
  if (std::set<std::string>(sample_ids.begin(), sample_ids.end()).size() !=
      sample_ids.size()) {
    throw ValidationError("sample pool contains duplicate ids");
  }

  DistributionPlan plan;
  plan.params = params;
  plan.seed = seed;
  plan.k = compute_sample_count(params);
  plan.sizes = project_sizes(params, plan.k);
  plan.annotator_order = annotator_ids;

  const long needed = n * (2 * plan.sizes.double_project + plan.sizes.single_project);
  const long pool = static_cast<long>(sample_ids.size());
  if (pool < plan.k || pool < needed) {
    throw ValidationError("sample pool has " + std::to_string(pool) +
                          " ids but the campaign needs k = " + std::to_string(plan.k) +
                          " unique samples (" + std::to_string(needed) +
                          " after per-project rounding)");
  }

  for (const auto& id : annotator_ids) plan.annotators[id];

  Rng rng = Rng::stream(seed, {0});
  PoolSampler sampler({sample_ids.begin(), sample_ids.end()}, rng);
  for (int i = 0; i < n; ++i) {
    const std::string& self = annotator_ids[i];
    for (const int offset : {1, 2}) {
      const std::string& partner = annotator_ids[(i + offset) % n];
      std::vector<std::string> shared = sampler.draw(plan.sizes.double_project);
      plan.annotators[partner].doubles[self] = shared;
      plan.annotators[self].doubles[partner] = std::move(shared);
    }
    AnnotatorProjects& projects = plan.annotators[self];
    projects.single = sampler.draw(plan.sizes.single_project);

    std::vector<std::string> candidates = projects.single;
    const auto count = static_cast<std::size_t>(plan.sizes.reannotation);
    rng.partial_shuffle(candidates, count);
    projects.reannotate.assign(candidates.begin(),
                               candidates.begin() + static_cast<long>(count));
  }
  return plan;
}

PlanReport verify_plan(const DistributionPlan& plan) {
  PlanReport report;
  const auto fail = [&report](std::string message) {
    report.ok = false;
    report.violations.push_back(std::move(message));
  };

  const CampaignParams& params = plan.params;
  const auto n = static_cast<int>(plan.annotator_order.size());
  if (n != params.num_annotators) {
    fail("ring has " + std::to_string(n) + " annotators, params say " +
         std::to_string(params.num_annotators));
  }
  if (n < 5) fail("ring construction needs at least 5 annotators");
  if (static_cast<int>(plan.annotators.size()) != n) {
    fail("annotator map size differs from ring order");
  }

  // sample -> owning group ("single:a" or "double:a|b")
  std::map<std::string, std::string> owner;
  const auto claim = [&](const std::string& sample, const std::string& group) {
    const auto [it, inserted] = owner.emplace(sample, group);
    if (!inserted && it->second != group) {
      fail("sample '" + sample + "' appears in " + it->second + " and " + group);
    }
  };

  for (int i = 0; i < n; ++i) {
    const std::string& self = plan.annotator_order[i];
    const auto found = plan.annotators.find(self);
    if (found == plan.annotators.end()) {
      fail("annotator '" + self + "' has no projects");
      continue;
    }
    const AnnotatorProjects& projects = found->second;

    if (n >= 5) {
      std::set<std::string> expected;
      for (const int offset : {1, 2, n - 1, n - 2}) {
        expected.insert(plan.annotator_order[(i + offset) % n]);
      }
      std::set<std::string> actual;
      for (const auto& [partner, samples] : projects.doubles) actual.insert(partner);
      if (actual != expected) {
        fail("annotator '" + self + "' is not paired with its ring neighbours i±1, i±2");
      }
    }

    std::set<std::string> single_set;
    for (const auto& sample : projects.single) {
      if (!single_set.insert(sample).second) {
        fail("sample '" + sample + "' repeated in single project of '" + self + "'");
      }
      claim(sample, "single:" + self);
    }
    std::set<std::string> re_set;
    for (const auto& sample : projects.reannotate) {
      if (!single_set.contains(sample)) {
        fail("re-annotation '" + sample + "' of '" + self +
             "' is not in its single project");
      }
      if (!re_set.insert(sample).second) {
        fail("sample '" + sample + "' repeated in re-annotation set of '" + self + "'");
      }
    }

    long workload = static_cast<long>(projects.single.size() + projects.reannotate.size());
    for (const auto& [partner, samples] : projects.doubles) {
      workload += static_cast<long>(samples.size());
      const auto other = plan.annotators.find(partner);
      if (other == plan.annotators.end() || !other->second.doubles.contains(self) ||
          other->second.doubles.at(self) != samples) {
        fail("double project " + self + "|" + partner + " is not mirrored by '" +
             partner + "'");
      }
      const std::string group =
          "double:" + std::min(self, partner) + "|" + std::max(self, partner);
      std::set<std::string> seen;
      for (const auto& sample : samples) {
        if (!seen.insert(sample).second) {
          fail("sample '" + sample + "' repeated in " + group);
        }
        claim(sample, group);
      }
      if (static_cast<long>(samples.size()) != plan.sizes.double_project) {
        fail(group + " has " + std::to_string(samples.size()) + " samples, expected " +
             std::to_string(plan.sizes.double_project));
      }
    }
    if (static_cast<long>(projects.single.size()) != plan.sizes.single_project) {
      fail("single project of '" + self + "' has " +
           std::to_string(projects.single.size()) + " samples, expected " +
           std::to_string(plan.sizes.single_project));
    }
    if (static_cast<long>(projects.reannotate.size()) != plan.sizes.reannotation) {
      fail("re-annotation set of '" + self + "' has " +
           std::to_string(projects.reannotate.size()) + " samples, expected " +
           std::to_string(plan.sizes.reannotation));
    }
    report.workload[self] = workload;
  }

  // Per-annotator rounding bound: single 0.5, re-annotation 0.5 + 0.5 r,
  // four double projects 0.5 each, plus the floor on k spread over rho t / k.
  const double budget = params.annotation_rate * params.time_per_annotator;
  const double slack =
      3.0 + 0.5 * params.reanno_prop + (plan.k > 0 ? budget / plan.k : budget);
  for (const auto& [id, workload] : report.workload) {
    if (std::abs(static_cast<double>(workload) - budget) > slack) {
      fail("workload of '" + id + "' is " + std::to_string(workload) +
           ", budget is " + std::to_string(budget));
    }
  }
  report.unique_samples = static_cast<long>(owner.size());
  return report;
}

std::string plan_to_json(const DistributionPlan& plan) {
  nlohmann::ordered_json out;
  out["params"] = params_json(plan.params);
  out["k"] = plan.k;
  out["seed"] = plan.seed;
  nlohmann::ordered_json annotators = nlohmann::ordered_json::object();
  for (const auto& id : plan.annotator_order) {
    const auto it = plan.annotators.find(id);
    if (it == plan.annotators.end()) continue;
    nlohmann::ordered_json doubles = nlohmann::ordered_json::object();
    for (const auto& [partner, samples] : it->second.doubles) doubles[partner] = samples;
    annotators[id] = {{"single", it->second.single},
                      {"reannotate", it->second.reannotate},
                      {"double", std::move(doubles)}};
  }
  out["annotators"] = std::move(annotators);

  const long budget = static_cast<long>(
      std::lround(plan.params.annotation_rate * plan.params.time_per_annotator));
  out["metadata"] = {
      {"ring_order", plan.annotator_order},
      {"double_project_size", plan.sizes.double_project},
      {"single_project_size", plan.sizes.single_project},
      {"reannotation_size", plan.sizes.reannotation},
      {"annotations_per_annotator", budget},
      {"notes",
       {"double_project_size = round(d*k/(2n)). For n=6, t=10, rho=60, d=1/3, r=1/2 "
        "(k=2160) this gives 60; a figure of 80 quoted for that campaign is "
        "inconsistent with the formula, and only 60 fills the 600-annotation "
        "budget (240 single + 120 re-annotation + 4 x 60 double).",
        "Re-annotations are meant to be collected after a gap (two weeks in the "
        "reference campaign) following the first phase; the plan does not "
        "schedule this."}}};
  return out.dump(2) + "\n";
}

DistributionPlan plan_from_json(std::string_view json_text) {
  DistributionPlan plan;
  try {
    const auto in = nlohmann::ordered_json::parse(json_text);
    const auto& p = in.at("params");
    plan.params.num_annotators = p.at("num_annotators").get<int>();
    plan.params.time_per_annotator = p.at("time_per_annotator").get<double>();
    plan.params.annotation_rate = p.at("annotation_rate").get<double>();
    plan.params.double_prop = p.at("double_prop").get<double>();
    plan.params.reanno_prop = p.at("reanno_prop").get<double>();
    plan.params.max_confidence = p.value("max_confidence", 5);
    plan.k = in.at("k").get<long>();
    plan.seed = in.at("seed").get<std::uint64_t>();
    for (const auto& [id, entry] : in.at("annotators").items()) {
      AnnotatorProjects projects;
      projects.single = entry.at("single").get<std::vector<std::string>>();
      projects.reannotate = entry.at("reannotate").get<std::vector<std::string>>();
      for (const auto& [partner, samples] : entry.at("double").items()) {
        projects.doubles[partner] = samples.get<std::vector<std::string>>();
      }
      plan.annotators.emplace(id, std::move(projects));
      plan.annotator_order.push_back(id);
    }
    if (in.contains("metadata") && in["metadata"].contains("ring_order")) {
      plan.annotator_order =
          in["metadata"]["ring_order"].get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("plan JSON: ") + e.what());
  }
  plan.sizes = project_sizes(plan.params, plan.k);
  return plan;
}

}  // namespace effiara

#ifndef EFFIARA_DISTRIBUTION_H_
#define EFFIARA_DISTRIBUTION_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effiara/types.h"

namespace effiara {

// Rounded project sizes of one campaign.
struct ProjectSizes {
  long double_project = 0;  // round(d k / (2 n)), one per ring edge
  long single_project = 0;  // round((1 - d) k / n)
  long reannotation = 0;    // round(r * single_project)

  bool operator==(const ProjectSizes&) const = default;
};

struct AnnotatorProjects {
  std::vector<std::string> single;
  std::vector<std::string> reannotate;  // subset of single
  // Partner id -> samples shared with that partner. Each double project is
  // listed under both of its annotators.
  std::map<std::string, std::vector<std::string>> doubles;

  bool operator==(const AnnotatorProjects&) const = default;
};

struct DistributionPlan {
  CampaignParams params;
  long k = 0;
  std::uint64_t seed = 0;
  ProjectSizes sizes;
  // Ring order: annotator i double-annotates with i+1 and i+2 (mod n).
  std::vector<std::string> annotator_order;
  std::map<std::string, AnnotatorProjects> annotators;

  bool operator==(const DistributionPlan&) const = default;
};

// Unique samples k = floor(rho t n / (2d + (1 + r)(1 - d))). A 1e-9 guard
// keeps values such as 2159.9999999 (from d = 1/3) at 2160.
long compute_sample_count(const CampaignParams& params);

// Half-up rounding of every project size for a given k.
ProjectSizes project_sizes(const CampaignParams& params, long k);

// "a1" .. "an".
std::vector<std::string> default_annotator_ids(int n);

// Assigns double, single and re-annotation projects around the annotator ring.
// For each annotator in ring order: a double project with i+1, one with i+2,
// then the single project, all drawn without replacement from the shared
// pool; the re-annotation set is drawn from that single project. Deterministic
// for a given seed and pool order. Samples left over after rounding stay
// unassigned.
//
// Throws ValidationError when the parameters are invalid, the pool holds
// duplicate ids, or the pool is smaller than what the plan needs.
DistributionPlan allocate_samples(std::span<const std::string> sample_ids,
                                  const CampaignParams& params, std::uint64_t seed,
                                  std::vector<std::string> annotator_ids = {});

struct PlanReport {
  bool ok = true;
  std::vector<std::string> violations;
  // singles + re-annotations + incident double projects, per annotator.
  std::map<std::string, long> workload;
  long unique_samples = 0;
};

// Checks ring structure, double-project symmetry, that no sample is in two
// project groups, reannotate within single, project sizes, and that every
// workload is rho * t up to rounding. Never throws.
PlanReport verify_plan(const DistributionPlan& plan);

// Plan JSON with the parameters, k, seed, per-annotator projects and a
// metadata block (project sizes, ring order, operational notes).
std::string plan_to_json(const DistributionPlan& plan);
DistributionPlan plan_from_json(std::string_view json_text);

}  // namespace effiara

#endif  // EFFIARA_DISTRIBUTION_H_

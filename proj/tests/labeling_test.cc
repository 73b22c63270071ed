#include "effiara/labeling.h"

#include <cmath>
#include <random>

#include "effiara/errors.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace effiara {
namespace {

using testing::make_store;
using testing::Row;

constexpr LabelIndex kMisinfo = 0;
constexpr LabelIndex kDebunk = 1;
constexpr LabelIndex kOther = 2;

Annotation annotation(LabelIndex primary, int confidence,
                      std::optional<LabelIndex> secondary = std::nullopt) {
  return Annotation{"s", "x", Phase::kFirst, primary, confidence, secondary};
}

void expect_probs(const SoftLabel& label, std::vector<double> expected, double tol = 1e-12) {
  ASSERT_EQ(label.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(label[i], expected[i], tol) << "index " << i;
  }
}

TEST(ConfidenceToProbability, Endpoints) {
  EXPECT_NEAR(confidence_to_probability(5, 2, 5), 1.0, 1e-12);
  EXPECT_NEAR(confidence_to_probability(1, 2, 5), 0.5, 1e-12);
  EXPECT_NEAR(confidence_to_probability(1, 3, 5), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(confidence_to_probability(7, 4, 7), 1.0, 1e-12);
}

TEST(ConfidenceToProbability, InteriorValues) {
  EXPECT_NEAR(confidence_to_probability(3, 2, 5), 0.75, 1e-12);
  EXPECT_NEAR(confidence_to_probability(2, 3, 5), 0.5, 1e-12);
}

TEST(ConfidenceToProbability, OutOfRange) {
  EXPECT_THROW(confidence_to_probability(0, 2, 5), ValidationError);
  EXPECT_THROW(confidence_to_probability(6, 2, 5), ValidationError);
  EXPECT_THROW(confidence_to_probability(3, 1, 5), ValidationError);
}

TEST(ConfidenceToProbability, StrictlyIncreasing) {
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int max_c = 2; max_c <= 9; ++max_c) {
      for (int c = 1; c < max_c; ++c) {
        EXPECT_LT(confidence_to_probability(c, n, max_c),
                  confidence_to_probability(c + 1, n, max_c));
      }
    }
  }
}

TEST(SoftLabelFromAnnotation, BinaryCertain) {
  expect_probs(annotation_to_soft_label(annotation(0, 5), testing::binary_labels(), 5),
               {1.0, 0.0});
}

TEST(SoftLabelFromAnnotation, MinimalConfidenceWithSecondary) {
  expect_probs(annotation_to_soft_label(annotation(kMisinfo, 1, kOther),
                                        testing::three_labels(), 5),
               {1.0 / 3, 1.0 / 3, 1.0 / 3});
}

TEST(SoftLabelFromAnnotation, SecondaryTakesComplement) {
  expect_probs(annotation_to_soft_label(annotation(kMisinfo, 3, kOther),
                                        testing::three_labels(), 5),
               {2.0 / 3, 0.0, 1.0 / 3});
}

TEST(SoftLabelFromAnnotation, NoSecondarySpreadsEvenly) {
  // P(2; n=3) = 0.5, remainder split over two labels.
  expect_probs(annotation_to_soft_label(annotation(kDebunk, 2), testing::three_labels(), 5),
               {0.25, 0.5, 0.25});
}

TEST(SoftLabelFromAnnotation, SecondaryWithFourClasses) {
  const LabelSet four({"a", "b", "c", "d"});
  // P(2; n=4, MaxC=5) = 1/4 + 3/4 * 1/4 = 7/16; secondary 7/16, rest 1/16 each.
  expect_probs(annotation_to_soft_label(annotation(0, 2, 3), four, 5),
               {7.0 / 16, 1.0 / 16, 1.0 / 16, 7.0 / 16});
}

TEST(SoftLabelProperties, ValidDistributionAndSecondaryBelowPrimary) {
  std::mt19937 gen(31);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + gen() % 5;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("c" + std::to_string(i));
    const LabelSet labels(names);
    const int max_c = 2 + static_cast<int>(gen() % 8);
    const LabelIndex primary = gen() % n;
    std::optional<LabelIndex> secondary;
    if (n > 2 && gen() % 2) secondary = (primary + 1 + gen() % (n - 1)) % n;
    const int c = 1 + static_cast<int>(gen() % max_c);
    const SoftLabel label = annotation_to_soft_label(annotation(primary, c, secondary),
                                                     labels, max_c);
    double sum = 0.0;
    for (const double p : label.probs()) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    for (LabelIndex i = 0; i < n; ++i) EXPECT_LE(label[i], label[primary] + 1e-12);
  }
}

TEST(SoftLabel, RejectsInvalidVectors) {
  EXPECT_THROW(SoftLabel({0.5, 0.6}), ValidationError);
  EXPECT_THROW(SoftLabel({1.5, -0.5}), ValidationError);
  EXPECT_THROW(SoftLabel({}), ValidationError);
  EXPECT_NO_THROW(SoftLabel({0.3, 0.7}));
  expect_probs(SoftLabel::one_hot(3, 2), {0, 0, 1});
}

TEST(Aggregate, EqualWeights) {
  const std::vector<WeightedSoftLabel> in = {{SoftLabel({0.75, 0.25}), 1.0},
                                             {SoftLabel({0.5, 0.5}), 1.0}};
  expect_probs(aggregate_soft_labels(in), {0.625, 0.375});
}

TEST(Aggregate, ReliabilityWeights) {
  const std::vector<WeightedSoftLabel> in = {{SoftLabel({0.75, 0.25}), 1.5},
                                             {SoftLabel({0.5, 0.5}), 0.5}};
  expect_probs(aggregate_soft_labels(in), {0.6875, 0.3125});
}

TEST(Aggregate, SingleEntryUnchanged) {
  const std::vector<WeightedSoftLabel> in = {{SoftLabel({0.9, 0.1}), 0.37}};
  expect_probs(aggregate_soft_labels(in), {0.9, 0.1}, 1e-15);
}

TEST(Aggregate, Errors) {
  EXPECT_THROW(aggregate_soft_labels({}), ValidationError);
  const std::vector<WeightedSoftLabel> zero = {{SoftLabel({0.9, 0.1}), 0.0}};
  EXPECT_THROW(aggregate_soft_labels(zero), ValidationError);
  const std::vector<WeightedSoftLabel> mismatch = {{SoftLabel({0.9, 0.1}), 1.0},
                                                   {SoftLabel({0.2, 0.3, 0.5}), 1.0}};
  EXPECT_THROW(aggregate_soft_labels(mismatch), ValidationError);
}

TEST(Aggregate, ScaleInvariant) {
  std::mt19937 gen(32);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double p = u(gen) / 3.0;
    const double q = u(gen) / 3.0;
    const double r1 = u(gen);
    const double r2 = u(gen);
    const double scale = u(gen) * 10.0;
    const std::vector<WeightedSoftLabel> a = {{SoftLabel({p, 1 - p}), r1},
                                              {SoftLabel({q, 1 - q}), r2}};
    const std::vector<WeightedSoftLabel> b = {{SoftLabel({p, 1 - p}), r1 * scale},
                                              {SoftLabel({q, 1 - q}), r2 * scale}};
    const SoftLabel x = aggregate_soft_labels(a);
    const SoftLabel y = aggregate_soft_labels(b);
    EXPECT_NEAR(x[0], y[0], 1e-12);
    EXPECT_NEAR(x[1], y[1], 1e-12);
  }
}

TEST(SoftToHard, ArgmaxWithLowestIndexTies) {
  EXPECT_EQ(soft_to_hard(SoftLabel({0.7, 0.3})), 0u);
  EXPECT_EQ(soft_to_hard(SoftLabel({0.3, 0.7})), 1u);
  EXPECT_EQ(soft_to_hard(SoftLabel({0.5, 0.5})), 0u);
  EXPECT_EQ(soft_to_hard(SoftLabel({1.0 / 3, 1.0 / 3, 1.0 / 3})), 0u);
  EXPECT_EQ(soft_to_hard(SoftLabel({0.2, 0.4, 0.4})), 1u);
}

TEST(LabelMerge, SoftLabelsSumMergedMass) {
  const LabelMerge merge =
      LabelMerge::with_identity(testing::three_labels(), {{"debunk", "other"}});
  EXPECT_EQ(merge.to().to_string(), LabelSet({"misinfo", "other"}).to_string());
  expect_probs(merge.apply(SoftLabel({0.2, 0.3, 0.5})), {0.2, 0.8});
}

TEST(LabelMerge, AnnotationCollapseDropsSecondary) {
  const LabelMerge merge =
      LabelMerge::with_identity(testing::three_labels(), {{"debunk", "other"}});
  const Annotation merged = merge.apply(annotation(kDebunk, 2, kOther));
  EXPECT_EQ(merged.primary, 1u);
  EXPECT_FALSE(merged.secondary.has_value());
  const Annotation kept = merge.apply(annotation(kDebunk, 2, kMisinfo));
  EXPECT_EQ(kept.primary, 1u);
  EXPECT_EQ(kept.secondary, std::optional<LabelIndex>(0u));
}

TEST(LabelMerge, MappingMustBeTotal) {
  EXPECT_THROW(LabelMerge(testing::three_labels(), {{"debunk", "other"}}), ValidationError);
  EXPECT_THROW(LabelMerge::with_identity(testing::three_labels(), {{"bogus", "other"}}),
               ValidationError);
}

TEST(LabelMerge, StoreAndLabeledSample) {
  const AnnotationStore store = make_store(
      testing::three_labels(), {{"s1", "x", "first", "debunk", 2, "other"},
                                {"s1", "y", "first", "other", 4, ""},
                                {"s2", "x", "first", "misinfo", 5, ""}});
  const LabelMerge merge =
      LabelMerge::with_identity(store.label_set(), parse_merge_spec("debunk=other"));
  const AnnotationStore merged = merge.apply(store);
  EXPECT_EQ(merged.label_set().size(), 2u);
  EXPECT_EQ(merged.find("s1", "x", Phase::kFirst)->primary, 1u);
  EXPECT_FALSE(merged.find("s1", "x", Phase::kFirst)->secondary.has_value());

  const auto samples = build_labeled_samples(store, {});
  const LabeledSample moved = merge.apply(samples[0]);
  EXPECT_EQ(moved.hard_label, 1u);
  EXPECT_NEAR(moved.soft_label[1], 1.0 - samples[0].soft_label[0], 1e-12);
}

TEST(LabelMerge, ArgmaxStableWhenUnmergedClassDominates) {
  std::mt19937 gen(33);
  std::gamma_distribution<double> g(1.0, 1.0);
  const LabelMerge merge =
      LabelMerge::with_identity(testing::three_labels(), {{"debunk", "other"}});
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    double a = g(gen), b = g(gen), c = g(gen);
    const double s = a + b + c;
    const SoftLabel label({a / s, b / s, 1.0 - a / s - b / s});
    if (soft_to_hard(label) != kMisinfo) continue;
    if (!(label[kMisinfo] > label[kDebunk] + label[kOther])) continue;
    ++checked;
    EXPECT_EQ(soft_to_hard(merge.apply(label)), 0u);
  }
  EXPECT_GT(checked, 100);
}

TEST(ParseMergeSpec, Pairs) {
  const auto spec = parse_merge_spec("debunk=other,foo=bar");
  EXPECT_EQ(spec.size(), 2u);
  EXPECT_EQ(spec.at("debunk"), "other");
  EXPECT_EQ(spec.at("foo"), "bar");
  EXPECT_THROW(parse_merge_spec("debunk"), ValidationError);
  EXPECT_THROW(parse_merge_spec("=x"), ValidationError);
}

TEST(Gold, BoundaryAndExclusions) {
  const AnnotationStore store = make_store(
      testing::three_labels(), {{"in", "x", "first", "misinfo", 4, ""},
                                {"in", "y", "first", "misinfo", 3, "other"},
                                {"mismatch", "x", "first", "misinfo", 4, ""},
                                {"mismatch", "y", "first", "other", 5, ""},
                                {"low", "x", "first", "misinfo", 4, ""},
                                {"low", "y", "first", "misinfo", 2, "debunk"},
                                {"single", "x", "first", "misinfo", 5, ""}});
  const auto gold = extract_gold_set(store);
  ASSERT_EQ(gold.size(), 1u);
  EXPECT_EQ(gold[0].sample_id, "in");
  EXPECT_EQ(gold[0].hard_label, kMisinfo);
  EXPECT_TRUE(gold[0].gold);
  EXPECT_THAT(gold[0].annotators, ::testing::UnorderedElementsAre("x", "y"));
}

TEST(Gold, ReannotationsNeverCount) {
  const AnnotationStore store = make_store(
      testing::three_labels(), {{"r", "x", "first", "misinfo", 5, ""},
                                {"r", "x", "re", "misinfo", 5, ""}});
  EXPECT_TRUE(extract_gold_set(store).empty());
}

TEST(BuildLabeledSamples, ReliabilityWeightedDoubles) {
  const AnnotationStore store = make_store(
      testing::binary_labels(), {{"s1", "x", "first", "misinfo", 3, ""},
                                 {"s1", "y", "first", "misinfo", 1, ""},
                                 {"s2", "x", "first", "other", 5, ""},
                                 {"s2", "x", "re", "misinfo", 5, ""}});
  const auto samples = build_labeled_samples(store, {{"x", 1.5}, {"y", 0.5}});
  ASSERT_EQ(samples.size(), 2u);
  expect_probs(samples[0].soft_label, {0.6875, 0.3125});
  EXPECT_EQ(samples[0].hard_label, 0u);
  EXPECT_FALSE(samples[0].gold);  // confidence 1 < 3
  expect_probs(samples[1].soft_label, {0.0, 1.0});
  EXPECT_EQ(samples[1].annotators, std::vector<std::string>{"x"});

  const auto unweighted = build_labeled_samples(store, {});
  expect_probs(unweighted[0].soft_label, {0.625, 0.375});
  EXPECT_THROW(build_labeled_samples(store, {{"x", 1.0}}), ValidationError);
}

TEST(LabeledJsonl, RoundTrip) {
  const AnnotationStore store = make_store(
      testing::three_labels(), {{"s1", "x", "first", "misinfo", 4, ""},
                                {"s1", "y", "first", "misinfo", 3, "other"},
                                {"s\"2", "x", "first", "debunk", 2, ""}});
  const auto samples = build_labeled_samples(store, {});
  const std::string text = labeled_to_jsonl(samples, store.label_set());
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  const auto back = labeled_from_jsonl(text, store.label_set());
  ASSERT_EQ(back.size(), samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ(back[i].sample_id, samples[i].sample_id);
    EXPECT_EQ(back[i].hard_label, samples[i].hard_label);
    EXPECT_EQ(back[i].gold, samples[i].gold);
    EXPECT_EQ(back[i].annotators, samples[i].annotators);
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_DOUBLE_EQ(back[i].soft_label[c], samples[i].soft_label[c]);
    }
  }
  EXPECT_THROW(labeled_from_jsonl("{\"sample_id\": 1}\n", store.label_set()),
               ValidationError);
}

}  // namespace
}  // namespace effiara

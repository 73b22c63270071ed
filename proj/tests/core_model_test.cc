#include <random>

#include "effiara/annotation_io.h"
#include "effiara/errors.h"
#include "effiara/types.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace effiara {
namespace {

using testing::make_store;
using testing::Row;
using testing::three_labels;
using testing::to_csv;

TEST(LabelSet, RejectsTooFewOrDuplicateLabels) {
  EXPECT_THROW(LabelSet({"only"}), ValidationError);
  EXPECT_THROW(LabelSet({"a", "b", "a"}), ValidationError);
  EXPECT_THROW(LabelSet({"a", ""}), ValidationError);
}

TEST(LabelSet, ParseTrimsAndIsCaseSensitive) {
  const LabelSet labels = LabelSet::parse(" misinfo, debunk ,other");
  EXPECT_EQ(labels.size(), 3u);
  EXPECT_EQ(labels.index_of("debunk"), 1u);
  EXPECT_FALSE(labels.find("Misinfo").has_value());
  EXPECT_EQ(labels.to_string(), "misinfo,debunk,other");
}

TEST(CampaignParams, RequiresFiveAnnotators) {
  CampaignParams params;
  params.num_annotators = 4;
  EXPECT_THROW(params.validate(), ValidationError);
  params.num_annotators = 5;
  EXPECT_NO_THROW(params.validate());
  params.annotation_rate = 0.0;
  EXPECT_THROW(params.validate(), ValidationError);
}

TEST(ParseAnnotations, ThreeValidRows) {
  const AnnotationStore store =
      make_store(three_labels(), {{"s1", "a1", "first", "misinfo", 5, ""},
                                  {"s1", "a2", "first", "other", 2, "debunk"},
                                  {"s2", "a1", "first", "debunk", 4, ""}});
  EXPECT_EQ(store.size(), 3u);
  const Annotation* a = store.find("s1", "a2", Phase::kFirst);
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->primary, 2u);
  EXPECT_EQ(a->secondary, std::optional<LabelIndex>(1u));
  EXPECT_EQ(store.annotator_ids(), (std::vector<std::string>{"a1", "a2"}));
  EXPECT_EQ(store.first_phase("s1").size(), 2u);
}

TEST(ParseAnnotations, ConfidenceOutOfRangeNamesRow) {
  const std::string csv = to_csv({{"s1", "a1", "first", "misinfo", 5, ""},
                                  {"s2", "a1", "first", "misinfo", 6, ""}});
  try {
    parse_annotations(csv, three_labels(), 5);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_NE(std::string(e.what()).find("confidence 6"), std::string::npos);
  }
}

TEST(ParseAnnotations, DuplicateTripleIsRejected) {
  const std::string csv = to_csv({{"s1", "a1", "first", "misinfo", 5, ""},
                                  {"s1", "a1", "first", "other", 4, ""}});
  try {
    parse_annotations(csv, three_labels(), 5);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(ParseAnnotations, UnknownLabelAndBadPhase) {
  EXPECT_THROW(parse_annotations(to_csv({{"s1", "a1", "first", "Misinfo", 5, ""}}),
                                 three_labels(), 5),
               ParseError);
  EXPECT_THROW(parse_annotations(to_csv({{"s1", "a1", "second", "misinfo", 5, ""}}),
                                 three_labels(), 5),
               ParseError);
  EXPECT_THROW(parse_annotations(to_csv({{"s1", "a1", "first", "misinfo", 3, "misinfo"}}),
                                 three_labels(), 5),
               ParseError);
}

TEST(ParseAnnotations, MissingColumnIsRowOne) {
  try {
    parse_annotations("sample_id,annotator_id,phase,primary_label,confidence\n",
                      three_labels(), 5);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 1u);
  }
}

TEST(ParseAnnotations, ReorderedColumnsAreAccepted) {
  const std::string csv =
      "confidence,secondary_label,primary_label,phase,annotator_id,sample_id,note\n"
      "4,,other,first,a1,s1,hello\n";
  const AnnotationStore store = parse_annotations(csv, three_labels(), 5);
  ASSERT_EQ(store.size(), 1u);
  EXPECT_EQ(store.annotations()[0].confidence, 4);
}

TEST(ParseAnnotations, MissingSecondaryAtLowConfidenceWarns) {
  std::vector<std::string> warnings;
  const AnnotationStore store = parse_annotations(
      to_csv({{"s1", "a1", "first", "misinfo", 2, ""}}), three_labels(), 5, &warnings);
  EXPECT_EQ(store.size(), 1u);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("row 2"), std::string::npos);
}

TEST(AnnotationStore, ReannotationNeedsOwnFirstPhase) {
  EXPECT_THROW(make_store(three_labels(), {{"s1", "a1", "first", "misinfo", 5, ""},
                                           {"s1", "a2", "re", "misinfo", 5, ""}}),
               ValidationError);
}

TEST(AnnotationStore, ReannotatedSampleCannotBeDoubleAnnotated) {
  EXPECT_THROW(make_store(three_labels(), {{"s1", "a1", "first", "misinfo", 5, ""},
                                           {"s1", "a2", "first", "misinfo", 5, ""},
                                           {"s1", "a1", "re", "misinfo", 5, ""}}),
               ValidationError);
}

// Random stores survive write -> parse unchanged, including ids that need
// quoting.
TEST(AnnotationStore, CsvRoundTripProperty) {
  std::mt19937 gen(42);
  const LabelSet labels = three_labels();
  const std::vector<std::string> ids = {"s1", "s,2", "s\"3\"", "s 4", "s\n5", "s6"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Annotation> annotations;
    for (std::size_t s = 0; s < ids.size(); ++s) {
      const int annotators = 1 + static_cast<int>(gen() % 2);
      for (int a = 0; a < annotators; ++a) {
        Annotation ann;
        ann.sample_id = ids[s];
        ann.annotator_id = "ann" + std::to_string((s + a) % 4);
        ann.primary = gen() % 3;
        ann.confidence = 1 + static_cast<int>(gen() % 5);
        if (gen() % 2) ann.secondary = (ann.primary + 1 + gen() % 2) % 3;
        annotations.push_back(ann);
        if (annotators == 1 && gen() % 2) {
          Annotation re = ann;
          re.phase = Phase::kReannotation;
          re.primary = gen() % 3;
          re.secondary.reset();
          annotations.push_back(re);
        }
      }
    }
    const AnnotationStore store(labels, 5, annotations);
    const AnnotationStore reparsed =
        parse_annotations(write_annotations_csv(store), labels, 5);
    EXPECT_EQ(reparsed, store);
  }
}

// Each generated row is either valid or carries exactly one violation; a
// single-row file must be rejected exactly when the row is invalid.
TEST(ParseAnnotations, RejectsExactlyTheInvalidRows) {
  std::mt19937 gen(1234);
  const LabelSet labels = three_labels();
  const std::vector<std::string> names = {"misinfo", "debunk", "other"};
  int rejected = 0;
  std::vector<Row> good_rows;
  for (int trial = 0; trial < 400; ++trial) {
    Row row{"s" + std::to_string(trial), "a" + std::to_string(trial % 7), "first",
            names[gen() % 3], 1 + static_cast<int>(gen() % 5), ""};
    if (gen() % 2) row.secondary = names[(labels.index_of(row.primary) + 1) % 3];
    const int violation = static_cast<int>(gen() % 7);
    switch (violation) {
      case 1: row.confidence = gen() % 2 ? 0 : 6; break;
      case 2: row.primary = "unknown"; break;
      case 3: row.phase = "later"; break;
      case 4: row.secondary = row.primary; break;
      case 5: row.secondary = "MISINFO"; break;
      default: break;  // 0 and 6: valid
    }
    const bool valid = violation == 0 || violation == 6;
    bool threw = false;
    try {
      parse_annotations(to_csv({row}), labels, 5);
    } catch (const ParseError& e) {
      threw = true;
      EXPECT_EQ(e.row(), 2u);
    }
    EXPECT_EQ(threw, !valid) << "trial " << trial << " violation " << violation;
    if (threw) ++rejected;
    if (valid) good_rows.push_back(row);
  }
  EXPECT_GT(rejected, 0);

  std::string all(kAnnotationHeader);
  all += '\n';
  for (const Row& r : good_rows) {
    all += csv::format_record({r.sample, r.annotator, r.phase, r.primary,
                               std::to_string(r.confidence), r.secondary});
  }
  EXPECT_EQ(parse_annotations(all, labels, 5).size(), good_rows.size());
}

TEST(ParseSamples, RequiresUniqueIds) {
  const auto samples = parse_samples("sample_id,claim_text,post_text\ns1,c,\"p, q\"\n");
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].post_text, "p, q");
  EXPECT_THROW(parse_samples("sample_id,claim_text,post_text\ns1,c,p\ns1,c,p\n"),
               ParseError);
  EXPECT_EQ(parse_samples(write_samples_csv(samples)), samples);
}

TEST(ScanLabelNames, CollectsPrimaryAndSecondary) {
  const std::string csv = to_csv({{"s1", "a1", "first", "other", 2, "debunk"},
                                  {"s2", "a1", "first", "misinfo", 5, ""}});
  EXPECT_EQ(scan_label_names(csv),
            (std::vector<std::string>{"debunk", "misinfo", "other"}));
}

}  // namespace
}  // namespace effiara

#ifndef EFFIARA_TESTS_TEST_UTIL_H_
#define EFFIARA_TESTS_TEST_UTIL_H_

#include <initializer_list>
#include <string>

#include "effiara/annotation_io.h"
#include "effiara/csv.h"
#include "effiara/types.h"

namespace effiara::testing {

struct Row {
  std::string sample;
  std::string annotator;
  std::string phase;
  std::string primary;
  int confidence;
  std::string secondary;
};

inline std::string to_csv(std::initializer_list<Row> rows) {
  std::string text(kAnnotationHeader);
  text += '\n';
  for (const Row& r : rows) {
    text += csv::format_record({r.sample, r.annotator, r.phase, r.primary,
                                std::to_string(r.confidence), r.secondary});
  }
  return text;
}

inline AnnotationStore make_store(const LabelSet& labels, std::initializer_list<Row> rows,
                                  int max_confidence = 5) {
  return parse_annotations(to_csv(rows), labels, max_confidence);
}

inline LabelSet three_labels() { return LabelSet({"misinfo", "debunk", "other"}); }
inline LabelSet binary_labels() { return LabelSet({"misinfo", "other"}); }

}  // namespace effiara::testing

#endif  // EFFIARA_TESTS_TEST_UTIL_H_

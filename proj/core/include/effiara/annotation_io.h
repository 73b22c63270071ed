#ifndef EFFIARA_ANNOTATION_IO_H_
#define EFFIARA_ANNOTATION_IO_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "effiara/types.h"

namespace effiara {

// Header of the annotation CSV, in this order.
inline constexpr std::string_view kAnnotationHeader =
    "sample_id,annotator_id,phase,primary_label,confidence,secondary_label";
inline constexpr std::string_view kSampleHeader = "sample_id,claim_text,post_text";

// Parses an annotation CSV. Columns are located by header name, so extra
// columns and reordering are tolerated. Every violated constraint raises a
// ParseError naming the row. Rows with confidence <= 3 but no secondary label
// are accepted; a note is appended to `warnings` when it is non-null.
AnnotationStore parse_annotations(std::string_view csv_text, const LabelSet& label_set,
                                  int max_confidence,
                                  std::vector<std::string>* warnings = nullptr);

// Writes the canonical six-column CSV; parse_annotations() inverts it.
std::string write_annotations_csv(const AnnotationStore& store);

// Sample ids must be unique.
std::vector<Sample> parse_samples(std::string_view csv_text);
std::string write_samples_csv(const std::vector<Sample>& samples);

// Two-column `sample_id,label` file used for simulator ground truth.
std::string write_ground_truth_csv(const std::map<std::string, LabelIndex>& truth,
                                   const LabelSet& label_set);

// Collects the distinct primary and secondary label names of an annotation
// CSV, sorted. Used when no label set is given explicitly.
std::vector<std::string> scan_label_names(std::string_view csv_text);

}  // namespace effiara

#endif  // EFFIARA_ANNOTATION_IO_H_

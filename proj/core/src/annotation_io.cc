#include "effiara/annotation_io.h"

#include <array>
#include <charconv>
#include <set>

#include "effiara/csv.h"
#include "effiara/errors.h"

namespace effiara {

namespace {

constexpr std::array<std::string_view, 6> kAnnotationColumns = {
    "sample_id", "annotator_id", "phase", "primary_label", "confidence",
    "secondary_label"};

bool is_blank(const csv::Record& record) {
  return record.size() == 1 && record[0].empty();
}

// Maps each required column name to its position in the header.
template <std::size_t N>
std::array<std::size_t, N> locate_columns(const csv::Record& header,
                                          const std::array<std::string_view, N>& names) {
  std::array<std::size_t, N> positions{};
  for (std::size_t c = 0; c < N; ++c) {
    std::size_t found = header.size();
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (header[h] == names[c]) {
        if (found != header.size()) {
          throw ParseError(1, "duplicate column '" + std::string(names[c]) + "'");
        }
        found = h;
      }
    }
    if (found == header.size()) {
      throw ParseError(1, "missing required column '" + std::string(names[c]) + "'");
    }
    positions[c] = found;
  }
  return positions;
}

std::vector<csv::Record> read_records(std::string_view csv_text) {
  std::vector<csv::Record> records = csv::parse(csv_text);
  if (records.empty()) throw ParseError(1, "missing header row");
  return records;
}

}  // namespace

AnnotationStore parse_annotations(std::string_view csv_text, const LabelSet& label_set,
                                  int max_confidence,
                                  std::vector<std::string>* warnings) {
  const std::vector<csv::Record> records = read_records(csv_text);
  const auto col = locate_columns(records[0], kAnnotationColumns);

  std::vector<Annotation> annotations;
  std::map<std::tuple<std::string, std::string, Phase>, std::size_t> seen;
  std::set<std::pair<std::string, std::string>> firsts;

  for (std::size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    const std::size_t row = r + 1;
    if (is_blank(rec)) continue;
    if (rec.size() != records[0].size()) {
      throw ParseError(row, "expected " + std::to_string(records[0].size()) +
                                " fields, found " + std::to_string(rec.size()));
    }
    Annotation a;
    a.sample_id = rec[col[0]];
    a.annotator_id = rec[col[1]];
    if (a.sample_id.empty()) throw ParseError(row, "empty sample_id");
    if (a.annotator_id.empty()) throw ParseError(row, "empty annotator_id");

    const auto phase = parse_phase(rec[col[2]]);
    if (!phase) {
      throw ParseError(row, "phase must be 'first' or 're', got '" + rec[col[2]] + "'");
    }
    a.phase = *phase;

    const auto primary = label_set.find(rec[col[3]]);
    if (!primary) throw ParseError(row, "unknown primary_label '" + rec[col[3]] + "'");
    a.primary = *primary;

    const std::string& conf_text = rec[col[4]];
    int confidence = 0;
    const auto [ptr, ec] = std::from_chars(
        conf_text.data(), conf_text.data() + conf_text.size(), confidence);
    if (ec != std::errc() || ptr != conf_text.data() + conf_text.size() ||
        conf_text.empty()) {
      throw ParseError(row, "confidence '" + conf_text + "' is not an integer");
    }
    if (confidence < 1 || confidence > max_confidence) {
      throw ParseError(row, "confidence " + std::to_string(confidence) +
                                " outside [1, " + std::to_string(max_confidence) + "]");
    }
    a.confidence = confidence;

    const std::string& secondary = rec[col[5]];
    if (!secondary.empty()) {
      const auto index = label_set.find(secondary);
      if (!index) throw ParseError(row, "unknown secondary_label '" + secondary + "'");
      if (*index == a.primary) {
        throw ParseError(row, "secondary_label equals primary_label");
      }
      a.secondary = *index;
    } else if (confidence <= 3 && warnings != nullptr && label_set.size() > 2) {
      warnings->push_back("row " + std::to_string(row) + ": confidence " +
                          std::to_string(confidence) + " without secondary_label");
    }

    const auto [it, inserted] =
        seen.emplace(std::make_tuple(a.sample_id, a.annotator_id, a.phase), row);
    if (!inserted) {
      throw ParseError(row, "duplicate (sample_id, annotator_id, phase) = (" +
                                a.sample_id + ", " + a.annotator_id + ", " +
                                std::string(phase_name(a.phase)) +
                                "), first seen at row " + std::to_string(it->second));
    }
    annotations.push_back(std::move(a));
  }
  return AnnotationStore(label_set, max_confidence, std::move(annotations));
}

std::string write_annotations_csv(const AnnotationStore& store) {
  std::string out(kAnnotationHeader);
  out += '\n';
  const LabelSet& labels = store.label_set();
  for (const Annotation& a : store.annotations()) {
    out += csv::format_record({a.sample_id, a.annotator_id,
                               std::string(phase_name(a.phase)), labels.name(a.primary),
                               std::to_string(a.confidence),
                               a.secondary ? labels.name(*a.secondary) : ""});
  }
  return out;
}

std::vector<Sample> parse_samples(std::string_view csv_text) {
  const std::vector<csv::Record> records = read_records(csv_text);
  constexpr std::array<std::string_view, 3> kColumns = {"sample_id", "claim_text",
                                                        "post_text"};
  const auto col = locate_columns(records[0], kColumns);
  std::vector<Sample> samples;
  std::set<std::string, std::less<>> ids;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    const std::size_t row = r + 1;
    if (is_blank(rec)) continue;
    if (rec.size() != records[0].size()) {
      throw ParseError(row, "expected " + std::to_string(records[0].size()) +
                                " fields, found " + std::to_string(rec.size()));
    }
    Sample s{rec[col[0]], rec[col[1]], rec[col[2]]};
    if (s.sample_id.empty()) throw ParseError(row, "empty sample_id");
    if (!ids.insert(s.sample_id).second) {
      throw ParseError(row, "duplicate sample_id '" + s.sample_id + "'");
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::string write_samples_csv(const std::vector<Sample>& samples) {
  std::string out(kSampleHeader);
  out += '\n';
  for (const Sample& s : samples) {
    out += csv::format_record({s.sample_id, s.claim_text, s.post_text});
  }
  return out;
}

std::string write_ground_truth_csv(const std::map<std::string, LabelIndex>& truth,
                                   const LabelSet& label_set) {
  std::string out = "sample_id,label\n";
  for (const auto& [id, label] : truth) {
    out += csv::format_record({id, label_set.name(label)});
  }
  return out;
}

std::vector<std::string> scan_label_names(std::string_view csv_text) {
  const std::vector<csv::Record> records = read_records(csv_text);
  const auto col = locate_columns(records[0], kAnnotationColumns);
  std::set<std::string> names;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    if (is_blank(rec) || rec.size() != records[0].size()) continue;
    if (!rec[col[3]].empty()) names.insert(rec[col[3]]);
    if (!rec[col[5]].empty()) names.insert(rec[col[5]]);
  }
  return {names.begin(), names.end()};
}

}  // namespace effiara

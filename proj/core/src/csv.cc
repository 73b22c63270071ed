#include "effiara/csv.h"

#include "effiara/errors.h"

namespace effiara::csv {

std::vector<Record> parse(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<Record> records;
  Record record;
  std::string field;
  bool in_quotes = false;
  bool after_quote = false;  // closing quote seen; only , or EOL may follow
  bool record_started = false;

  const auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(record));
    record.clear();
    record_started = false;
    after_quote = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || after_quote) {
          throw ParseError(records.size() + 1, "unexpected quote inside field");
        }
        in_quotes = true;
        record_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        after_quote = false;
        record_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        if (after_quote) {
          throw ParseError(records.size() + 1, "characters after closing quote");
        }
        field += c;
        record_started = true;
    }
  }
  if (in_quotes) {
    throw ParseError(records.size() + 1, "unterminated quoted field");
  }
  if (record_started || !field.empty() || !record.empty()) end_record();
  return records;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_record(const Record& record) {
  std::string out;
  for (std::size_t i = 0; i < record.size(); ++i) {
    if (i > 0) out += ',';
    out += escape(record[i]);
  }
  out += '\n';
  return out;
}

}  // namespace effiara::csv

#ifndef EFFIARA_CSV_H_
#define EFFIARA_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace effiara::csv {

using Record = std::vector<std::string>;

// RFC-4180 reader: comma separated, double-quote quoting with "" escapes,
// CRLF or LF record ends, quoted fields may span lines. A leading UTF-8 BOM
// and a trailing newline are accepted. Throws ParseError on an unterminated
// quote or stray characters after a closing quote.
std::vector<Record> parse(std::string_view text);

// Quotes the field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

// Joins escaped fields with commas and terminates with "\n".
std::string format_record(const Record& record);

}  // namespace effiara::csv

#endif  // EFFIARA_CSV_H_

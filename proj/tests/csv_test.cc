#include "effiara/csv.h"

#include <random>

#include "effiara/errors.h"
#include "gtest/gtest.h"

namespace effiara::csv {
namespace {

TEST(Csv, ParsesPlainRecords) {
  const auto records = parse("a,b,c\n1,2,3\n");
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[1], (Record{"1", "2", "3"}));
}

TEST(Csv, HandlesQuotingAndCrlf) {
  const auto records = parse("x,y\r\n\"a,b\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",\r\n");
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[1], (Record{"a,b", "say \"hi\""}));
  EXPECT_EQ(records[2], (Record{"multi\nline", ""}));
}

TEST(Csv, AcceptsMissingTrailingNewlineAndBom) {
  const auto records = parse("\xEF\xBB\xBFh1,h2\nv1,v2");
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0][0], "h1");
  EXPECT_EQ(records[1][1], "v2");
}

TEST(Csv, RejectsUnterminatedQuote) {
  EXPECT_THROW(parse("a,b\n\"open,1\n"), ParseError);
}

TEST(Csv, RejectsGarbageAfterClosingQuote) {
  EXPECT_THROW(parse("\"a\"b,c\n"), ParseError);
}

TEST(Csv, FormatThenParseIsIdentity) {
  std::mt19937 gen(7);
  const std::string alphabet = "ab,\"\n\r x";
  std::uniform_int_distribution<int> len(0, 6);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (int trial = 0; trial < 300; ++trial) {
    Record record;
    for (int f = 0; f < 3; ++f) {
      std::string field;
      for (int i = len(gen); i > 0; --i) field += alphabet[pick(gen)];
      record.push_back(field);
    }
    const auto parsed = parse(format_record(record));
    ASSERT_EQ(parsed.size(), 1u);
    EXPECT_EQ(parsed[0], record);
  }
}

}  // namespace
}  // namespace effiara::csv

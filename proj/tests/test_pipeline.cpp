#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "precip/csv.hpp"
#include "precip/errors.hpp"
#include "precip/gnbfit.hpp"
#include "precip/pipeline.hpp"
#include "precip/rng.hpp"

using namespace precip;

namespace {

DailySeries series_from(const std::vector<double>& v, const std::string& start = "2000-01-01") {
  DailySeries s;
  auto d = parse_iso_date(start);
  for (const double x : v) {
    s.dates.push_back(d);
    s.precip_mm.push_back(x);
    d += std::chrono::days{1};
  }
  return s;
}

DailySeries parse(const std::string& text, const CsvConfig& c = {}) {
  std::istringstream in(text);
  return parse_daily_csv(in, c);
}

}  // namespace

TEST(Dates, RoundTrip) {
  EXPECT_EQ(format_iso_date(parse_iso_date("1950-02-28")), "1950-02-28");
  EXPECT_EQ(parse_iso_date("2000-03-01") - parse_iso_date("2000-02-28"), std::chrono::days{2});
  EXPECT_THROW(parse_iso_date("2001-02-29"), DomainError);
  EXPECT_THROW(parse_iso_date("2001-2-3"), DomainError);
}

TEST(ParseCsv, Basic) {
  const auto s = parse("2000-01-01,0.0\n2000-01-02,3.2\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.precip_mm[1], 3.2);
  EXPECT_EQ(format_iso_date(s.dates[0]), "2000-01-01");
}

TEST(ParseCsv, HeaderCommentsAndDelimiter) {
  CsvConfig c;
  c.delimiter = ';';
  const auto s = parse("# station 42\ndate;precip\n2000-01-01; 1.5\n\n2000-01-03;0\n", c);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.precip_mm[0], 1.5);
}

TEST(ParseCsv, ErrorsCarryLineNumbers) {
  try {
    parse("2000-01-02,1\n2000-01-01,2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    parse("date,p\n2000-01-01,1\n2000-01-02,-0.5\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse("2000-01-01,abc\n"), ParseError);
  EXPECT_THROW(parse("2000-01-01,1,2\n"), ParseError);
  EXPECT_THROW(parse("2000-01-01\n"), ParseError);
  EXPECT_THROW(parse("2000-01-01,1\nbad-date,1\n"), ParseError);
  EXPECT_THROW(parse_daily_csv(std::string("/nonexistent/file.csv")), DataError);
}

TEST(ParseCsv, MissingValues) {
  const std::string text = "2000-01-01,1\n2000-01-02,NA\n2000-01-03,2\n";
  EXPECT_THROW(parse(text), ParseError);
  CsvConfig c;
  c.missing = MissingPolicy::Split;
  const auto s = parse(text, c);
  ASSERT_EQ(s.size(), 2u);
  // the gap splits what would otherwise be one wet period
  EXPECT_EQ(segment_wet_periods(s).size(), 2u);
}

TEST(ParseCsv, JsonConfig) {
  const auto j = nlohmann::json::parse(R"({"delimiter":"\t","missing_token":"-999","missing_policy":"split"})");
  const auto c = j.get<CsvConfig>();
  EXPECT_EQ(c.delimiter, '\t');
  EXPECT_EQ(c.missing_token, "-999");
  EXPECT_EQ(c.missing, MissingPolicy::Split);
  EXPECT_THROW(nlohmann::json::parse(R"({"missing_policy":"guess"})").get<CsvConfig>(), DomainError);
}

TEST(Segment, Examples) {
  const auto s = series_from({0, 1, 2, 0, 5});
  const auto p = segment_wet_periods(s, 0.0);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].start_index, 1u);
  EXPECT_EQ(p[0].duration_days, 2u);
  EXPECT_EQ(p[0].total_volume_mm, 3.0);
  EXPECT_EQ(p[0].max_daily_mm, 2.0);
  EXPECT_EQ(p[1].duration_days, 1u);
  EXPECT_EQ(p[1].total_volume_mm, 5.0);
  EXPECT_TRUE(segment_wet_periods(series_from({0, 0, 0})).empty());
  const auto q = segment_wet_periods(s, 1.5);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q[0].duration_days, 1u);
  EXPECT_EQ(q[0].total_volume_mm, 2.0);
  EXPECT_EQ(q[1].total_volume_mm, 5.0);
}

TEST(Segment, WetDaysAreConserved) {
  Rng rng(1);
  std::vector<double> v(5000);
  std::size_t wet = 0;
  for (auto& x : v) {
    x = rng.uniform() < 0.4 ? rng.exponential() * 4.0 : 0.0;
    wet += x > 0.0;
  }
  const auto p = segment_wet_periods(series_from(v));
  std::vector<std::uint64_t> d;
  for (const auto& w : p) {
    d.push_back(w.duration_days);
    EXPECT_LE(w.max_daily_mm, w.total_volume_mm);
    EXPECT_GT(w.total_volume_mm, 0.0);
  }
  const auto h = build_histogram(d);
  std::uint64_t days = 0;
  for (const auto& [k, c] : h.counts) days += k * c;
  EXPECT_EQ(days, wet);
  EXPECT_EQ(h.total, p.size());
}

TEST(Csv, LosslessRoundTrip) {
  CsvTable t;
  t.columns = {"k", "value"};
  Rng rng(2);
  std::vector<double> vals;
  for (int i = 0; i < 100; ++i) {
    const double v = rng.normal() * std::pow(10.0, (i % 40) - 20);
    vals.push_back(v);
    t.rows.push_back({std::to_string(i), format_number(v)});
  }
  std::stringstream ss;
  write_csv(ss, t);
  EXPECT_EQ(ss.str().rfind(kCsvVersionLine, 0), 0u);
  const auto back = read_csv(ss);
  ASSERT_EQ(back.rows.size(), vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) EXPECT_EQ(back.number(i, "value"), vals[i]);
  EXPECT_THROW(back.column("nope"), DataError);
}

TEST(Csv, RejectsUnknownVersion) {
  std::istringstream in("# precip-glaw v0\na,b\n1,2\n");
  EXPECT_THROW(read_csv(in), ParseError);
  std::istringstream ragged(std::string(kCsvVersionLine) + "\na,b\n1\n");
  EXPECT_THROW(read_csv(ragged), ParseError);
}

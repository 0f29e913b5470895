#include <gtest/gtest.h>

#include <filesystem>

#include "pmvr/data_io.hpp"
#include "pmvr/error.hpp"
#include "pmvr/random.hpp"

namespace pmvr {
namespace {

const std::filesystem::path kFixtures = PMVR_FIXTURE_DIR;

FrenchLoadOptions drop() {
  FrenchLoadOptions o;
  o.sentinel = SentinelPolicy::kDrop;
  return o;
}

TEST(FrenchCsv, CommaFixtureAccounting) {
  const FrenchTable t = load_french_csv(kFixtures / "industry10_monthly.csv", drop());
  EXPECT_EQ(t.report.delimiter, ',');
  EXPECT_EQ(t.report.total_lines, 75u);
  EXPECT_EQ(t.report.parsed, 59u);
  EXPECT_EQ(t.report.rejected, 1u);
  EXPECT_EQ(t.report.skipped, 15u);
  ASSERT_EQ(t.report.rejections.size(), 1u);
  EXPECT_NE(t.report.rejections[0].find("line 25"), std::string::npos);
  EXPECT_EQ(t.data.periods(), 59u);
  EXPECT_EQ(t.data.assets(), 10u);
  EXPECT_EQ(t.data.names.front(), "NoDur");
  EXPECT_EQ(t.data.names.back(), "Other");
  EXPECT_EQ(t.dates.front(), "192607");
  EXPECT_DOUBLE_EQ(t.data.returns(0, 0), 0.0145);
  EXPECT_DOUBLE_EQ(t.data.returns(0, 1), -0.0033);
  for (const auto& d : t.dates) EXPECT_NE(d, "192712");
}

TEST(FrenchCsv, WhitespaceFixtureAccounting) {
  const FrenchTable t = load_french_csv(kFixtures / "industry12_monthly.txt");
  EXPECT_EQ(t.report.delimiter, ' ');
  EXPECT_EQ(t.report.total_lines, 53u);
  EXPECT_EQ(t.report.parsed, 48u);
  EXPECT_EQ(t.report.rejected, 0u);
  EXPECT_EQ(t.report.skipped, 5u);
  EXPECT_EQ(t.data.assets(), 12u);
  EXPECT_EQ(t.data.names.size(), 12u);
  EXPECT_DOUBLE_EQ(t.data.returns(0, 0), 0.0145);
}

TEST(FrenchCsv, SentinelErrorsByDefault) {
  try {
    load_french_csv(kFixtures / "industry10_monthly.csv");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("line 25"), std::string::npos);
  }
}

TEST(FrenchCsv, HandSummedMeans) {
  const std::string text =
      ",A,B,C,D,E,F,G,H,I,J\n"
      "200001,1,2,3,4,5,6,7,8,9,10\n"
      "200002,-1,-2,-3,-4,-5,-6,-7,-8,-9,-10\n"
      "200003,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5\n"
      "200004,2,0,2,0,2,0,2,0,2,0\n"
      "200005,10,10,10,10,10,10,10,10,10,10\n";
  const FrenchTable t = parse_french_csv(text);
  ASSERT_EQ(t.data.periods(), 5u);
  const double expected[10] = {12.5 / 5, 10.5 / 5, 12.5 / 5, 10.5 / 5, 12.5 / 5,
                               10.5 / 5, 12.5 / 5, 10.5 / 5, 12.5 / 5, 10.5 / 5};
  for (std::size_t j = 0; j < 10; ++j) EXPECT_NEAR(t.data.mean[j], expected[j] / 100.0, 1e-15);
}

TEST(FrenchCsv, MalformedFieldNamesLineAndColumn) {
  try {
    parse_french_csv(",A,B\n200001,1.0,2.0\n200002,1.0,abc\n");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos);
    EXPECT_NE(msg.find("column 3"), std::string::npos);
  }
  EXPECT_THROW(parse_french_csv(",A,B\n200001,1.0,2.0\n200002,1.0\n"), IoError);
  EXPECT_THROW(parse_french_csv("nothing here\n"), IoError);
  EXPECT_THROW(load_french_csv(kFixtures / "does_not_exist.csv"), IoError);
}

TEST(FrenchCsv, MinusNineNineNineIsSentinel) {
  const FrenchTable t = parse_french_csv(",A,B\n200001,1,2\n200002,-999,2\n", drop());
  EXPECT_EQ(t.report.parsed, 1u);
  EXPECT_EQ(t.report.rejected, 1u);
}

TraceRow random_row(RandomSource& rng, std::uint64_t i) {
  TraceRow r;
  r.iter = i * 5;
  r.stage = static_cast<std::uint32_t>(rng.uniform_index(7));
  r.seconds = rng.uniform() * 100;
  r.sfo = rng();
  r.lmo = rng.uniform_index(1u << 30);
  r.objective = rng.normal() * 1e-3;
  r.fw_gap = std::abs(rng.normal()) * 1e7;
  r.grad_map = rng.uniform() * 1e-300;
  r.beta = 0.1 + rng.uniform();
  if (rng.uniform() < 0.5) r.opt_gap = -rng.uniform() / 3.0;
  return r;
}

TEST(TraceCsv, EmptyTraceIsHeaderOnly) {
  EXPECT_EQ(trace_to_csv({}), std::string(kTraceHeader) + "\n");
  EXPECT_TRUE(trace_from_csv(trace_to_csv({})).empty());
}

TEST(TraceCsv, OneRowRoundTrip) {
  TraceRow r;
  r.iter = 3;
  r.objective = 0.1;
  r.fw_gap = 1.0 / 3.0;
  r.opt_gap = 2.0 / 7.0;
  const std::vector<TraceRow> rows{r};
  EXPECT_EQ(trace_from_csv(trace_to_csv(rows)), rows);
}

TEST(TraceCsv, ThousandRowRoundTripThroughFile) {
  RandomSource rng(77);
  std::vector<TraceRow> rows;
  for (std::uint64_t i = 0; i < 1000; ++i) rows.push_back(random_row(rng, i));
  const auto path = std::filesystem::temp_directory_path() / "pmvr_unit" / "trace.csv";
  write_trace_csv(rows, path);
  EXPECT_EQ(read_trace_csv(path), rows);
}

TEST(TraceCsv, RejectsBadInput) {
  EXPECT_THROW(trace_from_csv("iter,stage\n"), IoError);
  EXPECT_THROW(trace_from_csv(std::string(kTraceHeader) + "\n1,0,0,1,1,x,0,0,1,\n"), IoError);
  EXPECT_THROW(trace_from_csv(std::string(kTraceHeader) + "\n1,0,0\n"), IoError);
}

TEST(FormatDouble, ShortestExact) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
}

}  // namespace
}  // namespace pmvr

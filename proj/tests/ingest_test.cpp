#include <gpupower/ingest.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace gpupower;
using namespace gpupower::ingest;

namespace {

std::string telemetry(const std::string& rows) { return std::string(kTelemetryHeader) + "\n" + rows; }

PowerSample sample(std::int64_t t, const std::string& node, double gcd0, double rest = 89.0) {
  PowerSample s;
  s.timestamp = t;
  s.node_id = node;
  s.input_power = 3000;
  s.cpu_power = 400;
  s.gcd_power.assign(8, rest);
  s.gcd_power[0] = gcd0;
  return s;
}

}  // namespace

TEST(ParseTelemetry, DirectFieldMapping) {
  std::istringstream in(telemetry("1700000000,node01,3200,450,89,89,89,89,89,89,89,89\n"));
  const auto parsed = parse_telemetry(in);
  ASSERT_EQ(parsed.rows.size(), 1u);
  const auto& s = parsed.rows[0];
  EXPECT_EQ(s.timestamp, 1700000000);
  EXPECT_EQ(s.node_id, "node01");
  EXPECT_EQ(s.input_power, 3200);
  EXPECT_EQ(s.cpu_power, 450);
  EXPECT_EQ(s.gcd_power, std::vector<double>(8, 89.0));
}

TEST(ParseTelemetry, TenColumnsIsParseErrorWithLine) {
  std::istringstream in(telemetry("1700000000,node01,3200,450,89,89,89,89,89,89,89,89\n"
                                  "1700000002,node01,3200,450,89,89,89,89,89,89\n"));
  try {
    parse_telemetry(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ParseTelemetry, TdpReadingIsKept) {
  std::istringstream in(telemetry("1700000000,node01,3200,450,89,89,89,560,89,89,89,89\n"));
  EXPECT_EQ(parse_telemetry(in).rows[0].gcd_power[3], 560.0);
}

TEST(ParseTelemetry, RejectsNegativeAndOverCeiling) {
  std::istringstream neg(telemetry("1700000000,node01,3200,450,89,-1,89,89,89,89,89,89\n"));
  EXPECT_THROW(parse_telemetry(neg), ParseError);
  std::istringstream high(telemetry("1700000000,node01,3200,450,89,89,89,89,89,89,89,701\n"));
  EXPECT_THROW(parse_telemetry(high), ParseError);
  std::istringstream nan(telemetry("1700000000,node01,3200,450,89,nan,89,89,89,89,89,89\n"));
  EXPECT_THROW(parse_telemetry(nan), ParseError);
}

TEST(ParseTelemetry, LenientSkipsAndCounts) {
  std::istringstream in(telemetry("1700000000,node01,3200,450,89,89,89,89,89,89,89,89\n"
                                  "garbage\n"
                                  "1700000002,node01,3200,450,89,89,89,89,89,89,89,-5\n"
                                  "2023-11-14T22:13:24Z,node01,3200,450,90,89,89,89,89,89,89,89\n"));
  const auto parsed = parse_telemetry(in, {.lenient = true});
  EXPECT_EQ(parsed.rows.size(), 2u);
  EXPECT_EQ(parsed.skipped, 2u);
  EXPECT_EQ(parsed.warnings.size(), 2u);
  EXPECT_EQ(parsed.rows[1].timestamp, 1700000004);
}

TEST(ParseTelemetry, HeaderIsRequired) {
  std::istringstream in("1700000000,node01,3200,450,89,89,89,89,89,89,89,89\n");
  EXPECT_THROW(parse_telemetry(in), ParseError);
  std::istringstream empty("");
  EXPECT_THROW(parse_telemetry(empty), ParseError);
}

TEST(Aggregate, MeanPerWindow) {
  const auto out = aggregate_15s({sample(0, "n1", 100), sample(2, "n1", 110), sample(4, "n1", 120)});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].gcd_power[0], 110.0);
  EXPECT_EQ(out[0].contributing, 3u);
}

TEST(Aggregate, SingleSamplePassesThrough) {
  const auto s = sample(30, "n1", 321.5);
  const auto out = aggregate_15s({s});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(static_cast<const PowerSample&>(out[0]), s);
}

TEST(Aggregate, ConstantSignalOverFullWindow) {
  std::vector<PowerSample> in;
  for (std::int64_t t = 0; t <= 14; t += 2) in.push_back(sample(t, "n1", 200, 200));
  ASSERT_EQ(in.size(), 8u);
  const auto out = aggregate_15s(in);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].timestamp, 0);
  for (double w : out[0].gcd_power) EXPECT_DOUBLE_EQ(w, 200.0);
}

TEST(Aggregate, SortedByNodeThenTimeAndAligned) {
  const auto out = aggregate_15s({sample(31, "b", 1), sample(1, "b", 1), sample(16, "a", 1), sample(44, "a", 1)});
  ASSERT_EQ(out.size(), 4u);
  EXPECT_EQ(out[0].node_id, "a");
  EXPECT_EQ(out[0].timestamp, 15);
  EXPECT_EQ(out[1].timestamp, 30);
  EXPECT_EQ(out[2].node_id, "b");
  EXPECT_EQ(out[2].timestamp, 0);
  for (const auto& a : out) EXPECT_TRUE(is_window_aligned(a));
}

TEST(AggregateProperty, OrderIndependent) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> watts(0, 700);
  std::vector<PowerSample> in;
  for (int i = 0; i < 500; ++i) {
    in.push_back(sample(rng() % 600, "n" + std::to_string(rng() % 5), watts(rng), watts(rng)));
  }
  const auto expected = aggregate_15s(in);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(in.begin(), in.end(), rng);
    const auto got = aggregate_15s(in);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].node_id, expected[i].node_id);
      EXPECT_EQ(got[i].timestamp, expected[i].timestamp);
      for (std::size_t g = 0; g < 8; ++g) EXPECT_NEAR(got[i].gcd_power[g], expected[i].gcd_power[g], 1e-9);
    }
  }
}

TEST(AggregateProperty, IdempotentOnAlignedConstantInput) {
  std::vector<PowerSample> in;
  for (std::int64_t t = 0; t < 150; t += 15) in.push_back(sample(t, "n1", 250, 250));
  const auto once = aggregate_15s(in);
  std::vector<PowerSample> again(once.begin(), once.end());
  const auto twice = aggregate_15s(again);
  ASSERT_EQ(once.size(), twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(once[i], twice[i]);
}

TEST(AggregateProperty, PreservesEnergyForUniformFullWindows) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> watts(0, 700);
  for (std::int64_t cadence : {1, 3, 5, 15}) {
    std::vector<PowerSample> in;
    double joules = 0.0;
    for (std::int64_t t = 0; t < 15 * 20; t += cadence) {
      in.push_back(sample(t, "n1", watts(rng)));
      joules += in.back().gcd_power[0] * static_cast<double>(cadence);
    }
    double windowed = 0.0;
    for (const auto& a : aggregate_15s(in)) windowed += a.gcd_power[0] * 15.0;
    EXPECT_NEAR(windowed, joules, 1e-9 * joules) << "cadence " << cadence;
  }
}

TEST(ParseAggregated, RejectsUnalignedTimestamps) {
  std::istringstream ok(telemetry("1700000040,node01,3200,450,89,89,89,89,89,89,89,89\n"));
  EXPECT_EQ(parse_aggregated(ok).size(), 1u);
  std::istringstream bad(telemetry("1700000041,node01,3200,450,89,89,89,89,89,89,89,89\n"));
  EXPECT_THROW(parse_aggregated(bad), ParseError);
}

TEST(TelemetryFile, WriteThenReadIsExact) {
  std::vector<PowerSample> in{sample(0, "n1", 1.0 / 3.0), sample(15, "n2", 559.999)};
  std::stringstream buf;
  write_telemetry(buf, in);
  EXPECT_EQ(parse_telemetry(buf).rows, in);
}

TEST(Scheduler, FullSystemJobGetsAllNodes) {
  std::istringstream sched(std::string(kSchedulerHeader) + "\nJ1,ast137,9408,1700000000,1700003600\n");
  std::string alloc(kAllocationHeader);
  alloc += "\n";
  for (int n = 0; n < 9408; ++n) alloc += "J1,node" + std::to_string(n) + "\n";
  std::istringstream alloc_in(alloc);
  auto jobs = parse_scheduler(sched).rows;
  const auto warnings = join_allocations(jobs, parse_allocations(alloc_in).rows);
  EXPECT_TRUE(warnings.empty());
  ASSERT_EQ(jobs.size(), 1u);
  EXPECT_EQ(jobs[0].num_nodes, 9408u);
  EXPECT_EQ(jobs[0].node_ids.size(), 9408u);
}

TEST(Scheduler, DanglingAllocationIsAWarning) {
  std::istringstream sched(std::string(kSchedulerHeader) + "\nJ1,ast137,1,0,60\n");
  std::istringstream alloc(std::string(kAllocationHeader) + "\nJ1,n1\nJ9,n2\nJ9,n3\n");
  auto jobs = parse_scheduler(sched).rows;
  const auto warnings = join_allocations(jobs, parse_allocations(alloc).rows);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_EQ(warnings[0].kind, Warning::Kind::DanglingAllocation);
  EXPECT_NE(warnings[0].message.find("J9"), std::string::npos);
}

TEST(Scheduler, ZeroLengthJobRejected) {
  std::istringstream sched(std::string(kSchedulerHeader) + "\nJ1,ast137,1,1700000000,1700000000\n");
  EXPECT_THROW(parse_scheduler(sched), ParseError);
  std::istringstream lenient(std::string(kSchedulerHeader) + "\nJ1,ast137,1,1700000000,1700000000\nJ2,bio1,1,0,15\n");
  const auto parsed = parse_scheduler(lenient, {.lenient = true});
  EXPECT_EQ(parsed.rows.size(), 1u);
  EXPECT_EQ(parsed.skipped, 1u);
}

TEST(Scheduler, NodeCountMismatchResetsToAllocations) {
  std::istringstream sched(std::string(kSchedulerHeader) + "\nJ1,ast137,4,0,60\nJ2,bio1,2,0,60\n");
  std::istringstream alloc(std::string(kAllocationHeader) + "\nJ1,n1\nJ1,n2\n");
  auto jobs = parse_scheduler(sched).rows;
  const auto warnings = join_allocations(jobs, parse_allocations(alloc).rows);
  EXPECT_EQ(jobs[0].num_nodes, 2u);
  ASSERT_EQ(warnings.size(), 2u);
  EXPECT_EQ(warnings[0].kind, Warning::Kind::NodeCountMismatch);
  EXPECT_EQ(warnings[1].kind, Warning::Kind::JobWithoutNodes);
}

TEST(Allocations, EmptyFieldsRejected) {
  std::istringstream alloc(std::string(kAllocationHeader) + "\nJ1,\n");
  EXPECT_THROW(parse_allocations(alloc), ParseError);
}

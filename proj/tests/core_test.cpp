#include <gpupower/core.hpp>
#include <gpupower/delimited.hpp>
#include <gpupower/jobjoin.hpp>

#include <gtest/gtest.h>

using namespace gpupower;

namespace {

PowerSample idle_sample() {
  PowerSample s;
  s.timestamp = 1700000000;
  s.node_id = "node01";
  s.input_power = 3200;
  s.cpu_power = 450;
  s.gcd_power.assign(8, 89.0);
  return s;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::Validation;
}

}  // namespace

TEST(ValidateSample, IdleNodeIsValid) {
  const auto s = idle_sample();
  EXPECT_EQ(validate_sample(s), s);
}

TEST(ValidateSample, NegativeGcdPower) {
  auto s = idle_sample();
  s.gcd_power[5] = -1;
  EXPECT_EQ(kind_of([&] { validate_sample(s); }), ErrorKind::InvalidPower);
}

TEST(ValidateSample, AboveSanityCeiling) {
  auto s = idle_sample();
  s.gcd_power[0] = 700.5;
  EXPECT_EQ(kind_of([&] { validate_sample(s); }), ErrorKind::InvalidPower);
  s.gcd_power[0] = 700.0;
  EXPECT_NO_THROW(validate_sample(s));
}

TEST(ValidateSample, SevenGcds) {
  auto s = idle_sample();
  s.gcd_power.pop_back();
  EXPECT_EQ(kind_of([&] { validate_sample(s); }), ErrorKind::WrongGcdCount);
}

TEST(WindowStart, AlignsToMultiplesOf15) {
  EXPECT_EQ(window_start(0), 0);
  EXPECT_EQ(window_start(14), 0);
  EXPECT_EQ(window_start(15), 15);
  EXPECT_EQ(window_start(1700000000), 1699999995);
  EXPECT_EQ(window_start(-1), -15);
}

TEST(SizeClass, RangesAreDisjointAndCoverAllNodeCounts) {
  for (std::size_t n = 1; n <= kMaxNodes; ++n) {
    int hits = 0;
    for (auto c : kAllSizeClasses) {
      const auto r = node_range(c);
      hits += (r.lo <= n && n <= r.hi) ? 1 : 0;
    }
    ASSERT_EQ(hits, 1) << n;
  }
}

TEST(ModeThresholds, Validity) {
  EXPECT_TRUE(ModeThresholds{}.valid());
  EXPECT_FALSE((ModeThresholds{420, 200, 560}).valid());
  EXPECT_FALSE((ModeThresholds{0, 200, 560}).valid());
  EXPECT_THROW(validate(ModeThresholds{200, 560, 560}), Error);
}

TEST(CapSetting, RangesAndBaselines) {
  EXPECT_TRUE(is_valid(FrequencyCap{1700}));
  EXPECT_FALSE(is_valid(FrequencyCap{1701}));
  EXPECT_FALSE(is_valid(FrequencyCap{0}));
  EXPECT_TRUE(is_valid(PowerCap{560}));
  EXPECT_FALSE(is_valid(PowerCap{561}));
  EXPECT_TRUE(is_baseline(FrequencyCap{1700}));
  EXPECT_TRUE(is_baseline(PowerCap{560}));
  EXPECT_TRUE(is_baseline(Uncapped{}));
  EXPECT_FALSE(is_baseline(PowerCap{500}));
  EXPECT_THROW(make_cap("volts", 1), Error);
  EXPECT_THROW(make_cap("freq", 2000), Error);
  EXPECT_TRUE(same_cap(make_cap("power", 300), PowerCap{300}));
  EXPECT_FALSE(same_cap(FrequencyCap{300}, PowerCap{300}));
}

TEST(Timestamps, EpochAndIso) {
  using delimited::parse_timestamp;
  EXPECT_EQ(parse_timestamp("1700000000"), 1700000000);
  EXPECT_EQ(parse_timestamp("1700000000.9"), 1700000000);
  EXPECT_EQ(parse_timestamp("2023-11-14T22:13:20Z"), 1700000000);
  EXPECT_EQ(parse_timestamp("2023-11-14T22:13:20.750Z"), 1700000000);
  EXPECT_EQ(parse_timestamp("1970-01-01T00:00:00Z"), 0);
  EXPECT_FALSE(parse_timestamp("2023-02-30T00:00:00Z"));
  EXPECT_FALSE(parse_timestamp("2023-11-14 22:13:20"));
  EXPECT_FALSE(parse_timestamp("soon"));
}

TEST(Formatting, FixedAndExact) {
  EXPECT_EQ(delimited::format_fixed(1493.94, 2), "1493.94");
  EXPECT_EQ(delimited::format_fixed(-0.04, 1), "0.0");
  EXPECT_EQ(delimited::format_fixed(-129.74, 1), "-129.7");
  EXPECT_EQ(delimited::format_exact(0.1), "0.1");
  EXPECT_EQ(delimited::parse_double(delimited::format_exact(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(JobRecordInvariants, PrepareDerivesDomain) {
  JobRecord j{"J1", "ast137", "", 0, 60, 4, {"a", "b", "c", "d"}};
  prepare_job(j);
  EXPECT_EQ(j.science_domain, "AST");
  j.science_domain = "BIO";
  EXPECT_THROW(prepare_job(j), Error);
  JobRecord zero{"J2", "bio1", "", 60, 60, 1, {"a"}};
  EXPECT_THROW(prepare_job(zero), Error);
}

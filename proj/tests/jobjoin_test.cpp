#include <gpupower/jobjoin.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace gpupower;

namespace {

AggregatedSample window(std::int64_t t, const std::string& node, double watts) {
  AggregatedSample s;
  s.timestamp = t;
  s.node_id = node;
  s.gcd_power.assign(8, watts);
  s.contributing = 1;
  return s;
}

JobRecord job(const std::string& id, const std::string& project, std::int64_t begin, std::int64_t end,
              std::set<std::string> nodes) {
  JobRecord j{id, project, "", begin, end, nodes.size(), std::move(nodes)};
  prepare_job(j);
  return j;
}

double total_energy(const JoinResult& r) {
  double e = 0.0;
  for (const auto& [_, js] : r.jobs) e += integrate_energy(js);
  return e;
}

}  // namespace

TEST(DeriveDomain, AlphabeticPrefixUppercased) {
  EXPECT_EQ(derive_domain("ast137"), "AST");
  EXPECT_EQ(derive_domain("BIO"), "BIO");
  EXPECT_EQ(derive_domain("cfd12x4"), "CFD");
}

TEST(DeriveDomain, NoAlphabeticPrefix) {
  try {
    derive_domain("123x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyProjectId);
  }
  EXPECT_THROW(derive_domain(""), Error);
}

TEST(ClassifyJobSize, SchedulerPolicyBoundaries) {
  EXPECT_EQ(classify_job_size(9408), JobSizeClass::A);
  EXPECT_EQ(classify_job_size(5645), JobSizeClass::A);
  EXPECT_EQ(classify_job_size(5644), JobSizeClass::B);
  EXPECT_EQ(classify_job_size(1882), JobSizeClass::B);
  EXPECT_EQ(classify_job_size(1881), JobSizeClass::C);
  EXPECT_EQ(classify_job_size(184), JobSizeClass::C);
  EXPECT_EQ(classify_job_size(183), JobSizeClass::D);
  EXPECT_EQ(classify_job_size(92), JobSizeClass::D);
  EXPECT_EQ(classify_job_size(91), JobSizeClass::E);
  EXPECT_EQ(classify_job_size(1), JobSizeClass::E);
}

TEST(ClassifyJobSize, OutOfRange) {
  for (std::size_t n : {std::size_t{0}, std::size_t{9409}}) {
    try {
      classify_job_size(n);
      FAIL() << n;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
    }
  }
}

TEST(Join, OneJobOneNodeFourWindows) {
  std::vector<AggregatedSample> samples;
  for (int w = 0; w < 4; ++w) samples.push_back(window(w * 15, "n1", 300));
  const auto r = join(samples, {job("J1", "ast1", 0, 60, {"n1"})});
  ASSERT_EQ(r.jobs.size(), 1u);
  const auto& js = r.jobs.at("J1");
  EXPECT_EQ(js.series.size(), 8u);
  for (const auto& [key, s] : js.series) {
    EXPECT_EQ(key.node_id, "n1");
    EXPECT_EQ(s.size(), 4u);
  }
}

TEST(Join, EndTimeIsExclusive) {
  const auto r = join(std::vector{window(45, "n1", 300), window(60, "n1", 300)}, {job("J1", "ast1", 0, 60, {"n1"})});
  EXPECT_EQ(r.jobs.at("J1").sample_count(), 8u);
  ASSERT_TRUE(r.jobs.contains("IDLE"));
  EXPECT_EQ(r.jobs.at("IDLE").series.begin()->second.front().timestamp, 60);
}

TEST(Join, UnallocatedNodeGoesToIdle) {
  // bookkeeping oracle: every (node, window) belongs to exactly one owner
  std::vector<AggregatedSample> samples;
  std::size_t expect_j1 = 0, expect_j2 = 0, expect_idle = 0;
  for (const std::string node : {"n1", "n2", "n3"}) {
    for (std::int64_t t = 0; t < 300; t += 15) {
      samples.push_back(window(t, node, 100));
      if (node == "n1" && t < 150) ++expect_j1;
      else if (node == "n2" && t >= 60 && t < 240) ++expect_j2;
      else ++expect_idle;
    }
  }
  const auto r = join(samples, {job("J1", "ast1", 0, 150, {"n1"}), job("J2", "bio2", 60, 240, {"n2"})});
  EXPECT_EQ(r.jobs.at("J1").sample_count(), expect_j1 * 8);
  EXPECT_EQ(r.jobs.at("J2").sample_count(), expect_j2 * 8);
  EXPECT_EQ(r.jobs.at("IDLE").sample_count(), expect_idle * 8);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Join, OverlapFirstByBeginTimeWins) {
  std::vector<AggregatedSample> samples;
  for (std::int64_t t = 0; t < 120; t += 15) samples.push_back(window(t, "n1", 100));
  const auto r = join(samples, {job("LATE", "bio2", 60, 120, {"n1"}), job("EARLY", "ast1", 0, 90, {"n1"})});
  EXPECT_EQ(r.jobs.at("EARLY").sample_count(), 6u * 8);  // t = 0..75
  EXPECT_EQ(r.jobs.at("LATE").sample_count(), 2u * 8);   // t = 90, 105
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].kind, Warning::Kind::OverlappingJobs);
  EXPECT_NE(r.warnings[0].message.find("2 node-window"), std::string::npos);
}

TEST(Join, JobWithNoSamplesStillListed) {
  const auto r = join(std::vector<AggregatedSample>{}, {job("J1", "ast1", 0, 60, {"n1"})});
  ASSERT_TRUE(r.jobs.contains("J1"));
  EXPECT_EQ(r.jobs.at("J1").sample_count(), 0u);
  EXPECT_FALSE(r.jobs.contains("IDLE"));
}

TEST(IntegrateEnergy, RectangleRule) {
  std::vector<TimedWatts> hour;
  for (int i = 0; i < 240; ++i) hour.push_back({i * 15, 240.0});
  EXPECT_NEAR(integrate_energy(hour), 2.4e-4, 1e-15);
  EXPECT_EQ(integrate_energy(std::vector<TimedWatts>{}), 0.0);

  JobPowerSeries one_window;
  for (std::size_t g = 0; g < 8; ++g) one_window.series[{"n1", g}] = {{0, 500.0}};
  EXPECT_NEAR(integrate_energy(one_window), 8 * 500 * 15 / 3.6e9, 1e-18);
}

TEST(GpuHours, SampleCountTimes15s) {
  std::vector<TimedWatts> hour(240, {0, 1.0});
  EXPECT_DOUBLE_EQ(gpu_hours(hour), 1.0);
  EXPECT_EQ(gpu_hours(std::vector<TimedWatts>{}), 0.0);
  JobPowerSeries eight;
  for (std::size_t g = 0; g < 8; ++g) eight.series[{"n1", g}] = hour;
  EXPECT_DOUBLE_EQ(gpu_hours(eight), 8.0);
}

TEST(JoinProperty, PartitionConservesEnergy) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> watts(89, 600);
  std::vector<AggregatedSample> samples;
  double joules = 0.0;
  for (int n = 0; n < 6; ++n) {
    for (std::int64_t t = 0; t < 600; t += 15) {
      auto s = window(t, "n" + std::to_string(n), 0);
      for (auto& w : s.gcd_power) {
        w = watts(rng);
        joules += w * 15.0;
      }
      samples.push_back(s);
    }
  }
  // back-to-back jobs cover every node-window: no idle time, no overlap
  std::vector<JobRecord> jobs{job("J1", "ast1", 0, 300, {"n0", "n1", "n2"}), job("J2", "ast2", 300, 600, {"n0", "n1", "n2"}),
                              job("J3", "bio1", 0, 600, {"n3", "n4", "n5"})};
  const auto r = join(samples, jobs);
  EXPECT_FALSE(r.jobs.contains("IDLE"));
  EXPECT_NEAR(total_energy(r), joules / 3.6e9, 1e-9 * joules / 3.6e9);
}

TEST(JoinProperty, InsensitiveToInputOrder) {
  std::mt19937_64 rng(5);
  std::vector<AggregatedSample> samples;
  for (int n = 0; n < 4; ++n) {
    for (std::int64_t t = 0; t < 300; t += 15) samples.push_back(window(t, "n" + std::to_string(n), 100.0 + (rng() % 400)));
  }
  std::vector<JobRecord> jobs{job("J1", "ast1", 0, 150, {"n0", "n1"}), job("J2", "bio1", 100, 300, {"n1", "n2"})};
  const auto base = summarize(join(samples, jobs), jobs);
  for (int trial = 0; trial < 4; ++trial) {
    std::shuffle(samples.begin(), samples.end(), rng);
    std::shuffle(jobs.begin(), jobs.end(), rng);
    const auto r = join(samples, jobs);
    const auto got = summarize(r, jobs);
    ASSERT_EQ(got.size(), base.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].job_id, base[i].job_id);
      EXPECT_EQ(got[i].sample_count, base[i].sample_count);
      EXPECT_NEAR(got[i].gpu_energy_mwh, base[i].gpu_energy_mwh, 1e-15);
    }
    for (const auto& [_, js] : r.jobs) {
      for (const auto& [key, s] : js.series) {
        EXPECT_TRUE(std::is_sorted(s.begin(), s.end(), [](auto& a, auto& b) { return a.timestamp < b.timestamp; }));
      }
    }
  }
}

TEST(Summary, RowsAndFile) {
  std::vector<AggregatedSample> samples{window(0, "n1", 500), window(0, "n2", 89)};
  std::vector<JobRecord> jobs{job("J1", "chm42", 0, 15, {"n1"})};
  const auto rows = summarize(join(samples, jobs), jobs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].job_id, "IDLE");
  EXPECT_FALSE(rows[0].job_size_class);
  EXPECT_EQ(rows[1].science_domain, "CHM");
  EXPECT_EQ(rows[1].job_size_class, JobSizeClass::E);
  EXPECT_DOUBLE_EQ(rows[1].gpu_hours, 8 * 15 / 3600.0);
  std::ostringstream out;
  write_job_summary(out, rows);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), kJobSummaryHeader);
  EXPECT_NE(out.str().find("IDLE,IDLE,-,"), std::string::npos);
  EXPECT_NE(out.str().find("J1,CHM,E,"), std::string::npos);
}

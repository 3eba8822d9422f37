#include <gtest/gtest.h>

#include "abphase/errors.hpp"
#include "abphase/verify.hpp"

using namespace abphase;

namespace {

void expect_all_pass(const SuiteReport& r) {
  for (const CaseResult& c : r.cases) {
    EXPECT_TRUE(c.passed) << r.suite << "/" << c.name << " residual " << c.residual << " " << c.detail;
    EXPECT_LE(c.residual, c.tolerance) << c.name;
  }
  EXPECT_TRUE(r.passed());
}

}  // namespace

TEST(RandomWorldlines, SubluminalWithSharedEndpoints) {
  std::mt19937_64 rng(11);
  for (double c : {1.0, 3.0}) {
    for (int i = 0; i < 200; ++i) {
      const WorldlinePair p = random_worldline_pair(rng, c);
      EXPECT_EQ(p.a().front(), p.b().front());
      EXPECT_EQ(p.a().back(), p.b().back());
      EXPECT_LT(p.a().max_speed(), c);
      EXPECT_LT(p.b().max_speed(), c);
    }
  }
}

TEST(Suites, StokesPasses) {
  const SuiteReport r = verify_stokes(1, 10);
  EXPECT_EQ(r.cases.size(), 10u);
  EXPECT_EQ(r.suite, "stokes");
  expect_all_pass(r);
}

TEST(Suites, AppendixPassesOnBoxesAndPatches) {
  const SuiteReport r = verify_appendix_a(2, 6);
  EXPECT_EQ(r.cases.size(), 12u);
  expect_all_pass(r);
  EXPECT_LE(r.max_residual(), 1e-9);
}

TEST(Suites, GaugePasses) {
  const SuiteReport r = verify_gauge(3, 4);
  EXPECT_GE(r.cases.size(), 8u);
  expect_all_pass(r);
}

TEST(Suites, FramesPass) {
  const SuiteReport r = verify_frames();
  EXPECT_GE(r.cases.size(), 10u);
  expect_all_pass(r);
}

TEST(Suites, SameSeedSameResiduals) {
  const SuiteReport a = run_suite("appendixA", 9, 3);
  const SuiteReport b = run_suite("appendixA", 9, 3);
  ASSERT_EQ(a.cases.size(), b.cases.size());
  for (std::size_t i = 0; i < a.cases.size(); ++i) {
    EXPECT_EQ(a.cases[i].name, b.cases[i].name);
    EXPECT_EQ(a.cases[i].residual, b.cases[i].residual);
  }
  EXPECT_EQ(a.seed, 9u);
  EXPECT_EQ(a.count, 3);
}

TEST(Suites, DispatchErrors) {
  EXPECT_THROW(run_suite("bogus", 1, 1), ConfigError);
  EXPECT_THROW(run_suite("stokes", 1, 0), ConfigError);
}

TEST(SuiteReport, EmptyAndFailedCases) {
  SuiteReport r;
  EXPECT_FALSE(r.passed());  // nothing ran, nothing was shown
  EXPECT_EQ(r.max_residual(), 0.0);
  r.cases.push_back({"x", 2.0, 1.0, false, ""});
  r.cases.push_back({"y", 0.5, 1.0, true, ""});
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.max_residual(), 2.0);
}

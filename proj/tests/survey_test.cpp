#include <gtest/gtest.h>

#include <random>

#include "moon/error.hpp"
#include "moon/survey.hpp"

namespace moon {
namespace {

TEST(SurveyProportions, ReconstructedCounts) {
  const auto est = survey_proportions({293, 122});
  EXPECT_NEAR(est.proportion_closer, 0.7060, 5e-4);
  // Wilson bounds from 40-digit mpmath with p = 293/415, z = 1.96.
  EXPECT_NEAR(est.proportion_closer, 0.7060240963855422, 1e-15);
  EXPECT_NEAR(est.ci_low, 0.6604623865766799, 1e-12);
  EXPECT_NEAR(est.ci_high, 0.7478065150796981, 1e-12);
  EXPECT_NEAR(est.ci_low, 0.660, 2e-3);
  EXPECT_NEAR(est.ci_high, 0.748, 2e-3);
}

TEST(SurveyProportions, SmallCounts) {
  EXPECT_EQ(survey_proportions({1, 0}).proportion_closer, 1.0);
  const auto half = survey_proportions({1, 1});
  EXPECT_EQ(half.proportion_closer, 0.5);
  EXPECT_NEAR(half.ci_low, 0.09452865480086613, 1e-12);
  EXPECT_NEAR(half.ci_high, 0.9054713451991339, 1e-12);
}

TEST(SurveyProportions, ZeroTotalIsDomainError) {
  try {
    survey_proportions({0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(SurveyProportions, ReciprocityAndIntervalProperties) {
  std::mt19937_64 gen(51);
  std::uniform_int_distribution<long long> count(0, 5000);
  for (int i = 0; i < 2000; ++i) {
    const long long a = count(gen), b = count(gen);
    if (a + b == 0) continue;
    const auto ab = survey_proportions({a, b});
    const auto ba = survey_proportions({b, a});
    EXPECT_NEAR(ab.proportion_closer + ba.proportion_closer, 1.0, 1e-12);
    EXPECT_LE(ab.ci_low, ab.proportion_closer);
    EXPECT_GE(ab.ci_high, ab.proportion_closer);
    if (a > 0 && b > 0) {
      EXPECT_GT(ab.ci_low, 0.0);
      EXPECT_LT(ab.ci_high, 1.0);
    } else {
      // All-one-sided samples put one Wilson bound exactly on 0 or 1.
      EXPECT_GE(ab.ci_low, -1e-15);
      EXPECT_LE(ab.ci_high, 1.0 + 1e-15);
    }
  }
}

TEST(SurveyCsv, Parses) {
  const auto c = parse_survey_csv("label,count\ncloser,293\r\nfarther,122\n");
  EXPECT_EQ(c.n_closer, 293);
  EXPECT_EQ(c.n_farther, 122);
  EXPECT_EQ(parse_survey_csv("farther,1\ncloser,1").n_closer, 1);
}

TEST(SurveyCsv, Rejects) {
  EXPECT_THROW(parse_survey_csv(""), Error);
  EXPECT_THROW(parse_survey_csv("label,count\n"), Error);
  EXPECT_THROW(parse_survey_csv("closer,abc\n"), Error);
  EXPECT_THROW(parse_survey_csv("closer,-3\n"), Error);
  EXPECT_THROW(parse_survey_csv("nearer,3\n"), Error);
  EXPECT_THROW(parse_survey_csv("closer,0\nfarther,0\n"), Error);
  EXPECT_THROW(parse_survey_csv("closer 3\n"), Error);
}

}  // namespace
}  // namespace moon

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "moon/error.hpp"
#include "moon/io.hpp"
#include "moon/models.hpp"

namespace moon {
namespace {

const SkyDome kFlat{4.0, 1.0};

SceneContext neutral_context() {
  SceneContext ctx;
  ctx.elevation = Angle::degrees(90.0);
  ctx.referent_angular_size = Angle::degrees(0.5);
  return ctx;
}

TEST(DomeDistance, SemiAxesAndDiagonal) {
  EXPECT_DOUBLE_EQ(dome_distance(kFlat, Angle::degrees(0.0)), 4.0);
  EXPECT_DOUBLE_EQ(dome_distance(kFlat, Angle::degrees(90.0)), 1.0);
  // 1 / sqrt(0.5/16 + 0.5), mpmath.
  EXPECT_NEAR(dome_distance(kFlat, Angle::degrees(45.0)), 1.3719886811400707, 1e-12);
}

TEST(DomeDistance, Errors) {
  EXPECT_THROW(dome_distance(kFlat, Angle::degrees(-1.0)), Error);
  EXPECT_THROW(dome_distance(kFlat, Angle::degrees(91.0)), Error);
  EXPECT_THROW(dome_distance({1.0, 2.0}, Angle::degrees(10.0)), Error);
  EXPECT_THROW(dome_distance({0.0, 0.0}, Angle::degrees(10.0)), Error);
}

TEST(DomeDistance, MonotoneNonincreasingProperty) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double z = 0.1 + 10.0 * unit(gen);
    const SkyDome dome{z * (1.0 + 5.0 * unit(gen)), z};
    double prev = dome_distance(dome, Angle::degrees(0.0));
    for (int e = 1; e <= 90; ++e) {
      const double cur = dome_distance(dome, Angle::degrees(e));
      EXPECT_LE(cur, prev);
      // Continuity: a 1 degree step never jumps by more than the axis gap.
      EXPECT_LT(prev - cur, dome.horizon_distance - dome.zenith_distance + 1e-12);
      prev = cur;
    }
  }
}

TEST(ApparentDistance, Examples) {
  EXPECT_EQ(apparent_distance_prediction(kFlat, Angle::degrees(90.0)).magnification, 1.0);
  EXPECT_DOUBLE_EQ(apparent_distance_prediction(kFlat, Angle::degrees(0.0)).magnification, 4.0);
  EXPECT_NEAR(apparent_distance_prediction({1.2, 1.0}, Angle::degrees(0.0)).magnification, 1.2,
              1e-12);
  EXPECT_EQ(apparent_distance_prediction(kFlat, Angle::degrees(0.0)).model,
            ModelId::ApparentDistance);
}

TEST(ApparentDistance, HemisphereIsNeutralEverywhere) {
  for (int e = 0; e <= 90; ++e)
    EXPECT_NEAR(apparent_distance_prediction({3.0, 3.0}, Angle::degrees(e)).magnification, 1.0,
                1e-15);
}

TEST(SizeContrast, Examples) {
  const Angle a = Angle::degrees(0.5);
  EXPECT_DOUBLE_EQ(size_contrast_prediction(a, a, 1.0).magnification, 1.0);
  EXPECT_NEAR(size_contrast_prediction(a, Angle::degrees(0.55), 1.0).magnification, 1.1, 1e-12);
  EXPECT_NEAR(size_contrast_prediction(a, Angle::degrees(0.55), 2.0).magnification, 1.21, 1e-12);
  EXPECT_THROW(size_contrast_prediction(Angle::degrees(0.0), a, 1.0), Error);
  EXPECT_THROW(size_contrast_prediction(a, a, 0.0), Error);
}

TEST(SizeContrast, ReciprocityProperty) {
  std::mt19937_64 gen(22);
  std::uniform_real_distribution<double> size(0.01, 30.0);
  std::uniform_real_distribution<double> gamma(0.1, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const Angle a = Angle::degrees(size(gen));
    const Angle b = Angle::degrees(size(gen));
    const double g = gamma(gen);
    EXPECT_NEAR(size_contrast_prediction(a, b, g).magnification *
                    size_contrast_prediction(b, a, g).magnification,
                1.0, 1e-12);
  }
}

TEST(CueMapping, RejectsBadParameters) {
  auto kind = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  EXPECT_EQ(kind([] { CueMapping(1.0, 1.0); }), ErrorKind::Configuration);
  EXPECT_EQ(kind([] { CueMapping(-0.1, 1.0); }), ErrorKind::Configuration);
  EXPECT_EQ(kind([] { CueMapping(0.3, 0.0); }), ErrorKind::Configuration);
  EXPECT_EQ(kind([] { CueMapping(0.3, 1.0, 1.0); }), ErrorKind::Configuration);
  // r_max = 1/6 * (1 + 10) is past the pole.
  EXPECT_EQ(kind([] { CueMapping::calibrated(DisplacementRatio(1.0 / 6.0), 10.0, 1.0); }),
            ErrorKind::Configuration);
}

TEST(DisparityConflict, AbsentSkyIsNeutral) {
  const SceneContext ctx = neutral_context();
  EXPECT_NEAR(disparity_conflict_prediction(ctx, CueMapping(0.5, 100.0)).magnification, 1.0,
              1e-12);
}

TEST(DisparityConflict, CalibratedToOneSixth) {
  SceneContext ctx = neutral_context();
  ctx.elevation = Angle::degrees(0.0);
  ctx.perceived_sky_distance = 250.0;
  const auto mapping = CueMapping::calibrated(DisplacementRatio(1.0 / 6.0), 250.0, 250.0);
  EXPECT_NEAR(mapping.r_max(), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(disparity_conflict_prediction(ctx, mapping).magnification, 1.2, 1e-3);

  const auto inverse = CueMapping::calibrated(
      displacement_for_magnification(ctx.moon_angular_size, 1.2), 250.0, 500.0);
  EXPECT_NEAR(disparity_conflict_prediction(ctx, inverse).magnification, 1.2, 1e-9);
}

TEST(DisparityConflict, MetropolitanSky) {
  SceneContext ctx = neutral_context();
  ctx.elevation = Angle::degrees(2.0);
  ctx.perceived_sky_distance = 25.0;
  // 0.75 / (1 + 25/50) = 0.5
  EXPECT_NEAR(disparity_conflict_prediction(ctx, CueMapping(0.75, 50.0)).magnification, 2.0,
              1e-3);
}

TEST(DisparityConflict, MonotoneInSkyDistanceProperty) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const CueMapping mapping(0.95 * unit(gen), 1.0 + 1000.0 * unit(gen), 0.2 * unit(gen));
    SceneContext ctx = neutral_context();
    double prev = std::numeric_limits<double>::infinity();
    for (double d = 0.5; d < 1e5; d *= 1.8) {
      ctx.perceived_sky_distance = d;
      const double m = disparity_conflict_prediction(ctx, mapping).magnification;
      EXPECT_LE(m, prev);
      EXPECT_GE(m, 1.0 - 1e-12);
      prev = m;
    }
  }
}

TEST(CompareModels, NeutralInputsAreAllOne) {
  const auto preds = compare_models(neutral_context(), kFlat, 1.0, CueMapping(0.4, 10.0));
  ASSERT_EQ(preds.size(), 3u);
  EXPECT_EQ(preds[0].model, ModelId::DisparityConflict);
  EXPECT_EQ(preds[1].model, ModelId::ApparentDistance);
  EXPECT_EQ(preds[2].model, ModelId::SizeContrast);
  for (const auto& p : preds) EXPECT_NEAR(p.magnification, 1.0, 1e-12);
}

TEST(CompareModels, CalibratedHorizonMatchesComponents) {
  SceneContext ctx;
  ctx.elevation = Angle::degrees(0.0);
  ctx.referent_angular_size = Angle::degrees(0.5);
  ctx.reference_referent_angular_size = Angle::degrees(0.55);
  ctx.perceived_sky_distance = 100.0;
  const SkyDome dome{1.2, 1.0};
  const auto mapping = CueMapping::calibrated(DisplacementRatio(1.0 / 6.0), 100.0, 100.0);
  const auto preds = compare_models(ctx, dome, 1.0, mapping);
  EXPECT_EQ(preds[0].magnification, disparity_conflict_prediction(ctx, mapping).magnification);
  EXPECT_EQ(preds[1].magnification, apparent_distance_prediction(dome, ctx.elevation).magnification);
  EXPECT_EQ(preds[2].magnification,
            size_contrast_prediction(ctx.referent_angular_size,
                                     *ctx.reference_referent_angular_size, 1.0)
                .magnification);
  EXPECT_GT(preds[0].magnification, 1.0);
  for (const auto& p : preds) EXPECT_TRUE(std::isfinite(p.magnification));
}

TEST(CompareModels, JsonShape) {
  const auto preds = compare_models(neutral_context(), kFlat, 1.0, CueMapping());
  const Json j = comparison_to_json(Angle::degrees(90.0), preds);
  EXPECT_NEAR(j["elevation_deg"].get<double>(), 90.0, 1e-12);
  ASSERT_EQ(j["predictions"].size(), 3u);
  EXPECT_EQ(j["predictions"][0]["model"], "DisparityConflict");
  EXPECT_EQ(j["predictions"][2]["model"], "SizeContrast");
}

TEST(ModelInputs, ParsesCalibratedMapping) {
  const Json j = Json::parse(R"({
    "elevation_deg": 0, "referent_deg": 0.5, "perceived_sky_distance_m": 300,
    "dome": {"horizon_distance_m": 1.2, "zenith_distance_m": 1},
    "mapping": {"calibrate_magnification": 1.2, "at_distance_m": 300}
  })");
  const ModelInputs in = model_inputs_from_json(j);
  const auto preds = compare_models(in.context, in.dome, in.gamma, in.mapping);
  EXPECT_NEAR(preds[0].magnification, 1.2, 1e-9);
  EXPECT_NEAR(preds[1].magnification, 1.2, 1e-12);
}

TEST(ModelInputs, ReportsOffendingField) {
  try {
    model_inputs_from_json(Json::parse(R"({"elevation_deg": "x", "referent_deg": 1})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Validation);
    EXPECT_NE(std::string(e.what()).find("elevation_deg"), std::string::npos);
  }
}

}  // namespace
}  // namespace moon

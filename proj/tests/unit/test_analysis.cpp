#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracle.hpp"
#include "rydstab/analysis.hpp"
#include "rydstab/error.hpp"
#include "rydstab/units.hpp"

using namespace rydstab;
using namespace rydstab::analysis;

namespace {

std::vector<FringeSample> exact_fringe(double o, double c, double phase, int points) {
  std::vector<FringeSample> s;
  for (int k = 0; k < points; ++k) {
    const double phi = kTwoPi * k / points;
    s.push_back(FringeSample::exact(phi, o + 0.5 * c * std::cos(phi - phase)));
  }
  return s;
}

FringeFit fitted(double contrast, double phase) {
  FringeFit f;
  f.offset = 0.5;
  f.contrast = contrast;
  f.phase = phase;
  f.phase_defined = true;
  return f;
}

}  // namespace

TEST(Fit, RecoversExactFringe) {
  for (double phase : {-2.9, -0.3, 0.0, 1.7, kPi}) {
    const FringeFit f = fit_fringe(exact_fringe(0.45, 0.62, phase, 12));
    EXPECT_NEAR(f.offset, 0.45, 1e-8);
    EXPECT_NEAR(f.contrast, 0.62, 1e-8);
    EXPECT_NEAR(wrap_phase(f.phase - phase), 0.0, 1e-8);
    EXPECT_TRUE(f.phase_defined);
    EXPECT_FALSE(f.at_bound);
    EXPECT_NEAR(f.evaluate(0.3), 0.45 + 0.31 * std::cos(0.3 - phase), 1e-8);
  }
}

TEST(Fit, ConstrainedToPhysicalBounds) {
  // Data with apparent contrast above the offset bound.
  std::vector<FringeSample> s;
  for (int k = 0; k < 8; ++k) {
    const double phi = kTwoPi * k / 8;
    s.push_back(FringeSample::exact(phi, std::clamp(0.3 + 0.5 * std::cos(phi), 0.0, 1.0)));
  }
  const FringeFit f = fit_fringe(s);
  EXPECT_LE(f.contrast, 2.0 * std::min(f.offset, 1.0 - f.offset) + 1e-12);
  EXPECT_GE(f.offset, 0.0);
}

TEST(Fit, CoverageRequirements) {
  std::vector<FringeSample> few = exact_fringe(0.5, 0.5, 0.0, 12);
  few.resize(3);
  EXPECT_THROW(fit_fringe(few), InvalidArgument);
  std::vector<FringeSample> narrow;
  for (int k = 0; k < 6; ++k) narrow.push_back(FringeSample::exact(0.1 * k, 0.5));
  EXPECT_THROW(fit_fringe(narrow), InvalidArgument);
  EXPECT_THROW(FringeSample::counts(0.0, 5, 3), InvalidArgument);
}

TEST(Fit, FlatFringeHasNoPhase) {
  const FringeFit f = fit_fringe(exact_fringe(0.4, 0.0, 0.0, 8));
  EXPECT_FALSE(f.phase_defined);
  EXPECT_THROW(delta_phi(f, f), InvalidArgument);
}

TEST(Fit, TotalErrorIsQuadratureSum) {
  const ParamError e{0.3, 0.4};
  EXPECT_DOUBLE_EQ(e.total(), 0.5);
  EXPECT_DOUBLE_EQ((ParamError{1e-3, 0.0}).total(), 1e-3);
}

TEST(Fit, DeltaPhiWraps) {
  EXPECT_NEAR(delta_phi(fitted(0.5, 3.0), fitted(0.5, -3.0)), kTwoPi - 6.0, 1e-15);
  EXPECT_NEAR(delta_phi(fitted(0.5, 0.2), fitted(0.5, 1.0)), 0.8, 1e-15);
}

TEST(Bootstrap, AgreesWithDeltaMethod) {
  const double o = 0.5, c = 0.6, phase = 0.7;
  const int points = 16, shots = 500;
  std::vector<FringeSample> s;
  std::vector<double> phis;
  std::vector<int> counts;
  for (int k = 0; k < points; ++k) {
    const double phi = kTwoPi * k / points;
    const double p = o + 0.5 * c * std::cos(phi - phase);
    s.push_back(FringeSample::counts(phi, std::llround(p * shots), shots));
    phis.push_back(phi);
    counts.push_back(shots);
  }
  const Eigen::Matrix3d cov = oracle::delta_method_cov(phis, counts, o, c, phase);
  BootstrapOptions opts;
  opts.resamples = 300;
  opts.seed = 3;
  const BootstrapResult r = bootstrap(s, opts);
  EXPECT_EQ(r.resamples, 300);
  EXPECT_NEAR(r.fit.contrast_err.bootstrap / std::sqrt(cov(1, 1)), 1.0, 0.2);
  EXPECT_NEAR(r.fit.phase_err.bootstrap / std::sqrt(cov(2, 2)), 1.0, 0.2);
  EXPECT_NEAR(r.fit.offset_err.bootstrap / std::sqrt(cov(0, 0)), 1.0, 0.2);
  // The fit covariance is the same delta-method quantity.
  EXPECT_NEAR(r.full_sample.phase_err.fit / std::sqrt(cov(2, 2)), 1.0, 0.05);
  EXPECT_DOUBLE_EQ(r.fit.phase_err.total(),
                   std::hypot(r.fit.phase_err.bootstrap, r.fit.phase_err.fit));

  const BootstrapResult again = bootstrap(s, opts);
  EXPECT_EQ(again.fit.phase, r.fit.phase);
  EXPECT_EQ(again.fit.contrast_err.bootstrap, r.fit.contrast_err.bootstrap);
  opts.resamples = 1;
  EXPECT_THROW(bootstrap(s, opts), InvalidArgument);
}

TEST(ContrastDecay, ExactGeometricSeries) {
  std::vector<ContrastPoint> pts;
  for (int n = 0; n <= 4; ++n) pts.push_back({n, 0.9 * std::pow(0.8, n), 0.0});
  const ContrastDecay d = contrast_decay_fit(pts);
  EXPECT_NEAR(d.fidelity, 0.8, 1e-12);
  EXPECT_NEAR(d.c0, 0.9, 1e-12);
  pts[1].error = 0.01;
  EXPECT_THROW(contrast_decay_fit(pts), InvalidArgument);
  pts.resize(2);
  EXPECT_THROW(contrast_decay_fit(pts), InvalidArgument);
}

TEST(ContrastCorrection, RoundTripAndClipping) {
  const auto corrected = correct_contrast({0.7, 0.9, 0.5, 0.35}, 0.5);
  EXPECT_NEAR(corrected[0].value, 0.9, 1e-15);
  EXPECT_TRUE(corrected[1].clipped);
  EXPECT_EQ(corrected[1].value, 1.0);
  EXPECT_NEAR(corrected[2].value, 0.5, 1e-15);
  const auto back = uncorrect_contrast({corrected[0].value, corrected[3].value}, 0.5);
  EXPECT_NEAR(back[0], 0.7, 1e-15);
  EXPECT_NEAR(back[1], 0.35, 1e-15);
  EXPECT_THROW(correct_contrast({0.5}, 0.0), InvalidArgument);
}

TEST(OperatingPoint, PicksWidestGap) {
  const OperatingPoint op = operating_point({fitted(0.8, 0.0), fitted(0.6, 0.1)},
                                            {fitted(0.8, kPi), fitted(0.7, kPi - 0.1)});
  EXPECT_TRUE(op.separated);
  EXPECT_GT(op.gap, 0.6);
  // Either orientation is acceptable; check the gap at the reported phase.
  const double even_min = std::min(fitted(0.8, 0.0).evaluate(op.phase), fitted(0.6, 0.1).evaluate(op.phase));
  const double odd_max = std::max(fitted(0.8, kPi).evaluate(op.phase), fitted(0.7, kPi - 0.1).evaluate(op.phase));
  if (op.even_high) {
    EXPECT_NEAR(even_min - odd_max, op.gap, 1e-12);
  }
  EXPECT_THROW(operating_point({}, {fitted(0.8, 0.0)}), InvalidArgument);
}

TEST(Parity, SummaryScoresAssignments) {
  EXPECT_EQ(parity(0), 1);
  EXPECT_EQ(parity(3), -1);
  const ParitySummary s = parity_summary({{2, 0, true}, {2, 1, false}, {2, 2, true}, {1, 1, true}}, true);
  EXPECT_EQ(s.total, 4);
  EXPECT_EQ(s.correct, 3);
  EXPECT_DOUBLE_EQ(s.accuracy, 0.75);
  ASSERT_EQ(s.cells.size(), 4u);
  EXPECT_EQ(s.cells[0].n_loaded, 1);
  EXPECT_EQ(s.cells[0].predicted_sign, -1);
  const ParitySummary flipped = parity_summary({{2, 0, true}}, false);
  EXPECT_EQ(flipped.correct, 0);
  EXPECT_THROW(parity_summary({{1, 2, true}}, true), InvalidArgument);
}

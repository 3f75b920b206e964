#include "hm/rod_model.hpp"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"
#include "hm/quantum_ref.hpp"
#include "hm/stats.hpp"
#include "oracles.hpp"

namespace {

using hm::BreakWeight;
using hm::Frame;
using hm::RodMeasurement;
using hm::RodState;
using hm::Vec3;

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const double kInvSqrt3 = 1.0 / std::sqrt(3.0);

const RodState kP0{hm::canonicalize(Vec3{kInvSqrt2, 0.5, 0.5})};
const RodMeasurement kIdentity{Frame::identity()};

// Frozen from oracle::rod_tree_by_angles evaluated in 30-digit arithmetic at
// p = (1/sqrt2, 1/2, 1/2), identity frame.
constexpr double kVariantStage1[3] = {0.289897948556636, 0.355051025721682, 0.355051025721682};
constexpr double kVariantBoth[3] = {0.415968151066566, 0.292015924466717, 0.292015924466717};
constexpr double kVariantFirstOnly[3] = {0.473401367628910, 0.263299316185545, 0.263299316185545};

std::array<Vec3, 3> Axes(const Frame& f) { return {f.axis(0).vec(), f.axis(1).vec(), f.axis(2).vec()}; }

TEST(BreakWeight, ShapeOnQuarterTurn) {
  for (const auto w : {BreakWeight::quantum(), BreakWeight::uniform_variant()}) {
    EXPECT_EQ(w(0.0), 0.0);
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
      const double v = w(std::numbers::pi / 2 * i / 100.0);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
  EXPECT_NEAR(BreakWeight::quantum()(std::numbers::pi / 6), 0.25, 1e-15);
  EXPECT_NEAR(BreakWeight::uniform_variant()(std::numbers::pi / 6), 0.5, 1e-15);
}

TEST(Stage1, Examples) {
  auto d = hm::stage1_distribution(RodState{hm::canonicalize(Vec3{1, 0, 0})}, kIdentity, BreakWeight::quantum());
  EXPECT_EQ(d[0], 0.0);
  EXPECT_NEAR(d[1], 0.5, 1e-15);
  EXPECT_NEAR(d[2], 0.5, 1e-15);

  d = hm::stage1_distribution(kP0, kIdentity, BreakWeight::quantum());
  EXPECT_NEAR(d[0], 0.25, 1e-15);
  EXPECT_NEAR(d[1], 0.375, 1e-15);
  EXPECT_NEAR(d[2], 0.375, 1e-15);

  d = hm::stage1_distribution(kP0, kIdentity, BreakWeight::uniform_variant());
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(d[i], kVariantStage1[i], 1e-14);
}

TEST(Stage2, Examples) {
  const Frame id = Frame::identity();
  auto d = hm::stage2_distribution(hm::canonicalize(Vec3{0, 1, 0}), id, 1, 2, BreakWeight::quantum());
  EXPECT_EQ(d[0], 0.0);
  EXPECT_EQ(d[1], 1.0);

  const auto diag = hm::canonicalize(Vec3{0, kInvSqrt2, kInvSqrt2});
  for (const auto w : {BreakWeight::quantum(), BreakWeight::uniform_variant()}) {
    d = hm::stage2_distribution(diag, id, 1, 2, w);
    EXPECT_NEAR(d[0], 0.5, 1e-15);
    EXPECT_NEAR(d[1], 0.5, 1e-15);
  }
  EXPECT_THROW(hm::stage2_distribution(diag, id, 1, 1, BreakWeight::quantum()), std::invalid_argument);
}

TEST(RodAnalytic, BornAtP0WithEqualPaths) {
  const auto a = hm::rod_analytic(kP0, kIdentity, BreakWeight::quantum());
  EXPECT_NEAR(a.outcomes[0], 0.5, 1e-15);
  EXPECT_NEAR(a.outcomes[1], 0.25, 1e-15);
  EXPECT_NEAR(a.outcomes[2], 0.25, 1e-15);
  const auto c = hm::direction_cosines(kP0.p, kIdentity.e);
  for (const auto& path : a.paths) {
    EXPECT_NEAR(path.probability, 0.5 * c[path.path.outcome] * c[path.path.outcome], 1e-15);
    if (path.path.outcome == 2) {
      EXPECT_NEAR(path.probability, 0.125, 1e-15);
    }
  }
}

TEST(RodAnalytic, EigenstateAnyWeight) {
  for (const auto w : {BreakWeight::quantum(), BreakWeight::uniform_variant(),
                       BreakWeight::uniform_variant(hm::VariantStages::FirstOnly)}) {
    const auto a = hm::rod_analytic(RodState{hm::canonicalize(Vec3{1, 0, 0})}, kIdentity, w);
    EXPECT_EQ(a.outcomes[0], 1.0);
    EXPECT_EQ(a.outcomes[1], 0.0);
    EXPECT_EQ(a.outcomes[2], 0.0);
  }
}

TEST(RodAnalytic, UniformVariantDeviatesFromBorn) {
  const auto a = hm::rod_analytic(kP0, kIdentity, BreakWeight::uniform_variant());
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a.outcomes[i], kVariantBoth[i], 1e-14);
  EXPECT_GT(std::abs(a.outcomes[2] - 0.25), 0.02);
  EXPECT_NEAR(a.outcomes[2] - 0.25, 0.042015924466717, 1e-14);

  const auto first_only = hm::rod_analytic(kP0, kIdentity, BreakWeight::uniform_variant(hm::VariantStages::FirstOnly));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(first_only.outcomes[i], kVariantFirstOnly[i], 1e-14);
}

TEST(RodAnalytic, InPlaneStateNeverDegenerates) {
  // (1/sqrt2, 1/sqrt2, 0): both first-stage branches that drop an in-plane
  // axis project onto an axis.
  const RodState s{hm::canonicalize(Vec3{kInvSqrt2, kInvSqrt2, 0})};
  for (const auto w : {BreakWeight::quantum(), BreakWeight::uniform_variant()}) {
    const auto a = hm::rod_analytic(s, kIdentity, w);
    EXPECT_NEAR(a.outcomes.sum(), 1.0, 1e-15);
    EXPECT_EQ(a.outcomes[2], 0.0);
  }
}

TEST(RodAnalytic, AgreesWithAngleOracleOnRandomInputs) {
  hm::SplitMix64 rng(17);
  for (int n = 0; n < 2000; ++n) {
    const RodState s{hm::random_ray(rng)};
    const RodMeasurement m{hm::random_frame(rng)};
    const auto q = hm::rod_analytic(s, m, BreakWeight::quantum());
    const auto oq = hm::oracle::rod_tree_by_angles(s.p.vec(), Axes(m.e), hm::oracle::sin_squared,
                                                   hm::oracle::sin_squared);
    const auto v = hm::rod_analytic(s, m, BreakWeight::uniform_variant());
    const auto ov =
        hm::oracle::rod_tree_by_angles(s.p.vec(), Axes(m.e), hm::oracle::sin_plain, hm::oracle::sin_plain);
    for (std::size_t k = 0; k < 3; ++k) {
      // acos near 1 costs precision in the oracle, hence the looser bound.
      ASSERT_NEAR(q.outcomes[k], oq.outcome[k], 1e-8);
      ASSERT_NEAR(v.outcomes[k], ov.outcome[k], 1e-8);
    }
    for (const auto& p : v.paths) {
      ASSERT_NEAR(p.probability, ov.path[p.path.first_broken][p.path.second_broken], 1e-8);
    }
  }
}

TEST(RodAnalytic, BornPathIdentityAndNormalization) {
  hm::SplitMix64 rng(18);
  for (int n = 0; n < 1000; ++n) {
    const RodState s{hm::random_ray(rng)};
    const RodMeasurement m{hm::random_frame(rng)};
    const auto born = hm::born_probabilities(hm::RealStateVector(s.p), m.e);
    const auto a = hm::rod_analytic(s, m, BreakWeight::quantum());
    for (std::size_t k = 0; k < 3; ++k) ASSERT_NEAR(a.outcomes[k], born[k], 1e-12);
    for (const auto& p : a.paths) ASSERT_NEAR(p.probability, 0.5 * born[p.path.outcome], 1e-12);
    ASSERT_NEAR(a.outcomes.sum(), 1.0, 1e-12);
    ASSERT_NEAR(hm::rod_analytic(s, m, BreakWeight::uniform_variant()).outcomes.sum(), 1.0, 1e-12);
  }
}

TEST(RodAnalytic, PathsCoverAllOrders) {
  const auto a = hm::rod_analytic(kP0, kIdentity, BreakWeight::quantum());
  for (const auto& p : a.paths) {
    EXPECT_NE(p.path.first_broken, p.path.second_broken);
    EXPECT_EQ(p.path.first_broken + p.path.second_broken + p.path.outcome, 3u);
  }
}

TEST(RodSample, EigenstateIsCertain) {
  const RodState axis2{kIdentity.e.axis(1)};
  hm::SplitMix64 rng(2);
  for (int i = 0; i < 10000; ++i) {
    const auto r = hm::rod_sample(axis2, kIdentity, BreakWeight::quantum(), rng);
    ASSERT_EQ(r.outcome, 1u);
    ASSERT_EQ(r.new_state.p, kIdentity.e.axis(1));
    ASSERT_NE(r.path.first_broken, 1u);
  }
}

TEST(RodSample, SymmetricStateMonteCarlo) {
  const auto run = hm::run_trials(
      {hm::RodExperiment{RodState{hm::canonicalize(Vec3{kInvSqrt3, kInvSqrt3, kInvSqrt3})}, kIdentity}, 1000000, 3});
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(run.counts.frequency(k), 1.0 / 3.0, 0.002);
}

TEST(RodSample, P0MonteCarlo) {
  const auto run = hm::run_trials({hm::RodExperiment{kP0, kIdentity}, 1000000, 4});
  EXPECT_NEAR(run.counts.frequency(0), 0.5, 0.002);
  EXPECT_NEAR(run.counts.frequency(1), 0.25, 0.002);
  EXPECT_NEAR(run.counts.frequency(2), 0.25, 0.002);
}

TEST(RodSample, PathFrequenciesMatchTree) {
  hm::SplitMix64 rng(44);
  const auto tree = hm::rod_analytic(kP0, kIdentity, BreakWeight::uniform_variant());
  std::array<std::array<int, 3>, 3> counts{};
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto r = hm::rod_sample(kP0, kIdentity, BreakWeight::uniform_variant(), rng);
    ASSERT_EQ(r.new_state.p, kIdentity.e.axis(r.outcome));
    ++counts[r.path.first_broken][r.path.second_broken];
  }
  for (const auto& p : tree.paths) {
    const double f = static_cast<double>(counts[p.path.first_broken][p.path.second_broken]) / n;
    EXPECT_NEAR(f, p.probability, 5.0 * std::sqrt(p.probability * (1 - p.probability) / n));
  }
}

TEST(RodSample, ChiSquareAgreementOnRandomConfigurations) {
  hm::SplitMix64 rng(2718);
  int passes = 0;
  for (int cfg = 0; cfg < 20; ++cfg) {
    const RodState s{hm::random_ray(rng)};
    const RodMeasurement m{hm::random_frame(rng)};
    const BreakWeight w = cfg % 2 == 0 ? BreakWeight::quantum() : BreakWeight::uniform_variant();
    const auto run = hm::run_trials({hm::RodExperiment{s, m, w}, 1000000, 500u + cfg});
    const auto gof = hm::chi_square_gof(run.counts, hm::rod_analytic(s, m, w).outcomes, 0.01);
    passes += gof.pass ? 1 : 0;
  }
  // Each test passes with probability 0.99.
  EXPECT_GE(passes, 18);
}

TEST(RodSample, RepeatedMeasurementRepeatsOutcome) {
  hm::SplitMix64 rng(9);
  for (int chain = 0; chain < 10000; ++chain) {
    const RodMeasurement m{hm::random_frame(rng)};
    const BreakWeight w = chain % 2 == 0 ? BreakWeight::quantum() : BreakWeight::uniform_variant();
    const auto first = hm::rod_sample(RodState{hm::random_ray(rng)}, m, w, rng);
    const auto second = hm::rod_sample(first.new_state, m, w, rng);
    ASSERT_EQ(first.outcome, second.outcome);
    EXPECT_NEAR(hm::rod_analytic(first.new_state, m, w).outcomes[first.outcome], 1.0, 1e-15);
  }
}

TEST(RodMarginal, QuantumIsFrameIndependent) {
  const auto quantum = hm::rod_marginal(kP0, BreakWeight::quantum());
  const auto variant = hm::rod_marginal(kP0, BreakWeight::uniform_variant());
  const auto pair = hm::rotated_about_axis(Frame::identity(), 0, std::numbers::pi / 4);
  EXPECT_NEAR(quantum(pair.a, pair.axis_a), quantum(pair.b, pair.axis_b), 1e-15);
  // Identity frame gives 0.41597 on axis 1; the rotated frame, where p has
  // cosines (1/sqrt2, 1/sqrt2, 0), gives 1/2.
  EXPECT_NEAR(variant(pair.b, pair.axis_b), 0.5, 1e-14);
  EXPECT_NEAR(variant(pair.b, pair.axis_b) - variant(pair.a, pair.axis_a), 0.0840318489334343, 1e-13);
}

}  // namespace

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "excursion/mtp.hpp"
#include "oracles.hpp"

namespace excursion {
namespace {

std::vector<std::uint8_t> flags(std::initializer_list<int> v) {
  return std::vector<std::uint8_t>(v.begin(), v.end());
}

TEST(GenericStepUp, SingleNonSignificant) {
  const std::vector<double> p{0.5}, d{0.05};
  const StepUpResult r = generic_step_up(p, d);
  EXPECT_EQ(r.k, 0u);
  EXPECT_EQ(r.p_k, 0.0);
  EXPECT_EQ(r.rejected_count(), 0u);
}

TEST(GenericStepUp, FourTests) {
  const std::vector<double> p{0.01, 0.02, 0.04, 0.2}, d{0.0125, 0.025, 0.0375, 0.05};
  const StepUpResult r = generic_step_up(p, d);
  EXPECT_EQ(r.k, 2u);
  EXPECT_EQ(r.p_k, 0.02);
  EXPECT_EQ(r.rejected, flags({1, 1, 0, 0}));
}

TEST(GenericStepUp, AllZero) {
  const std::vector<double> p(6, 0.0);
  const StepUpResult r = bh_step_up(p, 0.05);
  EXPECT_EQ(r.k, 6u);
  EXPECT_EQ(r.rejected_count(), 6u);
}

TEST(GenericStepUp, RejectsBadInputs) {
  const std::vector<double> p{0.1, 0.2};
  EXPECT_THROW(generic_step_up(p, std::vector<double>{0.1}), std::invalid_argument);
  EXPECT_THROW(generic_step_up(p, std::vector<double>{0.2, 0.1}), std::invalid_argument);
  EXPECT_THROW(generic_step_up(std::vector<double>{1.5, 0.1}, std::vector<double>{0.1, 0.2}),
               std::invalid_argument);
}

TEST(BhStepUp, FourTests) {
  const std::vector<double> p{0.01, 0.02, 0.04, 0.2};
  const StepUpResult r = bh_step_up(p, 0.05);
  EXPECT_EQ(r.rejected_count(), 2u);
  EXPECT_EQ(r.p_k, 0.02);
}

TEST(BhStepUp, BoundaryTieAtAlpha) {
  for (std::size_t m : {1u, 3u, 7u, 10u, 49u}) {
    const std::vector<double> p(m, 0.05);
    EXPECT_EQ(bh_step_up(p, 0.05).k, m) << m;
  }
}

TEST(BhStepUp, NoEvidence) {
  const std::vector<double> p{0.9, 0.8, 0.7};
  EXPECT_EQ(bh_step_up(p, 0.05).k, 0u);
}

TEST(BhStepUp, TiesAtThresholdAllRejected) {
  // Sorted: 0.01 0.03 0.03 0.5; thresholds 0.0125 0.025 0.0375 0.05 -> k = 3.
  const std::vector<double> p{0.03, 0.5, 0.01, 0.03};
  const StepUpResult r = bh_step_up(p, 0.05);
  EXPECT_EQ(r.k, 3u);
  EXPECT_EQ(r.rejected, flags({1, 0, 1, 1}));
}

TEST(BhStepUp, MatchesBruteForce) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> size(1, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> grid(0, 40);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t m = size(rng);
    std::vector<double> p(m);
    // Alternate continuous draws with a coarse grid that produces ties, and
    // squash toward zero so rejections are common.
    for (auto& x : p) x = trial % 2 ? std::pow(u(rng), 3.0) : grid(rng) / 400.0;
    const double alpha = trial % 3 ? 0.05 : 0.2;
    const StepUpResult got = bh_step_up(p, alpha);
    const auto want = oracle::brute_step_up(p, oracle::bh_thresholds(m, alpha));
    ASSERT_EQ(got.k, want.k) << "trial " << trial;
    ASSERT_EQ(got.p_k, want.p_k) << "trial " << trial;
    ASSERT_EQ(got.rejected, want.rejected) << "trial " << trial;
    EXPECT_LE(got.p_k, alpha);
  }
}

TEST(BhStepUp, LoweringOnePValueNeverLowersK) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> size(1, 10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t m = size(rng);
    std::vector<double> p(m);
    for (auto& x : p) x = std::pow(u(rng), 2.5);
    const std::size_t before = bh_step_up(p, 0.1).k;
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    const std::size_t i = pick(rng);
    p[i] *= u(rng);
    const std::size_t after = bh_step_up(p, 0.1).k;
    EXPECT_GE(after, before);
    EXPECT_EQ(after, oracle::brute_step_up(p, oracle::bh_thresholds(m, 0.1)).k);
  }
}

TEST(BhStepUp, PermutationEquivariant) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> p(9);
    for (auto& x : p) x = std::pow(u(rng), 3.0);
    std::vector<std::size_t> perm(9);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> q(9);
    for (std::size_t i = 0; i < 9; ++i) q[i] = p[perm[i]];
    const StepUpResult a = bh_step_up(p, 0.05), b = bh_step_up(q, 0.05);
    EXPECT_EQ(a.k, b.k);
    EXPECT_EQ(a.p_k, b.p_k);
    for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(b.rejected[i], a.rejected[perm[i]]);
  }
}

TEST(FKappa, ClosedFormValues) {
  EXPECT_EQ(f_kappa(0.4, 2.0), 1.0);
  EXPECT_EQ(f_kappa(0.5, 2.0), 1.0);
  EXPECT_NEAR(f_kappa(0.625, 2.0), 2.0, 1e-12);
  EXPECT_NEAR(f_kappa(0.82, 2.0), 5.0, 1e-12);
  EXPECT_NEAR(f_kappa(0.75, 2.0), 1.0 / (1.0 - std::sqrt(0.5)), 1e-12);
}

TEST(FKappa, CappedAtOneAndMonotone) {
  EXPECT_EQ(f_kappa(1.0, 2.0), 1e6);
  EXPECT_EQ(f_kappa(1.0, 2.0, 50.0), 50.0);
  double prev = 1.0;
  for (double x = 0.0; x <= 1.0; x += 0.001) {
    const double f = f_kappa(x, 2.0);
    EXPECT_GE(f, prev);
    EXPECT_GE(f, 1.0);
    prev = f;
  }
}

TEST(TwoStage, PrintedNullFractionTraceOne) {
  const std::vector<double> p{0.001, 0.3, 0.5, 0.9};
  const TwoStageResult r = two_stage_adaptive(p, 0.05, InverseNullEstimate::PrintedNullFraction);
  EXPECT_EQ(r.stage_one_rejections, 1u);
  EXPECT_EQ(r.null_count_estimate, 3.0);
  EXPECT_NEAR(r.inverse_null_proportion, 3.414213562373096, 1e-12);
  EXPECT_EQ(r.result.rejected, flags({1, 0, 0, 0}));
  EXPECT_EQ(r.result.p_k, 0.001);
}

TEST(TwoStage, PrintedNullFractionAllHigh) {
  const std::vector<double> p(5, 0.9);
  const TwoStageResult r = two_stage_adaptive(p, 0.05, InverseNullEstimate::PrintedNullFraction);
  EXPECT_EQ(r.stage_one_rejections, 0u);
  EXPECT_EQ(r.inverse_null_proportion, 1e6);
  // Clamped thresholds reach 1, so every p-value is rejected.
  EXPECT_EQ(r.result.k, 5u);
}

TEST(TwoStage, PrintedNullFractionStrongSignals) {
  const std::vector<double> p{0.001, 0.002, 0.003, 0.9};
  const TwoStageResult r = two_stage_adaptive(p, 0.05, InverseNullEstimate::PrintedNullFraction);
  EXPECT_EQ(r.stage_one_rejections, 3u);
  EXPECT_EQ(r.inverse_null_proportion, 1.0);
  const StepUpResult plain = bh_step_up(p, 0.025);
  EXPECT_EQ(r.result.k, plain.k);
  EXPECT_EQ(r.result.rejected, plain.rejected);
}

TEST(TwoStage, RejectionFractionTraces) {
  // Stage one rejects nothing: multiplier 1, plain step-up at alpha/2.
  const std::vector<double> high(5, 0.9);
  const TwoStageResult a = two_stage_adaptive(high, 0.05);
  EXPECT_EQ(a.inverse_null_proportion, 1.0);
  EXPECT_EQ(a.result.k, 0u);

  // Stage one rejects 3 of 4 (fraction 0.75): multiplier F_2(0.75).
  const std::vector<double> p{0.001, 0.002, 0.003, 0.9};
  const TwoStageResult b = two_stage_adaptive(p, 0.05);
  EXPECT_EQ(b.stage_one_rejections, 3u);
  EXPECT_NEAR(b.inverse_null_proportion, 3.414213562373096, 1e-12);
  EXPECT_EQ(b.result.k, 3u);
}

TEST(TwoStage, ThresholdBoundAndDominance) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(1, 40);
  std::size_t dominance_cases = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t m = size(rng);
    std::vector<double> p(m);
    const double power = 1.0 + 20.0 * u(rng);
    for (auto& x : p) x = std::pow(u(rng), power);
    const double alpha = 0.05;
    for (auto est : {InverseNullEstimate::RejectionFraction,
                     InverseNullEstimate::PrintedNullFraction}) {
      const TwoStageResult r = two_stage_adaptive(p, alpha, est);
      if (r.inverse_null_proportion <= 2.0) {
        EXPECT_LE(r.result.p_k, 2.0 * alpha / 2.0);
      }
      if (r.inverse_null_proportion >= 2.0) {
        ++dominance_cases;
        const StepUpResult bh = bh_step_up(p, alpha);
        for (std::size_t i = 0; i < m; ++i) {
          if (bh.rejected[i]) EXPECT_TRUE(r.result.rejected[i]);
        }
      }
      // Independent recomputation of stage two from the reported multiplier.
      std::vector<double> d = oracle::bh_thresholds(m, r.inverse_null_proportion * alpha / 2.0);
      for (auto& x : d) x = std::min(x, 1.0);
      EXPECT_EQ(r.result.k, oracle::brute_step_up(p, d).k);
    }
  }
  EXPECT_GT(dominance_cases, 100u);
}

TEST(AdaptiveConfig, Validation) {
  AdaptiveConfig cfg = AdaptiveConfig::defaults_for(0.1);
  EXPECT_DOUBLE_EQ(cfg.alpha0, 0.025);
  EXPECT_DOUBLE_EQ(cfg.alpha1, 0.05);
  cfg.kappa = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_THROW(AdaptiveConfig::defaults_for(1.0), std::invalid_argument);
}

}  // namespace
}  // namespace excursion

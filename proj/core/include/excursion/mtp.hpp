#pragma once

// Step-up multiple testing: a generic threshold-collection step-up, the
// Benjamini-Hochberg linear step-up, and the Blanchard-Roquain two-stage
// adaptive procedure.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace excursion {

struct StepUpResult {
  std::size_t k = 0;    // step-up index (0 when nothing is rejected)
  double p_k = 0.0;     // rejection threshold, 0 when k == 0
  std::vector<std::uint8_t> rejected;  // per original index

  std::size_t rejected_count() const;
};

/// Rejects every p(i) <= p_(k), k = max{i : p_(i) <= thresholds[i-1]}.
///
/// `thresholds` must be nondecreasing, lie in [0, 1] and have one entry per
/// p-value. Ties are ordered by original index (stable), so results are
/// reproducible bit for bit.
StepUpResult generic_step_up(std::span<const double> p, std::span<const double> thresholds);

/// Linear step-up with thresholds i * alpha / m.
StepUpResult bh_step_up(std::span<const double> p, double alpha);

/// Blanchard-Roquain multiplier:
///   1                                       if x <= 1/kappa
///   (2/kappa) / (1 - sqrt(1 - 4(1-x)/kappa)) otherwise,
/// clamped to `cap` where the closed form diverges (x -> 1).
double f_kappa(double x, double kappa, double cap = 1e6);

/// What F_kappa is evaluated at to estimate 1/pi0 after stage one.
enum class InverseNullEstimate {
  /// x = |R0| / m, the stage-one rejection fraction (Blanchard-Roquain).
  RejectionFraction,
  /// x = m0_hat / m = 1 - |R0| / m, the literal printed form.
  PrintedNullFraction,
};

struct AdaptiveConfig {
  double alpha0 = 0.0125;
  double alpha1 = 0.025;
  double kappa = 2.0;
  double multiplier_cap = 1e6;
  InverseNullEstimate estimate = InverseNullEstimate::RejectionFraction;

  /// alpha0 = alpha/4, alpha1 = alpha/2, kappa = 2.
  static AdaptiveConfig defaults_for(double alpha);
  void validate() const;
};

struct TwoStageResult {
  StepUpResult result;  // stage two
  std::size_t stage_one_rejections = 0;
  double null_count_estimate = 0.0;  // m0_hat = m - |R0|
  double inverse_null_proportion = 1.0;  // F_kappa(...)
};

/// Stage one: step-up with i * alpha0 / m gives |R0| and m0_hat = m - |R0|.
/// Stage two: step-up with min(1, F_kappa(x) * i * alpha1 / m).
TwoStageResult two_stage_adaptive(std::span<const double> p, const AdaptiveConfig& cfg);

/// Runs with AdaptiveConfig::defaults_for(alpha) and the given estimate.
TwoStageResult two_stage_adaptive(
    std::span<const double> p, double alpha,
    InverseNullEstimate estimate = InverseNullEstimate::RejectionFraction);

}  // namespace excursion

#pragma once

// Upper and lower confidence regions for the excursion set {mu > c} and the
// per-realization false discovery / false non-discovery proportions.

#include <optional>
#include <string>
#include <string_view>

#include "excursion/lattice.hpp"
#include "excursion/mtp.hpp"
#include "excursion/stats.hpp"

namespace excursion {

enum class Method { UpperBH, LowerBH, LowerAdaptive, JointBH };

inline constexpr Method kAllMethods[] = {Method::UpperBH, Method::LowerBH,
                                         Method::LowerAdaptive, Method::JointBH};

/// "upper-bh", "lower-bh", "lower-adaptive", "joint".
std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

enum class LowerProcedure { BH, TwoStageAdaptive };

/// Step-up outcome for one direction (or for the pooled joint test).
struct ThresholdDiagnostics {
  std::size_t k = 0;
  double p_k = 0.0;
  std::size_t tests = 0;
};

struct AdaptiveDiagnostics {
  std::size_t stage_one_rejections = 0;
  double inverse_null_proportion = 1.0;
};

struct ConfidenceRegions {
  double c = 0.0;
  double alpha = 0.0;  // level handed to the step-up (alpha_effective for joint)
  Method method = Method::UpperBH;
  std::optional<RegionSet> upper;  // locations declared above c
  std::optional<RegionSet> lower;  // complement of the locations declared below c
  RegionSet point_estimate;        // {mean > c} == {t > 0}
  std::optional<ThresholdDiagnostics> upper_threshold;
  std::optional<ThresholdDiagnostics> lower_threshold;
  std::optional<AdaptiveDiagnostics> adaptive;

  /// upper ⊆ point_estimate ⊆ lower, for whichever sides are present.
  bool is_nested() const;
};

/// {v : p^U(v) <= p_k} with p_k from BH on the upper p-values. `t` must
/// already be centred on c.
ConfidenceRegions upper_cr(const ScalarField& t, DegreesOfFreedom nu, double c, double alpha);

/// Complement of {v : p^L(v) <= p_k}, p_k from BH or the two-stage procedure.
ConfidenceRegions lower_cr(const ScalarField& t, DegreesOfFreedom nu, double c, double alpha,
                           LowerProcedure procedure,
                           InverseNullEstimate estimate = InverseNullEstimate::RejectionFraction);

/// One BH run over the 2m pooled (p^L, p^U) values at `alpha_effective`.
/// Pass 2 * alpha to target FDR alpha; the doubling is left to the caller.
ConfidenceRegions joint_cr(const ScalarField& t, DegreesOfFreedom nu, double c,
                           double alpha_effective);

/// Dispatches on `method`. `alpha` is the step-up level as given; no
/// doubling is applied for JointBH here.
ConfidenceRegions confidence_regions(Method method, const ScalarField& t, DegreesOfFreedom nu,
                                     double c, double alpha,
                                     InverseNullEstimate estimate =
                                         InverseNullEstimate::RejectionFraction);

/// Same, with the upper p-values already evaluated from `t`. Lets several
/// methods share one pass of t-CDF evaluations at a given level.
ConfidenceRegions confidence_regions(Method method, const ScalarField& t,
                                     const PValueField& upper_p, double c, double alpha,
                                     InverseNullEstimate estimate =
                                         InverseNullEstimate::RejectionFraction);

/// Convenience wrapper from raw samples.
ConfidenceRegions confidence_regions(Method method, const SampleStack& stack, double c,
                                     double alpha,
                                     InverseNullEstimate estimate =
                                         InverseNullEstimate::RejectionFraction);

RegionSet point_estimate_set(const ScalarField& mean, double c);

struct ErrorProportions {
  double fdp = 0.0;
  double fndp = 0.0;
  std::size_t fdp_numerator = 0;
  std::size_t fdp_denominator = 0;  // before the max(., 1) floor
  std::size_t fndp_numerator = 0;
  std::size_t fndp_denominator = 0;
};

/// Realized FDP / FNDP of `regions` against the true mean. The upper side is
/// scored against A_c = {mu > c}, the lower side against {mu >= c}.
ErrorProportions error_proportions(Method method, const ScalarField& truth_mu,
                                   const ConfidenceRegions& regions);

}  // namespace excursion

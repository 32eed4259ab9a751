#include "excursion/regions.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace excursion {
namespace {

// Compacts the in-mask entries of a p-value field into a dense vector.
std::vector<double> in_mask_values(const ScalarField& p) {
  std::vector<double> out;
  out.reserve(p.in_mask_count());
  const auto v = p.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (p.in_mask(i)) out.push_back(v[i]);
  }
  return out;
}

// Scatters dense rejection flags back onto the lattice.
RegionSet scatter(const ScalarField& like, std::span<const std::uint8_t> dense) {
  std::vector<std::uint8_t> member(like.size(), 0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < like.size(); ++i) {
    if (like.in_mask(i)) member[i] = dense[j++];
  }
  return RegionSet(like.shape(), std::move(member), like.mask());
}

ConfidenceRegions base_regions(const ScalarField& t, double c, double alpha, Method method) {
  return ConfidenceRegions{
      .c = c,
      .alpha = alpha,
      .method = method,
      .upper = std::nullopt,
      .lower = std::nullopt,
      .point_estimate = excursion_set(t, 0.0, Strictness::Strict),
      .upper_threshold = std::nullopt,
      .lower_threshold = std::nullopt,
      .adaptive = std::nullopt,
  };
}

void check_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("confidence region level must lie in (0, 1)");
  }
}

std::size_t floor_one(std::size_t n) { return std::max<std::size_t>(n, 1); }

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::UpperBH: return "upper-bh";
    case Method::LowerBH: return "lower-bh";
    case Method::LowerAdaptive: return "lower-adaptive";
    case Method::JointBH: return "joint";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

bool ConfidenceRegions::is_nested() const {
  if (upper && !upper->is_subset_of(point_estimate)) return false;
  if (lower && !point_estimate.is_subset_of(*lower)) return false;
  return true;
}

namespace {

ConfidenceRegions upper_from_p(const ScalarField& t, const PValueField& upper_p, double c,
                               double alpha) {
  check_level(alpha);
  const std::vector<double> dense = in_mask_values(upper_p.p);
  const StepUpResult bh = bh_step_up(dense, alpha);

  ConfidenceRegions out = base_regions(t, c, alpha, Method::UpperBH);
  out.upper = scatter(t, bh.rejected);
  out.upper_threshold = ThresholdDiagnostics{bh.k, bh.p_k, dense.size()};
  return out;
}

ConfidenceRegions lower_from_p(const ScalarField& t, const PValueField& upper_p, double c,
                               double alpha, LowerProcedure procedure,
                               InverseNullEstimate estimate) {
  check_level(alpha);
  const std::vector<double> dense = in_mask_values(complement(upper_p).p);

  ConfidenceRegions out = base_regions(
      t, c, alpha, procedure == LowerProcedure::BH ? Method::LowerBH : Method::LowerAdaptive);
  StepUpResult rejected;
  if (procedure == LowerProcedure::BH) {
    rejected = bh_step_up(dense, alpha);
  } else {
    TwoStageResult two = two_stage_adaptive(dense, alpha, estimate);
    out.adaptive = AdaptiveDiagnostics{two.stage_one_rejections, two.inverse_null_proportion};
    rejected = std::move(two.result);
  }
  out.lower = scatter(t, rejected.rejected).complement();
  out.lower_threshold = ThresholdDiagnostics{rejected.k, rejected.p_k, dense.size()};
  return out;
}

ConfidenceRegions joint_from_p(const ScalarField& t, const PValueField& upper_p, double c,
                               double alpha_effective) {
  check_level(alpha_effective);
  const std::vector<double> dense_upper = in_mask_values(upper_p.p);
  const std::vector<double> dense_lower = in_mask_values(complement(upper_p).p);
  const std::size_t m = dense_upper.size();

  std::vector<double> pooled;
  pooled.reserve(2 * m);
  pooled.insert(pooled.end(), dense_lower.begin(), dense_lower.end());
  pooled.insert(pooled.end(), dense_upper.begin(), dense_upper.end());
  const StepUpResult bh = bh_step_up(pooled, alpha_effective);

  const std::span<const std::uint8_t> flags(bh.rejected);
  ConfidenceRegions out = base_regions(t, c, alpha_effective, Method::JointBH);
  out.lower = scatter(t, flags.first(m)).complement();
  out.upper = scatter(t, flags.subspan(m));
  const ThresholdDiagnostics pooled_threshold{bh.k, bh.p_k, 2 * m};
  out.upper_threshold = pooled_threshold;
  out.lower_threshold = pooled_threshold;
  return out;
}

void check_direction(const PValueField& upper_p) {
  if (upper_p.direction != Direction::Upper) {
    throw std::invalid_argument("expected upper-direction p-values");
  }
}

}  // namespace

ConfidenceRegions upper_cr(const ScalarField& t, DegreesOfFreedom nu, double c, double alpha) {
  check_level(alpha);
  return upper_from_p(t, upper_p_field(t, nu), c, alpha);
}

ConfidenceRegions lower_cr(const ScalarField& t, DegreesOfFreedom nu, double c, double alpha,
                           LowerProcedure procedure, InverseNullEstimate estimate) {
  check_level(alpha);
  return lower_from_p(t, upper_p_field(t, nu), c, alpha, procedure, estimate);
}

ConfidenceRegions joint_cr(const ScalarField& t, DegreesOfFreedom nu, double c,
                           double alpha_effective) {
  check_level(alpha_effective);
  return joint_from_p(t, upper_p_field(t, nu), c, alpha_effective);
}

ConfidenceRegions confidence_regions(Method method, const ScalarField& t,
                                     const PValueField& upper_p, double c, double alpha,
                                     InverseNullEstimate estimate) {
  check_direction(upper_p);
  switch (method) {
    case Method::UpperBH: return upper_from_p(t, upper_p, c, alpha);
    case Method::LowerBH: return lower_from_p(t, upper_p, c, alpha, LowerProcedure::BH, estimate);
    case Method::LowerAdaptive:
      return lower_from_p(t, upper_p, c, alpha, LowerProcedure::TwoStageAdaptive, estimate);
    case Method::JointBH: return joint_from_p(t, upper_p, c, alpha);
  }
  throw std::invalid_argument("unknown method");
}

ConfidenceRegions confidence_regions(Method method, const ScalarField& t, DegreesOfFreedom nu,
                                     double c, double alpha, InverseNullEstimate estimate) {
  check_level(alpha);
  return confidence_regions(method, t, upper_p_field(t, nu), c, alpha, estimate);
}

ConfidenceRegions confidence_regions(Method method, const SampleStack& stack, double c,
                                     double alpha, InverseNullEstimate estimate) {
  const TField tf = t_statistic_field(stack, c);
  return confidence_regions(method, tf.t, tf.nu, c, alpha, estimate);
}

RegionSet point_estimate_set(const ScalarField& mean, double c) {
  return excursion_set(mean, c, Strictness::Strict);
}

ErrorProportions error_proportions(Method method, const ScalarField& truth_mu,
                                   const ConfidenceRegions& regions) {
  if (method != regions.method) {
    throw std::invalid_argument("regions were built with " +
                                std::string(to_string(regions.method)) +
                                ", scored as " + std::string(to_string(method)));
  }
  const bool wants_upper = method == Method::UpperBH || method == Method::JointBH;
  const bool wants_lower = method != Method::UpperBH;
  if ((wants_upper && !regions.upper) || (wants_lower && !regions.lower)) {
    throw std::invalid_argument("regions are missing a side required by the method");
  }

  ErrorProportions e;
  if (wants_upper) {
    const RegionSet above = excursion_set(truth_mu, regions.c, Strictness::Strict);
    const SetCardinalities s = set_cardinalities(*regions.upper, above);
    e.fdp_numerator += s.a_minus_b;                  // |A+ \ A_c|
    e.fdp_denominator += s.a;                        // |A+|
    e.fndp_numerator += s.b_minus_a;                 // |A_c \ A+|
    e.fndp_denominator += regions.upper->in_mask_count() - s.a;  // |(A+)^C|
  }
  if (wants_lower) {
    const RegionSet closed = excursion_set(truth_mu, regions.c, Strictness::NonStrict);
    const SetCardinalities s = set_cardinalities(closed, *regions.lower);
    e.fdp_numerator += s.a_minus_b;                  // |closed \ A-|
    e.fdp_denominator += regions.lower->in_mask_count() - s.b;  // |(A-)^C|
    e.fndp_numerator += s.b_minus_a;                 // |A- \ closed|
    e.fndp_denominator += s.b;                       // |A-|
  }
  e.fdp = static_cast<double>(e.fdp_numerator) / static_cast<double>(floor_one(e.fdp_denominator));
  e.fndp =
      static_cast<double>(e.fndp_numerator) / static_cast<double>(floor_one(e.fndp_denominator));
  return e;
}

}  // namespace excursion

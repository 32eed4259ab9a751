#pragma once

// Per-location one-sample t-statistics and one-sided p-values.

#include <stdexcept>

#include "excursion/lattice.hpp"

namespace excursion {

/// Raised when a continued-fraction evaluation fails to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegreesOfFreedom {
 public:
  explicit DegreesOfFreedom(double nu);
  double value() const { return nu_; }
  friend bool operator==(const DegreesOfFreedom&, const DegreesOfFreedom&) = default;

 private:
  double nu_;
};

struct SampleMoments {
  ScalarField mean;
  ScalarField sd;  // n - 1 denominator
};

SampleMoments sample_moments(const SampleStack& stack);

struct TField {
  ScalarField t;
  DegreesOfFreedom nu;
};

/// t(v) = (mean(v) - c) / (sd(v) / sqrt(n)), nu = n - 1.
///
/// Where sd(v) == 0 the signed limit is used: +inf if mean > c, -inf if
/// mean < c, and 0 if mean == c.
TField t_statistic_field(const SampleStack& stack, double c);

/// Same, reusing moments already computed for the stack (n is the sample
/// count they were computed from). Lets a grid of levels share one pass.
TField t_statistic_field(const SampleMoments& moments, std::size_t n, double c);

/// Regularized incomplete beta I_x(a, b), accurate to about 1e-12 relative.
/// Throws std::domain_error outside a, b > 0, 0 <= x <= 1, and
/// ConvergenceError if the continued fraction does not settle.
double regularized_incomplete_beta(double a, double b, double x);

/// CDF of Student's t with nu degrees of freedom; +-inf map to 1 / 0.
double student_t_cdf(double t, DegreesOfFreedom nu);

enum class Direction { Upper, Lower };

struct PValueField {
  ScalarField p;
  Direction direction;
};

/// p^U(v) = 1 - F(t(v)).
PValueField upper_p_field(const ScalarField& t, DegreesOfFreedom nu);

/// p^L(v) = 1 - p^U(v), computed from the upper p-values so the two sum to
/// one exactly in floating point.
PValueField lower_p_field(const ScalarField& t, DegreesOfFreedom nu);

/// Turns an upper p-value field into the matching lower one (or back).
PValueField complement(const PValueField& p);

}  // namespace excursion

#include "excursion/stats.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace excursion {
namespace {

constexpr int kMaxIterations = 300;
constexpr double kEpsilon = 1e-15;
constexpr double kTiny = 1e-300;

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);  // std::lgamma writes the global signgam
#else
  return std::lgamma(x);
#endif
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEpsilon) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge for a=" +
                         std::to_string(a) + " b=" + std::to_string(b) +
                         " x=" + std::to_string(x));
}

// I_x(a, b) given both x and y = 1 - x, so callers can pass a y that was
// computed without cancellation.
double incomplete_beta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                           a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

// Upper tail P(T > t).
double student_t_upper_tail(double t, double nu) {
  if (t == std::numeric_limits<double>::infinity()) return 0.0;
  if (t == -std::numeric_limits<double>::infinity()) return 1.0;
  const double t2 = t * t;
  const double x = nu / (nu + t2);
  const double y = t2 / (nu + t2);
  const double half_tail = 0.5 * incomplete_beta(0.5 * nu, 0.5, x, y);
  return t >= 0.0 ? half_tail : 1.0 - half_tail;
}

}  // namespace

DegreesOfFreedom::DegreesOfFreedom(double nu) : nu_(nu) {
  if (!(nu > 0.0)) {
    throw std::invalid_argument("degrees of freedom must be positive, got " +
                                std::to_string(nu));
  }
}

SampleMoments sample_moments(const SampleStack& stack) {
  const std::size_t n = stack.n();
  const std::size_t m = stack.shape().size();
  std::vector<double> mean(m, 0.0);
  std::vector<double> sd(m, 0.0);

  for (const auto& sample : stack.samples()) {
    const auto v = sample.values();
    for (std::size_t i = 0; i < m; ++i) mean[i] += v[i];
  }
  for (auto& x : mean) x /= static_cast<double>(n);

  for (const auto& sample : stack.samples()) {
    const auto v = sample.values();
    for (std::size_t i = 0; i < m; ++i) {
      const double d = v[i] - mean[i];
      sd[i] += d * d;
    }
  }
  for (auto& x : sd) x = std::sqrt(x / static_cast<double>(n - 1));

  return {ScalarField(stack.shape(), std::move(mean), stack.mask()),
          ScalarField(stack.shape(), std::move(sd), stack.mask())};
}

TField t_statistic_field(const SampleStack& stack, double c) {
  return t_statistic_field(sample_moments(stack), stack.n(), c);
}

TField t_statistic_field(const SampleMoments& moments, std::size_t n, double c) {
  if (n < 2) throw std::invalid_argument("t-statistic needs n >= 2");
  const auto mean = moments.mean.values();
  const auto sd = moments.sd.values();
  const double root_n = std::sqrt(static_cast<double>(n));
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<double> t(mean.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    if (!moments.mean.in_mask(i)) continue;
    const double diff = mean[i] - c;
    if (sd[i] > 0.0) {
      t[i] = diff / (sd[i] / root_n);
    } else {
      t[i] = diff > 0.0 ? inf : (diff < 0.0 ? -inf : 0.0);
    }
  }
  return {ScalarField(moments.mean.shape(), std::move(t), moments.mean.mask()),
          DegreesOfFreedom(static_cast<double>(n - 1))};
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("incomplete beta requires a, b > 0");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("incomplete beta requires 0 <= x <= 1");
  }
  return incomplete_beta(a, b, x, 1.0 - x);
}

double student_t_cdf(double t, DegreesOfFreedom nu) {
  if (std::isnan(t)) throw std::domain_error("student_t_cdf of NaN");
  if (t == std::numeric_limits<double>::infinity()) return 1.0;
  if (t == -std::numeric_limits<double>::infinity()) return 0.0;
  const double t2 = t * t;
  const double half_tail =
      0.5 * incomplete_beta(0.5 * nu.value(), 0.5, nu.value() / (nu.value() + t2),
                            t2 / (nu.value() + t2));
  return t >= 0.0 ? 1.0 - half_tail : half_tail;
}

PValueField upper_p_field(const ScalarField& t, DegreesOfFreedom nu) {
  const auto tv = t.values();
  std::vector<double> p(tv.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < tv.size(); ++i) {
    if (t.in_mask(i)) p[i] = student_t_upper_tail(tv[i], nu.value());
  }
  return {ScalarField(t.shape(), std::move(p), t.mask()), Direction::Upper};
}

PValueField lower_p_field(const ScalarField& t, DegreesOfFreedom nu) {
  return complement(upper_p_field(t, nu));
}

PValueField complement(const PValueField& p) {
  const auto pv = p.p.values();
  std::vector<double> q(pv.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (p.p.in_mask(i)) q[i] = 1.0 - pv[i];
  }
  return {ScalarField(p.p.shape(), std::move(q), p.p.mask()),
          p.direction == Direction::Upper ? Direction::Lower : Direction::Upper};
}

}  // namespace excursion

#include "excursion/mtp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace excursion {
namespace {

void check_p_values(std::span<const double> p) {
  if (p.empty()) throw std::invalid_argument("step-up needs at least one p-value");
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("p-value outside [0, 1]: " + std::to_string(v));
    }
  }
}

void check_alpha(double alpha, const char* name) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1), got " +
                                std::to_string(alpha));
  }
}

std::vector<double> linear_thresholds(std::size_t m, double scale) {
  std::vector<double> delta(m);
  for (std::size_t i = 0; i < m; ++i) {
    delta[i] = std::min(1.0, scale * (static_cast<double>(i + 1) / static_cast<double>(m)));
  }
  return delta;
}

}  // namespace

std::size_t StepUpResult::rejected_count() const {
  return static_cast<std::size_t>(std::count(rejected.begin(), rejected.end(), 1));
}

StepUpResult generic_step_up(std::span<const double> p, std::span<const double> thresholds) {
  check_p_values(p);
  const std::size_t m = p.size();
  if (thresholds.size() != m) {
    throw std::invalid_argument("threshold collection has " +
                                std::to_string(thresholds.size()) + " entries for " +
                                std::to_string(m) + " p-values");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!(thresholds[i] >= 0.0 && thresholds[i] <= 1.0) ||
        (i > 0 && thresholds[i] < thresholds[i - 1])) {
      throw std::invalid_argument("thresholds must be nondecreasing within [0, 1]");
    }
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

  StepUpResult out;
  out.rejected.assign(m, 0);
  for (std::size_t i = m; i-- > 0;) {
    if (p[order[i]] <= thresholds[i]) {
      out.k = i + 1;
      out.p_k = p[order[i]];
      break;
    }
  }
  if (out.k == 0) return out;
  for (std::size_t i = 0; i < m; ++i) out.rejected[i] = p[i] <= out.p_k ? 1 : 0;
  return out;
}

StepUpResult bh_step_up(std::span<const double> p, double alpha) {
  check_alpha(alpha, "alpha");
  return generic_step_up(p, linear_thresholds(p.size(), alpha));
}

double f_kappa(double x, double kappa, double cap) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("f_kappa needs x in [0, 1]");
  if (!(kappa > 1.0)) throw std::invalid_argument("f_kappa needs kappa > 1");
  if (!(cap >= 1.0)) throw std::invalid_argument("f_kappa cap must be >= 1");
  const double inv_kappa = 1.0 / kappa;
  if (x <= inv_kappa) return 1.0;
  const double denom = 1.0 - std::sqrt(1.0 - 4.0 * (1.0 - x) * inv_kappa);
  if (denom <= 0.0) return cap;
  return std::clamp(2.0 * inv_kappa / denom, 1.0, cap);
}

AdaptiveConfig AdaptiveConfig::defaults_for(double alpha) {
  check_alpha(alpha, "alpha");
  AdaptiveConfig cfg;
  cfg.alpha0 = alpha / 4.0;
  cfg.alpha1 = alpha / 2.0;
  cfg.kappa = 2.0;
  return cfg;
}

void AdaptiveConfig::validate() const {
  check_alpha(alpha0, "alpha0");
  check_alpha(alpha1, "alpha1");
  if (!(kappa > 1.0)) throw std::invalid_argument("kappa must exceed 1");
  if (!(multiplier_cap >= 1.0)) throw std::invalid_argument("multiplier cap must be >= 1");
}

TwoStageResult two_stage_adaptive(std::span<const double> p, const AdaptiveConfig& cfg) {
  cfg.validate();
  const std::size_t m = p.size();
  const StepUpResult stage_one = generic_step_up(p, linear_thresholds(m, cfg.alpha0));

  TwoStageResult out;
  out.stage_one_rejections = stage_one.rejected_count();
  out.null_count_estimate = static_cast<double>(m - out.stage_one_rejections);
  const double null_fraction = out.null_count_estimate / static_cast<double>(m);
  const double x = cfg.estimate == InverseNullEstimate::RejectionFraction
                       ? static_cast<double>(out.stage_one_rejections) / static_cast<double>(m)
                       : null_fraction;
  out.inverse_null_proportion = f_kappa(x, cfg.kappa, cfg.multiplier_cap);
  out.result =
      generic_step_up(p, linear_thresholds(m, out.inverse_null_proportion * cfg.alpha1));
  return out;
}

TwoStageResult two_stage_adaptive(std::span<const double> p, double alpha,
                                  InverseNullEstimate estimate) {
  AdaptiveConfig cfg = AdaptiveConfig::defaults_for(alpha);
  cfg.estimate = estimate;
  return two_stage_adaptive(p, cfg);
}

}  // namespace excursion

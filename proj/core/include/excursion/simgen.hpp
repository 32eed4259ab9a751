#pragma once

// Synthetic signals, smoothed Gaussian noise, and the Monte Carlo harness
// that measures empirical FDR / FNDR of the confidence-region methods.

#include <cstdint>
#include <random>
#include <vector>

#include "excursion/lattice.hpp"
#include "excursion/regions.hpp"

namespace excursion {

using Rng = std::mt19937_64;

/// sigma = fwhm / (2 sqrt(2 ln 2)); throws on negative fwhm.
double fwhm_to_sigma(double fwhm);

/// Normalized discrete Gaussian on |j| <= ceil(3 sigma); {1} for fwhm == 0.
std::vector<double> gaussian_kernel_1d(double fwhm);

/// Separable Gaussian smoothing along every axis with zero padding.
/// Out-of-mask locations contribute zero and stay as they were.
ScalarField smooth_field(const ScalarField& field, double fwhm);

enum class SignalKind { Ramp, Step, Circle };

struct SignalSpec {
  SignalKind kind = SignalKind::Ramp;
  double signal_fwhm = 0.0;  // ignored by Ramp
  double radius = 12.0;      // Circle only

  static SignalSpec ramp() { return {SignalKind::Ramp, 0.0, 12.0}; }
  static SignalSpec step(double fwhm) { return {SignalKind::Step, fwhm, 12.0}; }
  static SignalSpec circle(double radius, double fwhm) {
    return {SignalKind::Circle, fwhm, radius};
  }
  void validate() const;
};

std::string_view to_string(SignalKind kind);
std::optional<SignalKind> parse_signal_kind(std::string_view name);

struct NoiseSpec {
  double sd = 1.0;
  double fwhm = 0.0;
  void validate() const;
};

/// Ramp: -1 + 2 col / (W - 1). Step: -1 left of W/2, +1 from W/2, then
/// smoothed. Circle: +1 inside the radius-r disk about the image centre,
/// -1 outside, then smoothed. 2-D shapes only.
ScalarField generate_signal(const SignalSpec& spec, const LatticeShape& shape);

/// i.i.d. N(0, sd^2), smoothed, then divided by the root sum of squares of
/// the effective kernel so interior pixels keep standard deviation sd.
ScalarField generate_noise_field(const LatticeShape& shape, const NoiseSpec& noise, Rng& rng,
                                 const std::optional<Mask>& mask = std::nullopt);

/// y_i = signal + noise_i, i = 1..n.
SampleStack generate_sample_stack(const ScalarField& signal, const NoiseSpec& noise,
                                  std::size_t n, Rng& rng);

/// splitmix64 finalizer over master ^ golden-ratio-scaled index; gives
/// every replication its own stream independent of scheduling.
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index);

/// c_min, c_min + step, ... up to c_max (inclusive, with a half-step slack
/// for rounding). Values are snapped to 1e-9 so that e.g. -1 is exact.
std::vector<double> level_grid(double c_min, double c_max, double step);

struct SimulationConfig {
  LatticeShape shape{50, 50};
  std::size_t n = 80;
  std::size_t reps = 1000;
  double alpha = 0.05;
  std::vector<double> c_grid = level_grid(-2.0, 2.0, 0.2);
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  SignalSpec signal = SignalSpec::ramp();
  NoiseSpec noise{};
  std::uint64_t seed = 0;
  /// JointBH runs its step-up at 2 * alpha when set.
  bool joint_doubling = true;
  InverseNullEstimate adaptive_estimate = InverseNullEstimate::RejectionFraction;
  /// 0 selects std::thread::hardware_concurrency(). Never affects results.
  std::size_t workers = 0;

  void validate() const;
};

struct SimulationCell {
  double c = 0.0;
  Method method = Method::UpperBH;
  double empirical_fdr = 0.0;
  double fdr_se = 0.0;
  double empirical_fndr = 0.0;
  double fndr_se = 0.0;
  /// Fraction of replications with at least one rejection.
  double any_rejection_rate = 0.0;
  double any_rejection_se = 0.0;
  std::size_t reps = 0;
};

struct SimulationResult {
  SimulationConfig config;
  /// Ascending c, then methods in config order.
  std::vector<SimulationCell> cells;
  /// Replication/level pairs where the adaptive multiplier reached 2 and the
  /// adaptive lower region was compared against the BH one.
  std::size_t dominance_checks = 0;
  std::size_t dominance_violations = 0;

  const SimulationCell& cell(std::size_t c_index, Method method) const;
};

SimulationResult run_simulation(const SimulationConfig& config);

}  // namespace excursion

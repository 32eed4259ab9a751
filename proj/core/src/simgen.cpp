#include "excursion/simgen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

namespace excursion {
namespace {

// Smoothed plateaus come out as -1 +- a few ulp; snapping to a 2^-40 grid
// restores exact +-1 so plateau locations land on the intended side of
// strict/non-strict excursion sets at c = +-1.
double snap(double v) { return std::ldexp(std::nearbyint(std::ldexp(v, 40)), -40); }

void convolve_axis(std::vector<double>& values, const LatticeShape& shape, std::size_t axis,
                   std::span<const double> kernel) {
  const std::size_t len = shape.extent(axis);
  const std::size_t stride = shape.stride(axis);
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const std::size_t total = shape.size();
  std::vector<double> line(len);
  std::vector<double> out(len);

  for (std::size_t base = 0; base < total; ++base) {
    // `base` is a line start when its coordinate along `axis` is zero.
    if ((base / stride) % len != 0) continue;
    for (std::size_t j = 0; j < len; ++j) line[j] = values[base + j * stride];
    for (std::size_t j = 0; j < len; ++j) {
      double acc = 0.0;
      for (std::ptrdiff_t o = -half; o <= half; ++o) {
        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(j) + o;
        if (src < 0 || src >= static_cast<std::ptrdiff_t>(len)) continue;
        acc += kernel[static_cast<std::size_t>(o + half)] * line[static_cast<std::size_t>(src)];
      }
      out[j] = acc;
    }
    for (std::size_t j = 0; j < len; ++j) values[base + j * stride] = out[j];
  }
}

double sum_of_squares(std::span<const double> w) {
  double s = 0.0;
  for (double x : w) s += x * x;
  return s;
}

}  // namespace

double fwhm_to_sigma(double fwhm) {
  if (!(fwhm >= 0.0)) throw std::invalid_argument("FWHM must be nonnegative");
  return fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
}

std::vector<double> gaussian_kernel_1d(double fwhm) {
  const double sigma = fwhm_to_sigma(fwhm);
  if (sigma == 0.0) return {1.0};
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> w(static_cast<std::size_t>(2 * half + 1));
  double total = 0.0;
  for (std::ptrdiff_t j = -half; j <= half; ++j) {
    const double v = std::exp(-static_cast<double>(j * j) / (2.0 * sigma * sigma));
    w[static_cast<std::size_t>(j + half)] = v;
    total += v;
  }
  for (auto& v : w) v /= total;
  return w;
}

ScalarField smooth_field(const ScalarField& field, double fwhm) {
  const std::vector<double> kernel = gaussian_kernel_1d(fwhm);
  if (kernel.size() == 1) return field;

  std::vector<double> values(field.values().begin(), field.values().end());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!field.in_mask(i)) values[i] = 0.0;
  }
  for (std::size_t axis = 0; axis < field.shape().rank(); ++axis) {
    convolve_axis(values, field.shape(), axis, kernel);
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!field.in_mask(i)) values[i] = field[i];
  }
  return ScalarField(field.shape(), std::move(values), field.mask());
}

void SignalSpec::validate() const {
  if (!(signal_fwhm >= 0.0)) throw std::invalid_argument("signal FWHM must be >= 0");
  if (kind == SignalKind::Circle && !(radius > 0.0)) {
    throw std::invalid_argument("circle radius must be > 0");
  }
}

std::string_view to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::Ramp: return "ramp";
    case SignalKind::Step: return "step";
    case SignalKind::Circle: return "circle";
  }
  return "unknown";
}

std::optional<SignalKind> parse_signal_kind(std::string_view name) {
  for (SignalKind k : {SignalKind::Ramp, SignalKind::Step, SignalKind::Circle}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

void NoiseSpec::validate() const {
  if (!(sd > 0.0)) throw std::invalid_argument("noise sd must be > 0");
  if (!(fwhm >= 0.0)) throw std::invalid_argument("noise FWHM must be >= 0");
}

ScalarField generate_signal(const SignalSpec& spec, const LatticeShape& shape) {
  spec.validate();
  if (shape.rank() != 2) {
    throw std::invalid_argument("signals are defined on 2-D lattices, got " + shape.to_string());
  }
  const std::size_t height = shape.extent(0);
  const std::size_t width = shape.extent(1);
  std::vector<double> v(shape.size());

  switch (spec.kind) {
    case SignalKind::Ramp: {
      if (width < 2) throw std::invalid_argument("ramp needs width >= 2");
      for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
          v[r * width + c] =
              -1.0 + 2.0 * static_cast<double>(c) / static_cast<double>(width - 1);
        }
      }
      return ScalarField(shape, std::move(v));
    }
    case SignalKind::Step: {
      for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
          v[r * width + c] = 2 * c < width ? -1.0 : 1.0;
        }
      }
      break;
    }
    case SignalKind::Circle: {
      const double cy = (static_cast<double>(height) - 1.0) / 2.0;
      const double cx = (static_cast<double>(width) - 1.0) / 2.0;
      for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
          const double dy = static_cast<double>(r) - cy;
          const double dx = static_cast<double>(c) - cx;
          v[r * width + c] = std::hypot(dy, dx) <= spec.radius ? 1.0 : -1.0;
        }
      }
      break;
    }
  }
  ScalarField smoothed = smooth_field(ScalarField(shape, std::move(v)), spec.signal_fwhm);
  std::vector<double> out(smoothed.values().begin(), smoothed.values().end());
  for (auto& x : out) x = snap(x);
  return ScalarField(shape, std::move(out));
}

ScalarField generate_noise_field(const LatticeShape& shape, const NoiseSpec& noise, Rng& rng,
                                 const std::optional<Mask>& mask) {
  noise.validate();
  std::normal_distribution<double> normal(0.0, noise.sd);
  std::vector<double> v(shape.size());
  for (auto& x : v) x = normal(rng);
  if (mask) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!mask->inside(i)) v[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  ScalarField raw(shape, std::move(v), mask);
  if (noise.fwhm == 0.0) return raw;

  const std::vector<double> kernel = gaussian_kernel_1d(noise.fwhm);
  // The effective D-dimensional kernel is the outer product of the 1-D one,
  // so its sum of squares is the per-axis sum of squares to the power D.
  const double scale = std::pow(std::sqrt(sum_of_squares(kernel)),
                                static_cast<double>(shape.rank()));
  ScalarField smoothed = smooth_field(raw, noise.fwhm);
  std::vector<double> out(smoothed.values().begin(), smoothed.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (smoothed.in_mask(i)) out[i] /= scale;
  }
  return ScalarField(shape, std::move(out), mask);
}

SampleStack generate_sample_stack(const ScalarField& signal, const NoiseSpec& noise,
                                  std::size_t n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample stack needs n >= 2");
  std::vector<ScalarField> samples;
  samples.reserve(n);
  const auto mu = signal.values();
  for (std::size_t k = 0; k < n; ++k) {
    const ScalarField eps = generate_noise_field(signal.shape(), noise, rng, signal.mask());
    std::vector<double> y(mu.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = mu[i] + eps[i];
    samples.emplace_back(signal.shape(), std::move(y), signal.mask());
  }
  return SampleStack(std::move(samples));
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master ^ (index * 0x9E3779B97F4A7C15ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> level_grid(double c_min, double c_max, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("level step must be > 0");
  if (c_min > c_max) throw std::invalid_argument("c_min exceeds c_max");
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double c = c_min + static_cast<double>(k) * step;
    if (c > c_max + 0.5 * step * 1e-6) break;
    grid.push_back(std::round(c * 1e9) / 1e9);
  }
  return grid;
}

void SimulationConfig::validate() const {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (joint_doubling && !(2.0 * alpha < 1.0) &&
      std::find(methods.begin(), methods.end(), Method::JointBH) != methods.end()) {
    throw std::invalid_argument("joint doubling needs alpha < 0.5");
  }
  if (c_grid.empty()) throw std::invalid_argument("level grid is empty");
  if (!std::is_sorted(c_grid.begin(), c_grid.end()) ||
      std::adjacent_find(c_grid.begin(), c_grid.end()) != c_grid.end()) {
    throw std::invalid_argument("level grid must be strictly ascending");
  }
  if (methods.empty()) throw std::invalid_argument("no methods requested");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (std::find(methods.begin() + static_cast<std::ptrdiff_t>(i) + 1, methods.end(),
                  methods[i]) != methods.end()) {
      throw std::invalid_argument("method listed twice: " + std::string(to_string(methods[i])));
    }
  }
  signal.validate();
  noise.validate();
}

const SimulationCell& SimulationResult::cell(std::size_t c_index, Method method) const {
  const auto& methods = config.methods;
  const auto it = std::find(methods.begin(), methods.end(), method);
  if (it == methods.end() || c_index >= config.c_grid.size()) {
    throw std::out_of_range("no such simulation cell");
  }
  return cells[c_index * methods.size() + static_cast<std::size_t>(it - methods.begin())];
}

namespace {

struct RepOutcome {
  // [c_index * methods + method_index] * 3 + {fdp, fndp, any_rejection}
  std::vector<double> values;
  std::size_t dominance_checks = 0;
  std::size_t dominance_violations = 0;
};

RepOutcome run_replication(const SimulationConfig& config, const ScalarField& signal,
                           std::size_t rep) {
  Rng rng(replication_seed(config.seed, rep));
  const SampleStack stack = generate_sample_stack(signal, config.noise, config.n, rng);
  const SampleMoments moments = sample_moments(stack);

  const std::size_t n_methods = config.methods.size();
  RepOutcome out;
  out.values.assign(config.c_grid.size() * n_methods * 3, 0.0);
  const bool has_adaptive = std::find(config.methods.begin(), config.methods.end(),
                                      Method::LowerAdaptive) != config.methods.end();

  for (std::size_t ci = 0; ci < config.c_grid.size(); ++ci) {
    const double c = config.c_grid[ci];
    const TField tf = t_statistic_field(moments, config.n, c);
    const PValueField upper_p = upper_p_field(tf.t, tf.nu);

    std::optional<ConfidenceRegions> lower_bh;
    std::optional<ConfidenceRegions> lower_adaptive;
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      const Method method = config.methods[mi];
      const double level =
          method == Method::JointBH && config.joint_doubling ? 2.0 * config.alpha : config.alpha;
      ConfidenceRegions regions = confidence_regions(method, tf.t, upper_p, c, level,
                                                     config.adaptive_estimate);
      const ErrorProportions e = error_proportions(method, signal, regions);
      double* slot = &out.values[(ci * n_methods + mi) * 3];
      slot[0] = e.fdp;
      slot[1] = e.fndp;
      slot[2] = e.fdp_denominator > 0 ? 1.0 : 0.0;
      if (method == Method::LowerBH) lower_bh = std::move(regions);
      if (method == Method::LowerAdaptive) lower_adaptive = std::move(regions);
    }

    if (has_adaptive && lower_adaptive->adaptive->inverse_null_proportion >= 2.0) {
      if (!lower_bh) {
        lower_bh = confidence_regions(Method::LowerBH, tf.t, upper_p, c, config.alpha);
      }
      ++out.dominance_checks;
      // Larger rejection set means a smaller lower region.
      if (!lower_adaptive->lower->is_subset_of(*lower_bh->lower)) ++out.dominance_violations;
    }
  }
  return out;
}

}  // namespace

SimulationResult run_simulation(const SimulationConfig& config) {
  config.validate();
  const ScalarField signal = generate_signal(config.signal, config.shape);

  std::vector<RepOutcome> outcomes(config.reps);
  std::size_t workers = config.workers ? config.workers : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, config.reps);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t rep; (rep = next.fetch_add(1)) < config.reps;) {
      try {
        outcomes[rep] = run_replication(config, signal, rep);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.reps;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  SimulationResult result;
  result.config = config;
  const std::size_t n_methods = config.methods.size();
  const auto reps = static_cast<double>(config.reps);

  // Reduce in replication order so the sums do not depend on scheduling.
  for (std::size_t ci = 0; ci < config.c_grid.size(); ++ci) {
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      const std::size_t offset = (ci * n_methods + mi) * 3;
      double mean[3] = {0.0, 0.0, 0.0};
      for (const auto& o : outcomes) {
        for (int q = 0; q < 3; ++q) mean[q] += o.values[offset + q];
      }
      for (double& x : mean) x /= reps;
      double se[3] = {0.0, 0.0, 0.0};
      if (config.reps > 1) {
        for (const auto& o : outcomes) {
          for (int q = 0; q < 3; ++q) {
            const double d = o.values[offset + q] - mean[q];
            se[q] += d * d;
          }
        }
        for (double& x : se) x = std::sqrt(x / (reps - 1.0)) / std::sqrt(reps);
      }
      result.cells.push_back(SimulationCell{
          .c = config.c_grid[ci],
          .method = config.methods[mi],
          .empirical_fdr = mean[0],
          .fdr_se = se[0],
          .empirical_fndr = mean[1],
          .fndr_se = se[1],
          .any_rejection_rate = mean[2],
          .any_rejection_se = se[2],
          .reps = config.reps,
      });
    }
  }
  for (const auto& o : outcomes) {
    result.dominance_checks += o.dominance_checks;
    result.dominance_violations += o.dominance_violations;
  }
  return result;
}

}  // namespace excursion

#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "excursion/field_file.hpp"
#include "excursion/regions.hpp"
#include "excursion/report.hpp"
#include "excursion/simgen.hpp"
#include "excursion/stats.hpp"

namespace excursion::cli {
namespace {

using nlohmann::json;

/// Bad flag values that CLI11 cannot catch on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad or unreadable input data.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<Method> parse_method_list(const std::string& list) {
  std::vector<Method> methods;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    const auto m = parse_method(item);
    if (!m) throw UsageError("unknown method '" + item + "'");
    if (std::find(methods.begin(), methods.end(), *m) != methods.end()) {
      throw UsageError("method '" + item + "' listed twice");
    }
    methods.push_back(*m);
  }
  if (methods.empty()) throw UsageError("--methods must name at least one method");
  return methods;
}

SignalSpec make_signal(const std::string& kind, double fwhm, double radius) {
  const auto k = parse_signal_kind(kind);
  if (!k) throw UsageError("unknown signal '" + kind + "' (ramp, step, circle)");
  SignalSpec spec{*k, fwhm, radius};
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return spec;
}

InverseNullEstimate parse_estimate(const std::string& name) {
  if (name == "rejection-fraction") return InverseNullEstimate::RejectionFraction;
  if (name == "printed") return InverseNullEstimate::PrintedNullFraction;
  throw UsageError("unknown adaptive estimate '" + name + "'");
}

ScalarField read_single_field(const std::string& path) {
  auto content = read_field_file(path);
  if (auto* f = std::get_if<ScalarField>(&content)) return std::move(*f);
  throw DataError(path + " holds a stack, expected a single field");
}

SampleStack read_stack(const std::string& path) {
  auto content = read_field_file(path);
  if (auto* s = std::get_if<SampleStack>(&content)) return std::move(*s);
  throw DataError(path + " holds a single field; confidence regions need n >= 2 samples");
}

std::string sidecar_path(const std::string& regions_path) { return regions_path + ".json"; }

// ---------------------------------------------------------------- signal

struct SignalOptions {
  std::string kind = "ramp";
  double fwhm = 8.0;
  double radius = 12.0;
  std::size_t width = 50;
  std::size_t height = 50;
  std::string out;
};

void add_signal_flags(CLI::App& cmd, SignalOptions& o) {
  cmd.add_option("--signal", o.kind, "ramp | step | circle")->capture_default_str();
  cmd.add_option("--signal-fwhm", o.fwhm, "signal smoothing FWHM in pixels")
      ->capture_default_str();
  cmd.add_option("--radius", o.radius, "circle radius in pixels")->capture_default_str();
  cmd.add_option("--width", o.width, "lattice width")->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--height", o.height, "lattice height")->capture_default_str()
      ->check(CLI::PositiveNumber);
}

int cmd_signal(const SignalOptions& o, std::ostream& out) {
  const SignalSpec spec = make_signal(o.kind, o.fwhm, o.radius);
  const ScalarField signal = generate_signal(spec, LatticeShape{o.height, o.width});
  write_field_file(o.out, signal);
  out << "wrote " << o.kind << " signal " << o.height << "x" << o.width << " to " << o.out
      << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- sample

struct SampleOptions {
  SignalOptions signal;
  std::string truth;  // optional: read the mean field from a file instead
  double noise_sd = 1.0;
  double noise_fwhm = 0.0;
  std::size_t n = 80;
  std::uint64_t seed = 0;
};

int cmd_sample(const SampleOptions& o, std::ostream& out) {
  const ScalarField mu =
      o.truth.empty()
          ? generate_signal(make_signal(o.signal.kind, o.signal.fwhm, o.signal.radius),
                            LatticeShape{o.signal.height, o.signal.width})
          : read_single_field(o.truth);
  const NoiseSpec noise{o.noise_sd, o.noise_fwhm};
  try {
    noise.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Rng rng(replication_seed(o.seed, 0));
  const SampleStack stack = generate_sample_stack(mu, noise, o.n, rng);
  write_field_file(o.signal.out, stack);
  out << "wrote " << o.n << " samples of " << mu.shape().to_string() << " to " << o.signal.out
      << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- cr

struct CrOptions {
  std::string input;
  double c = 0.0;
  double alpha = 0.05;
  std::string method = "joint";
  std::string joint_doubling = "on";
  std::string estimate = "rejection-fraction";
  std::string out;
};

int cmd_cr(const CrOptions& o, std::ostream& out) {
  const auto method = parse_method(o.method);
  if (!method) throw UsageError("unknown method '" + o.method + "'");
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  const bool doubling = o.joint_doubling == "on";
  const double level = *method == Method::JointBH && doubling ? 2.0 * o.alpha : o.alpha;
  if (!(level < 1.0)) throw UsageError("doubled joint level must stay below 1");
  const InverseNullEstimate estimate = parse_estimate(o.estimate);

  const SampleStack stack = read_stack(o.input);
  const TField tf = t_statistic_field(stack, o.c);
  const ConfidenceRegions regions =
      confidence_regions(*method, tf.t, tf.nu, o.c, level, estimate);

  const RegionSet upper = regions.upper ? *regions.upper : RegionSet::empty(stack.shape(), stack.mask());
  const RegionSet lower = regions.lower ? *regions.lower : RegionSet::full(stack.shape(), stack.mask());
  write_field_file(o.out, SampleStack({region_to_field(upper), region_to_field(lower)}));

  const auto& threshold =
      regions.upper_threshold ? *regions.upper_threshold : *regions.lower_threshold;
  json sidecar = {
      {"c", o.c},
      {"alpha", o.alpha},
      {"alpha_effective", level},
      {"method", std::string(to_string(*method))},
      {"p_k", threshold.p_k},
      {"k", threshold.k},
      {"n", stack.n()},
      {"nu", tf.nu.value()},
      {"upper_count", upper.count()},
      {"lower_count", lower.count()},
  };
  if (regions.adaptive) {
    sidecar["stage_one_rejections"] = regions.adaptive->stage_one_rejections;
    sidecar["inverse_null_proportion"] = regions.adaptive->inverse_null_proportion;
  }
  std::ofstream side(sidecar_path(o.out));
  if (!side) throw DataError("cannot write " + sidecar_path(o.out));
  side << sidecar.dump(2) << '\n';

  out << to_string(*method) << " c=" << format_number(o.c) << " level=" << format_number(level)
      << " k=" << threshold.k << " p_k=" << format_number(threshold.p_k)
      << " |upper|=" << upper.count() << " |lower|=" << lower.count() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  SignalOptions signal;
  double noise_fwhm = 0.0;
  double noise_sd = 1.0;
  std::size_t n = 80;
  std::size_t reps = 1000;
  double alpha = 0.05;
  double c_min = -2.0;
  double c_max = 2.0;
  double c_step = 0.2;
  std::string methods = "upper-bh,lower-bh,lower-adaptive,joint";
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::string joint_doubling = "on";
  std::string estimate = "rejection-fraction";
  std::string svg;
  std::string fndr_svg;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  if (o.c_min > o.c_max) throw UsageError("--c-min exceeds --c-max");
  if (!(o.c_step > 0.0)) throw UsageError("--c-step must be positive");
  if (o.n < 2) throw UsageError("--n must be at least 2");
  if (o.reps < 1) throw UsageError("--reps must be at least 1");

  SimulationConfig cfg;
  cfg.shape = LatticeShape{o.signal.height, o.signal.width};
  cfg.n = o.n;
  cfg.reps = o.reps;
  cfg.alpha = o.alpha;
  cfg.c_grid = level_grid(o.c_min, o.c_max, o.c_step);
  cfg.methods = parse_method_list(o.methods);
  cfg.signal = make_signal(o.signal.kind, o.signal.fwhm, o.signal.radius);
  cfg.noise = NoiseSpec{o.noise_sd, o.noise_fwhm};
  cfg.seed = o.seed;
  cfg.joint_doubling = o.joint_doubling == "on";
  cfg.adaptive_estimate = parse_estimate(o.estimate);
  cfg.workers = o.workers;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const SimulationResult result = run_simulation(cfg);

  std::ofstream csv(o.signal.out, std::ios::binary | std::ios::trunc);
  if (!csv) throw DataError("cannot write " + o.signal.out);
  write_result_csv(csv, result);
  if (!o.svg.empty()) {
    std::ofstream svg(o.svg, std::ios::binary | std::ios::trunc);
    if (!svg) throw DataError("cannot write " + o.svg);
    render_svg(svg, fdr_chart(result));
  }
  if (!o.fndr_svg.empty()) {
    std::ofstream svg(o.fndr_svg, std::ios::binary | std::ios::trunc);
    if (!svg) throw DataError("cannot write " + o.fndr_svg);
    render_svg(svg, fndr_chart(result));
  }
  out << "wrote " << result.cells.size() << " rows to " << o.signal.out << '\n';
  if (result.dominance_violations) {
    out << "warning: adaptive dominance violated " << result.dominance_violations << " of "
        << result.dominance_checks << " checks\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
  std::string truth;
  std::string regions;
  std::string sidecar;
  std::string out;
};

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  const ScalarField truth = read_single_field(o.truth);
  const SampleStack pair = read_stack(o.regions);
  if (pair.n() != 2) throw DataError(o.regions + " must hold exactly two region fields");

  const std::string side_path = o.sidecar.empty() ? sidecar_path(o.regions) : o.sidecar;
  std::ifstream side(side_path);
  if (!side) throw DataError("cannot open sidecar " + side_path);
  json meta;
  try {
    meta = json::parse(side);
  } catch (const json::exception& e) {
    throw DataError("bad sidecar " + side_path + ": " + e.what());
  }
  if (!meta.contains("method") || !meta.contains("c")) {
    throw DataError("sidecar lacks method or c");
  }
  const auto method = parse_method(meta["method"].get<std::string>());
  if (!method) throw DataError("sidecar names an unknown method");

  if (!(truth.shape() == pair.shape()) || truth.mask() != pair.mask()) {
    throw ShapeMismatch("truth " + truth.shape().to_string() + " vs regions " +
                        pair.shape().to_string());
  }

  const RegionSet upper = field_to_region(pair[0]);
  const RegionSet lower = field_to_region(pair[1]);
  ConfidenceRegions regions{
      .c = meta["c"].get<double>(),
      .alpha = meta.value("alpha_effective", meta.value("alpha", 0.0)),
      .method = *method,
      .upper = upper,
      .lower = lower,
      .point_estimate = RegionSet::empty(pair.shape(), pair.mask()),
      .upper_threshold = std::nullopt,
      .lower_threshold = std::nullopt,
      .adaptive = std::nullopt,
  };
  const ErrorProportions e = error_proportions(*method, truth, regions);

  std::ostringstream row;
  row << "method,c,fdp,fndp,fdp_numerator,fdp_denominator,fndp_numerator,fndp_denominator\n"
      << to_string(*method) << ',' << format_number(regions.c) << ',' << format_number(e.fdp)
      << ',' << format_number(e.fndp) << ',' << e.fdp_numerator << ',' << e.fdp_denominator
      << ',' << e.fndp_numerator << ',' << e.fndp_denominator << '\n';
  if (o.out.empty()) {
    out << row.str();
  } else {
    std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + o.out);
    f << row.str();
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Confidence regions for excursion sets with FDR control", "excr"};
  app.require_subcommand(1);

  SignalOptions signal;
  auto* sig = app.add_subcommand("signal", "write a synthetic ramp/step/circle signal");
  add_signal_flags(*sig, signal);
  sig->add_option("--out", signal.out, "output field file")->required();

  SampleOptions sample;
  auto* smp = app.add_subcommand("sample", "draw a stack of noisy observations of a signal");
  add_signal_flags(*smp, sample.signal);
  smp->add_option("--truth", sample.truth, "read the mean field from a file instead");
  smp->add_option("--noise-sd", sample.noise_sd)->capture_default_str();
  smp->add_option("--noise-fwhm", sample.noise_fwhm)->capture_default_str();
  smp->add_option("--n", sample.n, "number of samples")->capture_default_str();
  smp->add_option("--seed", sample.seed)->capture_default_str();
  smp->add_option("--out", sample.signal.out, "output stack file")->required();

  CrOptions cr;
  auto* crc = app.add_subcommand("cr", "build upper/lower confidence regions from a stack");
  crc->add_option("--input", cr.input, "stack file")->required();
  crc->add_option("--c", cr.c, "excursion level")->required();
  crc->add_option("--alpha", cr.alpha)->capture_default_str();
  crc->add_option("--method", cr.method)
      ->check(CLI::IsMember({"upper-bh", "lower-bh", "lower-adaptive", "joint"}))
      ->capture_default_str();
  crc->add_option("--joint-doubling", cr.joint_doubling, "run joint at 2*alpha")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  crc->add_option("--adaptive-estimate", cr.estimate)
      ->check(CLI::IsMember({"rejection-fraction", "printed"}))
      ->capture_default_str();
  crc->add_option("--out", cr.out, "regions file (upper, lower); sidecar at <out>.json")
      ->required();

  SimulateOptions sim;
  auto* simc = app.add_subcommand("simulate", "Monte Carlo FDR/FNDR curves");
  add_signal_flags(*simc, sim.signal);
  simc->add_option("--noise-fwhm", sim.noise_fwhm)->capture_default_str();
  simc->add_option("--noise-sd", sim.noise_sd)->capture_default_str();
  simc->add_option("--n", sim.n)->capture_default_str();
  simc->add_option("--reps", sim.reps)->capture_default_str();
  simc->add_option("--alpha", sim.alpha)->capture_default_str();
  simc->add_option("--c-min", sim.c_min)->capture_default_str();
  simc->add_option("--c-max", sim.c_max)->capture_default_str();
  simc->add_option("--c-step", sim.c_step)->capture_default_str();
  simc->add_option("--methods", sim.methods, "comma list")->capture_default_str();
  simc->add_option("--seed", sim.seed)->capture_default_str();
  simc->add_option("--workers", sim.workers, "0 = hardware concurrency")
      ->capture_default_str();
  simc->add_option("--joint-doubling", sim.joint_doubling)
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  simc->add_option("--adaptive-estimate", sim.estimate)
      ->check(CLI::IsMember({"rejection-fraction", "printed"}))
      ->capture_default_str();
  simc->add_option("--out", sim.signal.out, "results CSV")->required();
  simc->add_option("--svg", sim.svg, "FDR curves SVG");
  simc->add_option("--fndr-svg", sim.fndr_svg, "FNDR curves SVG");

  EvalOptions ev;
  auto* evc = app.add_subcommand("eval", "score regions against a known mean field");
  evc->add_option("--truth", ev.truth, "true mean field")->required();
  evc->add_option("--regions", ev.regions, "regions file written by `cr`")->required();
  evc->add_option("--sidecar", ev.sidecar, "defaults to <regions>.json");
  evc->add_option("--out", ev.out, "CSV destination (stdout when omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sig) return cmd_signal(signal, out);
    if (*smp) return cmd_sample(sample, out);
    if (*crc) return cmd_cr(cr, out);
    if (*simc) return cmd_simulate(sim, out);
    if (*evc) return cmd_eval(ev, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    // FieldFileError, ShapeMismatch, DataError and anything raised while
    // processing the input.
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace excursion::cli

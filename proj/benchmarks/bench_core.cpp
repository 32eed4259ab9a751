#include <benchmark/benchmark.h>

#include <random>

#include "excursion/mtp.hpp"
#include "excursion/regions.hpp"
#include "excursion/simgen.hpp"

namespace {

using namespace excursion;

void BM_BhStepUp(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  std::vector<double> p(static_cast<std::size_t>(state.range(0)));
  for (auto& x : p) x = u(rng) * u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(bh_step_up(p, 0.05));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BhStepUp)->Arg(2500)->Arg(5000)->Arg(100000);

void BM_StudentTCdf(benchmark::State& state) {
  const DegreesOfFreedom nu(79);
  double t = -6.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(student_t_cdf(t, nu));
    t = t > 6.0 ? -6.0 : t + 0.013;
  }
}
BENCHMARK(BM_StudentTCdf);

void BM_SmoothField(benchmark::State& state) {
  Rng rng(2);
  const ScalarField f = generate_noise_field(LatticeShape{50, 50}, NoiseSpec{1.0, 0.0}, rng);
  const double fwhm = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(smooth_field(f, fwhm));
}
BENCHMARK(BM_SmoothField)->Arg(5)->Arg(10)->Arg(15);

void BM_ConfidenceRegions(benchmark::State& state) {
  Rng rng(3);
  const ScalarField mu = generate_signal(SignalSpec::ramp(), LatticeShape{50, 50});
  const SampleStack s = generate_sample_stack(mu, NoiseSpec{1.0, 5.0}, 80, rng);
  const TField tf = t_statistic_field(s, 0.0);
  const auto method = static_cast<Method>(state.range(0));
  const double level = method == Method::JointBH ? 0.1 : 0.05;
  for (auto _ : state) benchmark::DoNotOptimize(confidence_regions(method, tf.t, tf.nu, 0.0, level));
  state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(BM_ConfidenceRegions)->DenseRange(0, 3);

// One replication of the default grid: 21 levels x 4 methods.
void BM_SimulationReplication(benchmark::State& state) {
  SimulationConfig cfg;
  cfg.reps = 1;
  cfg.noise = NoiseSpec{1.0, 5.0};
  cfg.workers = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_simulation(cfg));
    ++cfg.seed;
  }
}
BENCHMARK(BM_SimulationReplication)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "orthoglide/calibration.hpp"
#include "orthoglide/kinematics.hpp"
#include "orthoglide/sensitivity.hpp"
#include "orthoglide/simulator.hpp"

namespace {

using namespace orthoglide;

const MachineGeometry kGeom;

ParameterDeviation sample_dev() {
  ParameterDeviation d;
  d.joint_offsets = {0.3, -0.2, 0.1};
  d.leg_length_deviations = {-0.1, 0.25, 0.05};
  return d;
}

void BM_InverseKinematics(benchmark::State& state) {
  const ParameterDeviation dev = sample_dev();
  const TcpPosition p{Vector3(12.0, -35.0, 48.0)};
  for (auto _ : state) benchmark::DoNotOptimize(inverse_kinematics(p, dev, kGeom));
}
BENCHMARK(BM_InverseKinematics);

void BM_DirectKinematics(benchmark::State& state) {
  const ParameterDeviation dev = sample_dev();
  const JointCoordinates rho = inverse_kinematics({Vector3(12.0, -35.0, 48.0)}, dev, kGeom);
  for (auto _ : state) benchmark::DoNotOptimize(direct_kinematics(rho, dev, kGeom));
}
BENCHMARK(BM_DirectKinematics);

void BM_ParameterJacobian(benchmark::State& state) {
  const ParameterDeviation dev = sample_dev();
  const TcpPosition p{Vector3(12.0, -35.0, 48.0)};
  const JointCoordinates rho = inverse_kinematics(p, dev, kGeom);
  for (auto _ : state) benchmark::DoNotOptimize(parameter_jacobian(p, rho, dev, kGeom));
}
BENCHMARK(BM_ParameterJacobian);

void BM_SolveIdentification(benchmark::State& state) {
  const DesignMatrix d = build_design_matrix(kGeom);
  const MeasurementVector m = simulate_measurements_linear(sample_dev(), kGeom);
  for (auto _ : state) benchmark::DoNotOptimize(solve_identification(m, ParameterMask::full(), d));
}
BENCHMARK(BM_SolveIdentification);

void BM_NonlinearMeasurements(benchmark::State& state) {
  const ParameterDeviation dev = sample_dev();
  for (auto _ : state) benchmark::DoNotOptimize(simulate_measurements_nonlinear(dev, kGeom));
}
BENCHMARK(BM_NonlinearMeasurements);

void BM_MonteCarlo(benchmark::State& state) {
  ExperimentPlan plan;
  MonteCarloOptions opt;
  opt.trials = static_cast<int>(state.range(0));
  opt.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(plan, sample_dev(), NoiseModel{}, kGeom, opt));
}
BENCHMARK(BM_MonteCarlo)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "orthoglide/calibration.hpp"
#include "orthoglide/geometry.hpp"
#include "orthoglide/sensitivity.hpp"

namespace orthoglide {

enum class SimulationMode { Linear, Nonlinear };

std::string_view mode_name(SimulationMode mode) noexcept;
/// "linear" or "nonlinear". Throws ValidationError.
SimulationMode parse_mode(std::string_view name);

/// Per-reading gauge noise. Readings are perturbed by N(0, std_dev) and then
/// rounded to a multiple of quantization_step (0 disables rounding).
struct NoiseModel {
  double std_dev = 0.01;            ///< mm
  double quantization_step = 0.01;  ///< mm
  std::uint64_t seed = 0;

  static NoiseModel none(std::uint64_t seed = 0) { return {0.0, 0.0, seed}; }
  void validate() const;
};

/// Posture visited by a leg during one measurement pass.
enum class PlanStep { Zero, Max, Min };

std::string_view step_name(PlanStep step) noexcept;
PlanStep parse_step(std::string_view name);

struct ExperimentPlan {
  int repeats = 3;
  std::vector<PlanStep> sequence{PlanStep::Zero, PlanStep::Max, PlanStep::Min, PlanStep::Zero};
  SimulationMode mode = SimulationMode::Nonlinear;

  /// repeats >= 1; sequence starts and ends at Zero and visits Max and Min.
  void validate() const;
};

struct PostureConfiguration {
  TcpPosition p;
  JointCoordinates rho;
};

/// Nominal commanded posture: Zero is p = 0, rho = (L, L, L); XMax is
/// p = (L sin(a), 0, 0), rho = (L + L sin(a), L cos(a), L cos(a)) with
/// a = asin(joint_max / L); the other postures permute axes or use joint_min.
PostureConfiguration posture_configuration(PostureId id, const MachineGeometry& geom);

/// First-order observables: D * (true_dev - controller_dev). The controller
/// deviation models the parameters the control software compensates for
/// (zero before calibration).
MeasurementVector simulate_measurements_linear(
    const ParameterDeviation& true_dev, const MachineGeometry& geom,
    const ParameterDeviation& controller_dev = ParameterDeviation::zero());

/// Exact observables of the fixed-gauge protocol.
///
/// For each leg the controller commands the Zero posture (inverse kinematics
/// under controller_dev); the true machine answers through direct kinematics
/// under true_dev. Each gauge sits at the true leg midpoint and keeps that
/// axial coordinate. At the Max and Min postures the reading is the transverse
/// coordinate of the true leg segment (joint centre to TCP) at the gauge
/// station, minus the Zero reading.
///
/// Throws GaugeOffLegError if the station falls outside the leg segment.
MeasurementVector simulate_measurements_nonlinear(
    const ParameterDeviation& true_dev, const MachineGeometry& geom,
    const ParameterDeviation& controller_dev = ParameterDeviation::zero());

MeasurementVector simulate_measurements(
    SimulationMode mode, const ParameterDeviation& true_dev, const MachineGeometry& geom,
    const ParameterDeviation& controller_dev = ParameterDeviation::zero());

/// One gauge reading of the experiment log.
struct RawReading {
  int trial = 0;
  Axis leg = Axis::X;
  Axis axis = Axis::Y;
  PlanStep posture = PlanStep::Zero;
  int repeat = 0;
  double value_mm = 0.0;

  bool operator==(const RawReading&) const = default;
};

struct ExperimentRun {
  MeasurementVector measurements;  ///< repeat-averaged differences
  std::vector<MeasurementVector> per_repeat;
  std::vector<RawReading> readings;
};

/// Simulates the repeated measurement protocol. Each repeat reads every gauge
/// at every step of the plan; the Max (Min) difference of a repeat is the mean
/// Max (Min) reading minus the mean Zero reading. Differences are averaged
/// arithmetically across repeats. The random stream is derived from
/// (noise.seed, trial), so results are reproducible.
ExperimentRun run_experiment(const ExperimentPlan& plan, const ParameterDeviation& true_dev,
                             const NoiseModel& noise, const MachineGeometry& geom, int trial = 0,
                             const ParameterDeviation& controller_dev = ParameterDeviation::zero());

struct MonteCarloOptions {
  int trials = 500;
  unsigned threads = 0;  ///< 0 selects std::thread::hardware_concurrency()
  ParameterMask mask = ParameterMask::full();
};

struct MonteCarloSummary {
  int trials = 0;
  int repeats = 0;
  Vector6 mean_abs_error = Vector6::Zero();  ///< per parameter, mm
  Vector6 p95_abs_error = Vector6::Zero();   ///< per parameter, nearest-rank, mm
  double overall_mean_abs_error = 0.0;       ///< over identified parameters, mm

  bool operator==(const MonteCarloSummary&) const = default;
};

/// Repeats run_experiment + solve_identification over independent trials.
/// Trials may run on several threads; the reduction is in trial order, so
/// the result does not depend on the thread count.
MonteCarloSummary monte_carlo(const ExperimentPlan& plan, const ParameterDeviation& true_dev,
                              const NoiseModel& noise, const MachineGeometry& geom,
                              const MonteCarloOptions& options = {});

struct ProtocolOptions {
  ExperimentPlan plan;
  /// Parameter set whose identified values are loaded into the controller for
  /// the verification experiment.
  ParameterMask compensation = ParameterMask::full();
};

struct ProtocolReport {
  ParameterDeviation true_dev;

  // #1: plain measurement pass.
  MeasurementVector baseline;
  double baseline_rms = 0.0;

  // #2: identification with the full and the two reduced parameter sets.
  MeasurementVector identification_data;
  double pre_calibration_rms = 0.0;
  std::vector<CalibrationResult> table;  ///< full, rho, length

  // #3: verification on the compensated machine.
  ParameterMask compensation_mask = ParameterMask::full();
  ParameterDeviation compensation;
  MeasurementVector verification;
  double post_calibration_rms = 0.0;
  CalibrationResult refit;  ///< full-set identification on the verification data
};

ProtocolReport three_experiment_protocol(const ParameterDeviation& true_dev, const NoiseModel& noise,
                                         const MachineGeometry& geom,
                                         const ProtocolOptions& options = {});

}  // namespace orthoglide

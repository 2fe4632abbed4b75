#include "orthoglide/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "orthoglide/errors.hpp"
#include "orthoglide/kinematics.hpp"

namespace orthoglide {
namespace {

PostureId posture_for(Axis leg, Extreme e) {
  return e == Extreme::Max ? max_posture(leg) : min_posture(leg);
}

std::mt19937_64 trial_stream(std::uint64_t seed, int trial) {
  const auto t = static_cast<std::uint64_t>(trial);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
  return std::mt19937_64(seq);
}

double quantize(double value, double step) {
  return step > 0.0 ? step * std::round(value / step) : value;
}

// Transverse readings of one leg's gauges, relative to the Zero posture.
struct LegStation {
  Vector3 point;  // gauge station in space
  int leg;
};

LegStation zero_station(int leg, const ParameterDeviation& true_dev, const MachineGeometry& geom,
                        const ParameterDeviation& controller_dev) {
  const TcpPosition target = posture_configuration(PostureId::Zero, geom).p;
  const JointCoordinates cmd = inverse_kinematics(target, controller_dev, geom);
  const Vector3 tcp = direct_kinematics(cmd, true_dev, geom).p;
  Vector3 joint = Vector3::Zero();
  joint[leg] = cmd.rho[leg] + true_dev.joint_offsets[leg];
  return {(tcp + joint) / 2.0, leg};
}

Vector3 leg_point_at_station(const LegStation& station, PostureId id, const ParameterDeviation& true_dev,
                             const MachineGeometry& geom, const ParameterDeviation& controller_dev) {
  const int i = station.leg;
  const TcpPosition target = posture_configuration(id, geom).p;
  const JointCoordinates cmd = inverse_kinematics(target, controller_dev, geom);
  const Vector3 tcp = direct_kinematics(cmd, true_dev, geom).p;
  Vector3 joint = Vector3::Zero();
  joint[i] = cmd.rho[i] + true_dev.joint_offsets[i];

  const double mu = (station.point[i] - joint[i]) / (tcp[i] - joint[i]);
  if (!(mu >= 0.0 && mu <= 1.0)) {
    std::ostringstream os;
    os << "gauge station of the " << axis_name(kAxes[i]) << "-leg is off the leg at posture "
       << posture_name(id) << " (mu = " << mu << ")";
    throw GaugeOffLegError(os.str());
  }
  return mu * tcp + (1.0 - mu) * joint;
}

}  // namespace

std::string_view mode_name(SimulationMode mode) noexcept {
  return mode == SimulationMode::Linear ? "linear" : "nonlinear";
}

SimulationMode parse_mode(std::string_view name) {
  if (name == "linear") return SimulationMode::Linear;
  if (name == "nonlinear") return SimulationMode::Nonlinear;
  throw ValidationError("unknown mode '" + std::string(name) + "' (expected linear or nonlinear)");
}

void NoiseModel::validate() const {
  if (!(std::isfinite(std_dev) && std_dev >= 0.0)) throw ValidationError("noise std_dev must be >= 0");
  if (!(std::isfinite(quantization_step) && quantization_step >= 0.0)) {
    throw ValidationError("noise quantization_step must be >= 0");
  }
}

std::string_view step_name(PlanStep step) noexcept {
  switch (step) {
    case PlanStep::Zero: return "zero";
    case PlanStep::Max: return "max";
    case PlanStep::Min: return "min";
  }
  return "?";
}

PlanStep parse_step(std::string_view name) {
  if (name == "zero") return PlanStep::Zero;
  if (name == "max") return PlanStep::Max;
  if (name == "min") return PlanStep::Min;
  throw ValidationError("unknown plan step '" + std::string(name) + "' (expected zero, max or min)");
}

void ExperimentPlan::validate() const {
  if (repeats < 1) throw ValidationError("plan: repeats must be at least 1");
  if (sequence.empty() || sequence.front() != PlanStep::Zero || sequence.back() != PlanStep::Zero) {
    throw ValidationError("plan: motion sequence must start and end at zero");
  }
  const auto has = [&](PlanStep s) { return std::find(sequence.begin(), sequence.end(), s) != sequence.end(); };
  if (!has(PlanStep::Max) || !has(PlanStep::Min)) {
    throw ValidationError("plan: motion sequence must visit both max and min");
  }
}

PostureConfiguration posture_configuration(PostureId id, const MachineGeometry& geom) {
  const double len = geom.leg_length;
  PostureConfiguration c;
  c.rho.rho = Vector3::Constant(len);
  if (id == PostureId::Zero) return c;

  const double alpha = posture_angle(id, geom);
  const double along = len * std::sin(alpha);
  const double across = len * std::cos(alpha);
  const int i = id == PostureId::XMax || id == PostureId::XMin   ? 0
                : id == PostureId::YMax || id == PostureId::YMin ? 1
                                                                 : 2;
  c.p.p[i] = along;
  c.rho.rho = Vector3::Constant(across);
  c.rho.rho[i] = len + along;
  return c;
}

MeasurementVector simulate_measurements_linear(const ParameterDeviation& true_dev,
                                               const MachineGeometry& geom,
                                               const ParameterDeviation& controller_dev) {
  MeasurementVector m;
  m.values = build_design_matrix(geom) * (true_dev.to_vector() - controller_dev.to_vector());
  return m;
}

MeasurementVector simulate_measurements_nonlinear(const ParameterDeviation& true_dev,
                                                  const MachineGeometry& geom,
                                                  const ParameterDeviation& controller_dev) {
  MeasurementVector m;
  for (Axis leg : kAxes) {
    const LegStation station = zero_station(index(leg), true_dev, geom, controller_dev);
    for (Extreme e : {Extreme::Max, Extreme::Min}) {
      const Vector3 point =
          leg_point_at_station(station, posture_for(leg, e), true_dev, geom, controller_dev);
      for (Axis axis : kAxes) {
        if (axis == leg) continue;
        const int row = canonical_index({axis, leg, e});
        m.values[row] = point[index(axis)] - station.point[index(axis)];
      }
    }
  }
  return m;
}

MeasurementVector simulate_measurements(SimulationMode mode, const ParameterDeviation& true_dev,
                                        const MachineGeometry& geom,
                                        const ParameterDeviation& controller_dev) {
  return mode == SimulationMode::Linear
             ? simulate_measurements_linear(true_dev, geom, controller_dev)
             : simulate_measurements_nonlinear(true_dev, geom, controller_dev);
}

ExperimentRun run_experiment(const ExperimentPlan& plan, const ParameterDeviation& true_dev,
                             const NoiseModel& noise, const MachineGeometry& geom, int trial,
                             const ParameterDeviation& controller_dev) {
  plan.validate();
  noise.validate();
  const MeasurementVector exact = simulate_measurements(plan.mode, true_dev, geom, controller_dev);

  std::mt19937_64 rng = trial_stream(noise.seed, trial);
  std::normal_distribution<double> gauss(0.0, 1.0);

  ExperimentRun run;
  run.readings.reserve(static_cast<std::size_t>(3 * plan.repeats) * plan.sequence.size() * 2);
  run.per_repeat.resize(static_cast<std::size_t>(plan.repeats));

  for (Axis leg : kAxes) {
    for (int rep = 0; rep < plan.repeats; ++rep) {
      // Per gauge axis: accumulated readings by step kind.
      double total[3][3] = {};
      int visits[3] = {};
      for (PlanStep step : plan.sequence) {
        ++visits[static_cast<int>(step)];
        for (Axis axis : kAxes) {
          if (axis == leg) continue;
          double value = 0.0;
          if (step != PlanStep::Zero) {
            const Extreme e = step == PlanStep::Max ? Extreme::Max : Extreme::Min;
            value = exact.values[canonical_index({axis, leg, e})];
          }
          const double noisy = quantize(value + noise.std_dev * gauss(rng), noise.quantization_step);
          total[index(axis)][static_cast<int>(step)] += noisy;
          run.readings.push_back({trial, leg, axis, step, rep, noisy});
        }
      }
      for (Axis axis : kAxes) {
        if (axis == leg) continue;
        const double* t = total[index(axis)];
        const double zero = t[0] / visits[0];
        Vector12& diff = run.per_repeat[static_cast<std::size_t>(rep)].values;
        diff[canonical_index({axis, leg, Extreme::Max})] = t[1] / visits[1] - zero;
        diff[canonical_index({axis, leg, Extreme::Min})] = t[2] / visits[2] - zero;
      }
    }
  }
  Vector12 sum = Vector12::Zero();
  for (const MeasurementVector& r : run.per_repeat) sum += r.values;
  run.measurements.values = sum / static_cast<double>(plan.repeats);
  return run;
}

MonteCarloSummary monte_carlo(const ExperimentPlan& plan, const ParameterDeviation& true_dev,
                              const NoiseModel& noise, const MachineGeometry& geom,
                              const MonteCarloOptions& options) {
  if (options.trials < 1) throw ValidationError("monte carlo: trials must be at least 1");
  plan.validate();
  noise.validate();

  const DesignMatrix design = build_design_matrix(geom);
  const Vector6 truth = true_dev.to_vector();
  const auto n = static_cast<std::size_t>(options.trials);
  std::vector<Vector6> errors(n);

  unsigned workers = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(n));
  std::vector<std::exception_ptr> failures(workers);

  const auto work = [&](unsigned w) {
    try {
      for (std::size_t t = w; t < n; t += workers) {
        const ExperimentRun run = run_experiment(plan, true_dev, noise, geom, static_cast<int>(t));
        const CalibrationResult r = solve_identification(run.measurements, options.mask, design);
        errors[t] = (r.identified.to_vector() - truth).cwiseAbs();
      }
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
    work(0);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  MonteCarloSummary s;
  s.trials = options.trials;
  s.repeats = plan.repeats;
  for (const Vector6& e : errors) s.mean_abs_error += e;
  s.mean_abs_error /= static_cast<double>(n);

  const std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  std::vector<double> column(n);
  double overall = 0.0;
  for (int k = 0; k < 6; ++k) {
    for (std::size_t t = 0; t < n; ++t) column[t] = errors[t][k];
    std::sort(column.begin(), column.end());
    s.p95_abs_error[k] = column[rank - 1];
    if (options.mask[k]) overall += s.mean_abs_error[k];
  }
  s.overall_mean_abs_error = overall / options.mask.count();
  return s;
}

ProtocolReport three_experiment_protocol(const ParameterDeviation& true_dev, const NoiseModel& noise,
                                         const MachineGeometry& geom, const ProtocolOptions& options) {
  const ExperimentPlan& plan = options.plan;
  ProtocolReport report;
  report.true_dev = true_dev;

  report.baseline = run_experiment(plan, true_dev, noise, geom, 0).measurements;
  report.baseline_rms = rms(report.baseline.values);

  report.identification_data = run_experiment(plan, true_dev, noise, geom, 1).measurements;
  report.pre_calibration_rms = rms(report.identification_data.values);
  const DesignMatrix design = build_design_matrix(geom);
  for (const ParameterMask& mask :
       {ParameterMask::full(), ParameterMask::joint_offsets(), ParameterMask::leg_lengths()}) {
    report.table.push_back(solve_identification(report.identification_data, mask, design));
  }

  report.compensation_mask = options.compensation;
  report.compensation =
      solve_identification(report.identification_data, options.compensation, design).identified;
  report.verification =
      run_experiment(plan, true_dev, noise, geom, 2, report.compensation).measurements;
  report.post_calibration_rms = rms(report.verification.values);
  report.refit = solve_identification(report.verification, ParameterMask::full(), design);
  return report;
}

}  // namespace orthoglide

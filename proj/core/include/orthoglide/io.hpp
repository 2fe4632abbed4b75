#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "orthoglide/calibration.hpp"
#include "orthoglide/geometry.hpp"
#include "orthoglide/simulator.hpp"

// File formats. All JSON readers reject unknown keys and throw
// ValidationError with a message naming the offending field.

namespace orthoglide::io {

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view content);

// Geometry block: {"leg_length", "parallelogram_width", "tool_offset",
// "joint_min", "joint_max"}; missing keys take the prototype defaults.
MachineGeometry parse_geometry(std::string_view json);
std::string geometry_to_json(const MachineGeometry& geom);

// Deviation block: {"joint_offsets": [x, y, z], "leg_length_deviations": [x, y, z]}.
ParameterDeviation parse_deviation(std::string_view json);

/// Measurement file:
///   {"geometry": {...}, "unit": "mm" | "um",
///    "measurements": [{"leg": "x", "axis": "y", "posture": "max",
///                      "value_mm": 0.01, "repeats": [...]}, ...]}
/// Exactly the twelve (leg, axis, posture) labels must appear, in any order;
/// they are reordered canonically. An entry carries value_mm or value_um, or
/// only repeats (then the value is their mean). "unit" applies to repeats.
struct MeasurementFile {
  MachineGeometry geometry;
  MeasurementVector measurements;
  std::array<std::vector<double>, 12> repeats;  ///< mm, canonical order
};

MeasurementFile parse_measurement_file(std::string_view json);
std::string measurement_file_to_json(const MeasurementFile& file);

/// Identification report: one row per parameter set.
struct CalibrationReport {
  MachineGeometry geometry;
  MeasurementVector measurements;
  std::vector<CalibrationResult> rows;
};

std::string report_to_json(const CalibrationReport& report);
CalibrationReport parse_report(std::string_view json);
/// Table-shaped human-readable report, 6 decimals.
std::string report_to_text(const CalibrationReport& report);

/// Experiment configuration consumed by `simulate` and `pipeline`.
struct ExperimentConfig {
  MachineGeometry geometry;
  ParameterDeviation true_dev;
  NoiseModel noise;
  ExperimentPlan plan;
  int monte_carlo_trials = 500;
  unsigned threads = 0;
  ParameterMask compensation = ParameterMask::full();
  double self_test_tolerance = 0.05;  ///< mm
  struct Outputs {
    std::optional<std::string> measurements;
    std::optional<std::string> readings;
    std::optional<std::string> summary;
    std::optional<std::string> report;
  } outputs;
};

/// {"geometry", "true_dev", "seed", "noise": {"std_dev", "quantization_step"},
///  "plan": {"repeats", "sequence", "mode"}, "monte_carlo": {"trials", "threads"},
///  "compensation", "self_test_tolerance", "outputs": {...}}
ExperimentConfig parse_experiment_config(std::string_view json);

/// CSV with header trial,leg,axis,posture,repeat,value_mm.
std::string readings_to_csv(const std::vector<RawReading>& readings);

std::string monte_carlo_to_json(const MonteCarloSummary& summary);
MonteCarloSummary parse_monte_carlo(std::string_view json);

std::string protocol_to_json(const ProtocolReport& report, const MachineGeometry& geom);
std::string protocol_to_text(const ProtocolReport& report, const MachineGeometry& geom);

}  // namespace orthoglide::io

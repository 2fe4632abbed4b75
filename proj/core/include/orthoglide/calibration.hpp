#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "orthoglide/geometry.hpp"

namespace orthoglide {

using Vector12 = Eigen::Matrix<double, 12, 1>;
using DesignMatrix = Eigen::Matrix<double, 12, 6>;

enum class Extreme { Max, Min };

std::string_view extreme_name(Extreme e) noexcept;
/// Accepts "max" / "min" (case-insensitive). Throws ValidationError.
Extreme parse_extreme(std::string_view name);

/// Identifies one parallelism observable: the deviation along `axis` of the
/// `leg` centerline between the Max (or Min) posture of that leg and Zero.
struct MeasurementLabel {
  Axis axis;
  Axis leg;
  Extreme extreme;

  bool operator==(const MeasurementLabel&) const = default;
};

/// Canonical row order of the identification system:
/// dx_y+, dy_x+, dx_y-, dy_x-, dy_z+, dz_y+, dy_z-, dz_y-, dx_z+, dz_x+, dx_z-, dz_x-.
const std::array<MeasurementLabel, 12>& canonical_labels() noexcept;

/// Row of `label` in canonical order. Throws ValidationError if axis == leg.
int canonical_index(const MeasurementLabel& label);

/// Short tag such as "dy_x+".
std::string label_tag(const MeasurementLabel& label);

/// Twelve gauge-reading differences in canonical order, mm.
struct MeasurementVector {
  Vector12 values = Vector12::Zero();

  /// Rejects non-finite entries and |value| >= bound_mm.
  void validate(double bound_mm = 10.0) const;
};

struct CoefficientTriple {
  double a;  ///< sin(alpha)
  double b;  ///< (0.5 + sin(alpha)) * tan(alpha)
  double c;  ///< (0.5 + sin(alpha)) / cos(alpha) - 0.5
};

CoefficientTriple coefficient_triple(double alpha);

/// Gauge stations g_x, g_y, g_z: first-order leg midpoints at the Zero posture.
std::array<Vector3, 3> gauge_initial_locations(const ParameterDeviation& dev,
                                               const MachineGeometry& geom);

/// The 12x6 linear map from (d_rho, dL) to the parallelism observables.
DesignMatrix build_design_matrix(const MachineGeometry& geom);

/// Subset of the six parameter columns to identify; the rest are held at 0.
class ParameterMask {
 public:
  /// Throws ValidationError if no column is selected.
  explicit ParameterMask(std::array<bool, 6> columns);

  static ParameterMask full() { return ParameterMask({true, true, true, true, true, true}); }
  static ParameterMask joint_offsets() { return ParameterMask({true, true, true, false, false, false}); }
  static ParameterMask leg_lengths() { return ParameterMask({false, false, false, true, true, true}); }
  /// "full", "rho" or "length".
  static ParameterMask parse(std::string_view name);

  bool operator[](int column) const noexcept { return columns_[static_cast<std::size_t>(column)]; }
  int count() const noexcept;
  /// "full", "rho", "length" for the named sets, otherwise a 0/1 string.
  std::string name() const;

  bool operator==(const ParameterMask&) const = default;

 private:
  std::array<bool, 6> columns_;
};

struct SolveOptions {
  double rank_tolerance = 1e-10;    ///< smallest / largest singular value
  std::optional<Vector12> weights;  ///< per-row weights of the squared residuals; identity if empty
};

struct CalibrationResult {
  ParameterMask mask = ParameterMask::full();
  ParameterDeviation identified;
  Vector12 residual = Vector12::Zero();  ///< measurements - D * solution, mm
  double residual_rms = 0.0;             ///< sqrt(sum(residual^2) / 12), mm
  double condition_number = 0.0;         ///< of the masked design matrix
};

/// Minimum-residual least-squares identification via the Moore-Penrose
/// pseudoinverse of the masked design matrix.
/// Throws RankDeficientError when sigma_min < rank_tolerance * sigma_max.
CalibrationResult solve_identification(const MeasurementVector& m, const ParameterMask& mask,
                                       const MachineGeometry& geom, const SolveOptions& options = {});

/// Same as above against an explicit design matrix.
CalibrationResult solve_identification(const MeasurementVector& m, const ParameterMask& mask,
                                       const DesignMatrix& design, const SolveOptions& options = {});

/// Joint command that places the TCP at `target` on a machine whose true
/// parameters equal the identified ones.
JointCoordinates compensate_joint_command(const TcpPosition& target, const CalibrationResult& result,
                                          const MachineGeometry& geom);

/// sqrt(mean(v^2)) over the twelve entries.
double rms(const Vector12& v);

}  // namespace orthoglide
